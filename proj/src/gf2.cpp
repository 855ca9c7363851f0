#include "gfspread/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <vector>

namespace gfspread {

namespace {

int top_bit(Row r) { return 31 - std::countl_zero(r); }

void check_ambient(int n) {
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("ambient dimension out of range");
}

// RREF over GF(2) on up to 14-bit rows (Zassenhaus uses doubled width).
// piv[b] holds the row whose leading bit is b, or 0.
int rref_rows(std::span<const Row> rows, int width, Row* piv) {
    for (int b = 0; b < width; ++b) piv[b] = 0;
    for (Row r : rows) {
        Row cur = r;
        while (cur) {
            int b = top_bit(cur);
            if (piv[b]) {
                cur ^= piv[b];
            } else {
                piv[b] = cur;
                break;
            }
        }
    }
    // clear each pivot bit from every other row
    for (int b = 0; b < width; ++b) {
        if (!piv[b]) continue;
        for (int c = b + 1; c < width; ++c) {
            if (piv[c] && ((piv[c] >> b) & 1)) piv[c] ^= piv[b];
        }
    }
    int dim = 0;
    for (int b = 0; b < width; ++b)
        if (piv[b]) ++dim;
    return dim;
}

Subspace from_pivots(const Row* piv, int width, int ambient_dim) {
    Subspace s;
    s.ambient_dim = static_cast<std::uint8_t>(ambient_dim);
    for (int b = width - 1; b >= 0; --b) {
        if (piv[b]) s.rows[s.dim++] = static_cast<std::uint8_t>(piv[b]);
    }
    return s;
}

}  // namespace

Subspace rref_canonicalize(std::span<const Row> rows, int ambient_dim) {
    check_ambient(ambient_dim);
    for (Row r : rows) {
        if (r >= (Row{1} << ambient_dim))
            throw std::invalid_argument("row exceeds ambient dimension");
    }
    Row piv[2 * kMaxDim];
    rref_rows(rows, ambient_dim, piv);
    return from_pivots(piv, ambient_dim, ambient_dim);
}

Subspace full_space(int n) {
    check_ambient(n);
    Subspace s;
    s.ambient_dim = static_cast<std::uint8_t>(n);
    s.dim = static_cast<std::uint8_t>(n);
    for (int i = 0; i < n; ++i) s.rows[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(1u << (n - 1 - i));
    return s;
}

Subspace zero_space(int n) {
    check_ambient(n);
    Subspace s;
    s.ambient_dim = static_cast<std::uint8_t>(n);
    return s;
}

Subspace point_subspace(Point p, int n) {
    Row r[1] = {p.mask};
    if (p.mask == 0) throw std::invalid_argument("zero vector is not a point");
    Subspace s = rref_canonicalize(r, n);
    return s;
}

Subspace span_of(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw std::invalid_argument("span: mismatched ambient dimensions");
    Row rows[2 * kMaxDim];
    int k = 0;
    for (int i = 0; i < a.dim; ++i) rows[k++] = a.row(i);
    for (int i = 0; i < b.dim; ++i) rows[k++] = b.row(i);
    return rref_canonicalize(std::span<const Row>(rows, static_cast<std::size_t>(k)), a.ambient_dim);
}

Subspace adjoin_point(const Subspace& a, Point p) {
    return span_of(a, point_subspace(p, a.ambient_dim));
}

Subspace intersect(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw std::invalid_argument("intersect: mismatched ambient dimensions");
    const int n = a.ambient_dim;
    // Zassenhaus: echelonize rows (x|x) for x in a and (y|0) for y in b on
    // doubled width; rows with zero high half span the intersection.
    std::vector<Row> rows;
    rows.reserve(static_cast<std::size_t>(a.dim) + b.dim);
    for (int i = 0; i < a.dim; ++i) rows.push_back((a.row(i) << n) | a.row(i));
    for (int i = 0; i < b.dim; ++i) rows.push_back(b.row(i) << n);
    Row piv[2 * kMaxDim];
    rref_rows(rows, 2 * n, piv);
    std::vector<Row> inter;
    for (int bit = 0; bit < n; ++bit) {
        if (piv[bit]) inter.push_back(piv[bit]);
    }
    return rref_canonicalize(inter, n);
}

bool contains(const Subspace& a, Point p) {
    if (p.mask == 0 || p.mask >= (Row{1} << a.ambient_dim))
        throw std::invalid_argument("point outside ambient space");
    Row cur = p.mask;
    for (int i = 0; i < a.dim; ++i) {
        int b = top_bit(a.row(i));
        if ((cur >> b) & 1) cur ^= a.row(i);
    }
    return cur == 0;
}

bool contains(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw std::invalid_argument("contains: mismatched ambient dimensions");
    for (int i = 0; i < b.dim; ++i) {
        Row cur = b.row(i);
        for (int j = 0; j < a.dim; ++j) {
            int bb = top_bit(a.row(j));
            if ((cur >> bb) & 1) cur ^= a.row(j);
        }
        if (cur != 0) return false;
    }
    return true;
}

PointMask point_set(const Subspace& a) {
    PointMask m;
    const unsigned total = 1u << a.dim;
    Row vecs[1u << kMaxDim];
    vecs[0] = 0;
    for (unsigned i = 1; i < total; ++i) {
        unsigned lsb = static_cast<unsigned>(std::countr_zero(i));
        vecs[i] = vecs[i & (i - 1)] ^ a.row(static_cast<int>(a.dim - 1 - lsb));
        m.set(vecs[i]);
    }
    return m;
}

std::uint64_t gaussian_binomial(int n, int k) {
    if (k > n || k < 0 || n < 0) throw std::invalid_argument("gaussian_binomial: k > n");
    using u128 = unsigned __int128;
    u128 num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        num *= (u128{1} << (n - i)) - 1;
        den *= (u128{1} << (k - i)) - 1;
    }
    u128 q = num / den;
    if (num % den != 0) throw std::logic_error("gaussian_binomial: inexact division");
    if (q > ~std::uint64_t{0}) throw std::overflow_error("gaussian_binomial overflow");
    return static_cast<std::uint64_t>(q);
}

Row coords_in(const Subspace& s, Row v) {
    Row cur = v, out = 0;
    for (int i = 0; i < s.dim; ++i) {
        int b = top_bit(s.row(i));
        if ((cur >> b) & 1) {
            cur ^= s.row(i);
            out |= Row{1} << (s.dim - 1 - i);
        }
    }
    if (cur != 0) throw std::invalid_argument("vector not in subspace");
    return out;
}

Row vector_from_coords(const Subspace& s, Row u) {
    Row v = 0;
    for (int j = 0; j < s.dim; ++j) {
        if ((u >> j) & 1) v ^= s.row(s.dim - 1 - j);
    }
    return v;
}

QuotientMap::QuotientMap(const Subspace& ambient, Point p) : ambient_(ambient), p_(p) {
    if (p.mask == 0) throw std::invalid_argument("quotient: zero vector is not a point");
    if (!contains(ambient, p)) throw std::invalid_argument("quotient: point not on ambient");
    if (ambient.dim == 0) throw std::invalid_argument("quotient: zero-dimensional ambient");
    p_local_ = coords_in(ambient_, p.mask);
    drop_bit_ = top_bit(p_local_);
}

Point QuotientMap::rep(Point q) const {
    if (!contains(ambient_, q)) throw std::invalid_argument("quotient rep: point not on ambient");
    if (q.mask == p_.mask) throw std::invalid_argument("quotient rep: point is the quotient point");
    return Point{std::min(q.mask, q.mask ^ p_.mask)};
}

Row QuotientMap::image_local(Row u) const {
    Row w = ((u >> drop_bit_) & 1) ? (u ^ p_local_) : u;
    Row low = w & ((Row{1} << drop_bit_) - 1);
    Row high = (w >> (drop_bit_ + 1)) << drop_bit_;
    return low | high;
}

Point QuotientMap::image(Point q) const {
    Point r = rep(q);  // validates
    (void)r;
    return Point{image_local(coords_in(ambient_, q.mask))};
}

Subspace QuotientMap::image(const Subspace& s) const {
    if (!contains(ambient_, s)) throw std::invalid_argument("quotient image: subspace not in ambient");
    Row rows[kMaxDim];
    for (int i = 0; i < s.dim; ++i) rows[i] = image_local(coords_in(ambient_, s.row(i)));
    return rref_canonicalize(std::span<const Row>(rows, static_cast<std::size_t>(s.dim)), local_dim());
}

Row QuotientMap::section(Row local) const {
    Row low = local & ((Row{1} << drop_bit_) - 1);
    Row high = (local >> drop_bit_) << (drop_bit_ + 1);
    return vector_from_coords(ambient_, low | high);
}

Subspace QuotientMap::lift(const Subspace& s_local, bool through_p) const {
    if (s_local.ambient_dim != local_dim())
        throw std::invalid_argument("quotient lift: wrong local dimension");
    Row rows[kMaxDim + 1];
    int k = 0;
    for (int i = 0; i < s_local.dim; ++i) rows[k++] = section(s_local.row(i));
    if (through_p) rows[k++] = p_.mask;
    return rref_canonicalize(std::span<const Row>(rows, static_cast<std::size_t>(k)), ambient_.ambient_dim);
}

QuotientMap quotient(const Subspace& ambient, Point p) { return QuotientMap(ambient, p); }

std::string format_row(Row r, int n) {
    std::string out(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i)
        if ((r >> i) & 1) out[static_cast<std::size_t>(i)] = '1';
    return out;
}

std::string format_subspace(const Subspace& s) {
    std::string out;
    for (int i = 0; i < s.dim; ++i) {
        if (i) out += ';';
        out += format_row(s.row(i), s.ambient_dim);
    }
    return out;
}

Row parse_row(std::string_view text, int n) {
    check_ambient(n);
    if (text.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("row literal has wrong length");
    Row r = 0;
    for (int i = 0; i < n; ++i) {
        char c = text[static_cast<std::size_t>(i)];
        if (c == '1') r |= Row{1} << i;
        else if (c != '0') throw std::invalid_argument("row literal has non-binary character");
    }
    return r;
}

Subspace parse_subspace(std::string_view text, int n) {
    std::vector<Row> rows;
    if (!text.empty()) {
        std::size_t pos = 0;
        while (true) {
            std::size_t semi = text.find(';', pos);
            std::string_view part = text.substr(pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos);
            rows.push_back(parse_row(part, n));
            if (semi == std::string_view::npos) break;
            pos = semi + 1;
        }
    }
    return rref_canonicalize(rows, n);
}

}  // namespace gfspread
