#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "gfspread/bits.hpp"

namespace gfspread {

// A vector of V(n,2) as a bitmask: bit i is coordinate i+1. n <= 7 throughout.
using Row = std::uint32_t;

constexpr int kMaxDim = 7;

// A 1-dimensional subspace, identified with its unique nonzero vector.
struct Point {
    Row mask = 0;
    friend auto operator<=>(const Point&, const Point&) = default;
};

// A subspace in canonical form: basis rows in reduced echelon form, each
// leading bit owned by exactly one row, rows sorted by descending leading
// bit. Two subspaces are equal iff their basis tuples are equal.
struct Subspace {
    std::uint8_t ambient_dim = 0;
    std::uint8_t dim = 0;
    std::array<std::uint8_t, kMaxDim> rows{};  // rows[0..dim-1]

    Row row(int i) const { return rows[static_cast<std::size_t>(i)]; }
    friend auto operator<=>(const Subspace&, const Subspace&) = default;
};

// Unique reduced-echelon basis of the span of `rows`. Dependent, duplicate
// and zero rows are absorbed. Throws std::invalid_argument if a row does not
// fit in ambient_dim bits.
Subspace rref_canonicalize(std::span<const Row> rows, int ambient_dim);

Subspace full_space(int n);
Subspace zero_space(int n);
Subspace point_subspace(Point p, int n);

// <a u b>. Both arguments must share an ambient dimension.
Subspace span_of(const Subspace& a, const Subspace& b);
Subspace adjoin_point(const Subspace& a, Point p);

// Exact intersection, via joint (Zassenhaus) elimination.
Subspace intersect(const Subspace& a, const Subspace& b);

bool contains(const Subspace& a, Point p);
bool contains(const Subspace& a, const Subspace& b);

// Bit p set iff point p lies in the subspace; exactly 2^dim - 1 bits.
PointMask point_set(const Subspace& a);

// Number of k-dimensional subspaces of V(n,2). Throws on k > n.
std::uint64_t gaussian_binomial(int n, int k);

// Coordinates of v (a member of s) with respect to the basis of s, assigned
// so that the row with the smallest leading bit is coordinate 0. For the
// full space this is the identity map.
Row coords_in(const Subspace& s, Row v);
Row vector_from_coords(const Subspace& s, Row u);

// The quotient of `ambient` by the point p on it. Points q of the ambient
// off p fall into two-element cosets {q, q^p}; `rep` picks the canonical
// (smaller-mask) representative, `image` re-coordinatizes into
// V(ambient.dim - 1, 2). Subspaces of the ambient map through `image` as
// well; a k-dimensional subspace through p maps to dimension k-1.
class QuotientMap {
public:
    QuotientMap(const Subspace& ambient, Point p);

    const Subspace& ambient() const { return ambient_; }
    Point p() const { return p_; }
    int local_dim() const { return ambient_.dim - 1; }

    Point rep(Point q) const;
    Point image(Point q) const;
    Subspace image(const Subspace& s) const;

    // Fixed linear section of the quotient map: image(section(x)) == x.
    Row section(Row local) const;
    // <section(s), p> when through_p, else just the section image of s.
    Subspace lift(const Subspace& s_local, bool through_p) const;

private:
    Row image_local(Row u) const;

    Subspace ambient_;
    Point p_;
    Row p_local_ = 0;
    int drop_bit_ = 0;
};

// Throws std::invalid_argument if p is not on the ambient.
QuotientMap quotient(const Subspace& ambient, Point p);

// Textual literals. A subspace is semicolon-separated basis rows as binary
// strings of length n, leftmost character = coordinate 1; the empty string
// is the zero-dimensional subspace. Parsing canonicalizes.
std::string format_row(Row r, int n);
std::string format_subspace(const Subspace& s);
Row parse_row(std::string_view text, int n);
Subspace parse_subspace(std::string_view text, int n);

}  // namespace gfspread
