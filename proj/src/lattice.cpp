#include "gfspread/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>

namespace gfspread {

namespace {

constexpr char kMagic[4] = {'G', 'F', 'L', 'T'};
constexpr std::uint32_t kVersion = 1;

// Incidence pairs kept in memory (and in the cache file). For n <= 6 every
// proper pair is small; for n = 7 only the pairs the proof pipeline and the
// search engine hit repeatedly — the (2,3) table alone dominates memory.
std::vector<std::pair<int, int>> materialized_pairs(int n) {
    std::vector<std::pair<int, int>> out;
    if (n <= 6) {
        for (int k = 1; k < n; ++k)
            for (int k2 = k + 1; k2 < n; ++k2) out.emplace_back(k, k2);
    } else {
        out = {{2, 3}, {3, 5}, {4, 5}, {4, 6}, {5, 6}};
    }
    return out;
}

struct PivotEnum {
    int n, k;
    const std::function<void(const Row*, int)>* fn;
    int pivots[kMaxDim];
    Row rows[kMaxDim];

    // choose pivot bits descending, then fill free bits row by row
    void choose_pivots(int row, int from) {
        if (row == k) {
            fill_rows(0);
            return;
        }
        for (int b = from; b >= k - 1 - row; --b) {
            pivots[row] = b;
            choose_pivots(row + 1, b - 1);
        }
    }

    void fill_rows(int row) {
        if (row == k) {
            (*fn)(rows, k);
            return;
        }
        Row free_mask = (Row{1} << pivots[row]) - 1;
        for (int j = 0; j < k; ++j) free_mask &= ~(Row{1} << pivots[j]);
        Row base = Row{1} << pivots[row];
        Row sub = 0;
        while (true) {
            rows[row] = base | sub;
            fill_rows(row + 1);
            if (sub == free_mask) break;
            sub = (sub - free_mask) & free_mask;  // next subset of free_mask
        }
    }
};

void write_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void write_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw CacheError("lattice cache truncated");
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
};

}  // namespace

void enumerate_rref(int n, int k, const std::function<void(const Row*, int)>& fn) {
    if (k == 0) {
        fn(nullptr, 0);
        return;
    }
    PivotEnum e{n, k, &fn, {}, {}};
    e.choose_pivots(0, n - 1);
}

Lattice Lattice::build(int n) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("lattice: n out of range");
    Lattice lat;
    lat.n_ = n;
    lat.tables_.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        auto& table = lat.tables_[static_cast<std::size_t>(k)];
        table.reserve(gaussian_binomial(n, k));
        enumerate_rref(n, k, [&](const Row* rows, int kk) {
            Subspace s;
            s.ambient_dim = static_cast<std::uint8_t>(n);
            s.dim = static_cast<std::uint8_t>(kk);
            for (int i = 0; i < kk; ++i) s.rows[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rows[i]);
            table.push_back(s);
        });
        std::sort(table.begin(), table.end());
        if (table.size() != gaussian_binomial(n, k))
            throw std::logic_error("lattice enumeration does not match Gaussian binomial");
    }
    lat.rebuild_masks();
    for (auto [k, k2] : materialized_pairs(n)) lat.materialize_pair(k, k2);
    return lat;
}

void Lattice::rebuild_masks() {
    masks_.assign(tables_.size(), {});
    for (std::size_t k = 0; k < tables_.size(); ++k) {
        masks_[k].reserve(tables_[k].size());
        for (const auto& s : tables_[k]) masks_[k].push_back(point_set(s));
    }
}

void Lattice::materialize_pair(int k, int k2) {
    auto& rows = incidence_[pair_key(k, k2)];
    rows.assign(count(k), Bitset(count(k2)));
    const auto& big = tables_[static_cast<std::size_t>(k2)];
    for (std::uint32_t j = 0; j < big.size(); ++j) {
        const Subspace& s = big[j];
        enumerate_rref(k2, k, [&](const Row* local, int kk) {
            Row global[kMaxDim];
            for (int i = 0; i < kk; ++i) global[i] = vector_from_coords(s, local[i]);
            Subspace sub = rref_canonicalize(std::span<const Row>(global, static_cast<std::size_t>(kk)), n_);
            rows[id_of(sub).index].set(j);
        });
    }
}

std::optional<SubspaceId> Lattice::find(const Subspace& s) const {
    if (s.ambient_dim != n_) return std::nullopt;
    const auto& table = tables_[checked_dim(s.dim)];
    auto it = std::lower_bound(table.begin(), table.end(), s);
    if (it == table.end() || !(*it == s)) return std::nullopt;
    return SubspaceId{s.dim, static_cast<std::uint32_t>(it - table.begin())};
}

SubspaceId Lattice::id_of(const Subspace& s) const {
    auto id = find(s);
    if (!id) throw std::logic_error("subspace not present in lattice");
    return *id;
}

SubspaceId Lattice::point_id(Point p) const {
    if (p.mask == 0 || p.mask >= (Row{1} << n_)) throw std::invalid_argument("point outside space");
    return SubspaceId{1, p.mask - 1};
}

std::vector<SubspaceId> Lattice::superspaces(SubspaceId id, int k2) const {
    checked_dim(id.dim);
    if (k2 <= id.dim || k2 > n_) throw std::invalid_argument("superspaces: dimension order violated");
    std::vector<SubspaceId> out;
    if (const Bitset* row = up_incidence(id.dim, k2, id.index)) {
        row->for_each_set([&](std::size_t j) { out.push_back(SubspaceId{static_cast<std::uint8_t>(k2), static_cast<std::uint32_t>(j)}); });
        return out;
    }
    const PointMask& small = points(id);
    const auto& mask_row = masks_[static_cast<std::size_t>(k2)];
    for (std::uint32_t j = 0; j < mask_row.size(); ++j) {
        if (small.subset_of(mask_row[j])) out.push_back(SubspaceId{static_cast<std::uint8_t>(k2), j});
    }
    return out;
}

std::vector<SubspaceId> Lattice::subspaces_within(SubspaceId id, int k2) const {
    checked_dim(id.dim);
    if (k2 < 0 || k2 >= id.dim) throw std::invalid_argument("subspaces_within: dimension order violated");
    const Subspace& s = subspace(id);
    std::vector<SubspaceId> out;
    out.reserve(gaussian_binomial(id.dim, k2));
    enumerate_rref(id.dim, k2, [&](const Row* local, int kk) {
        Row global[kMaxDim];
        for (int i = 0; i < kk; ++i) global[i] = vector_from_coords(s, local[i]);
        out.push_back(id_of(rref_canonicalize(std::span<const Row>(global, static_cast<std::size_t>(kk)), n_)));
    });
    std::sort(out.begin(), out.end());
    return out;
}

const Bitset* Lattice::up_incidence(int k, int k2, std::uint32_t index) const {
    auto it = incidence_.find(pair_key(k, k2));
    if (it == incidence_.end()) return nullptr;
    return &it->second[index];
}

void Lattice::save(const std::string& path) const {
    std::string buf;
    buf.append(kMagic, 4);
    write_u32(buf, kVersion);
    write_u32(buf, static_cast<std::uint32_t>(n_));
    for (int k = 0; k <= n_; ++k) write_u64(buf, count(k));
    for (int k = 0; k <= n_; ++k) {
        for (const auto& s : tables_[static_cast<std::size_t>(k)])
            for (int i = 0; i < s.dim; ++i) buf.push_back(static_cast<char>(s.rows[static_cast<std::size_t>(i)]));
    }
    write_u32(buf, static_cast<std::uint32_t>(incidence_.size()));
    for (const auto& [key, rows] : incidence_) {
        buf.push_back(static_cast<char>(key / 16));
        buf.push_back(static_cast<char>(key % 16));
        for (const auto& row : rows)
            for (std::uint64_t w : row.words()) write_u64(buf, w);
    }
    Fnv1a64 sum;
    sum.update(buf.data(), buf.size());
    write_u64(buf, sum.digest());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot open lattice cache for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw CacheError("short write to lattice cache: " + path);
}

Lattice Lattice::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cannot open lattice cache: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 16) throw CacheError("lattice cache truncated");

    Fnv1a64 sum;
    sum.update(buf.data(), buf.size() - 8);
    Reader tail{buf, buf.size() - 8};
    if (sum.digest() != tail.u64()) throw CacheError("lattice cache checksum mismatch");

    Reader r{buf};
    if (std::memcmp(buf.data(), kMagic, 4) != 0) throw CacheError("lattice cache bad magic");
    r.pos = 4;
    if (r.u32() != kVersion) throw CacheError("lattice cache version mismatch");
    int n = static_cast<int>(r.u32());
    if (n < 1 || n > kMaxDim) throw CacheError("lattice cache bad dimension");

    Lattice lat;
    lat.n_ = n;
    lat.tables_.resize(static_cast<std::size_t>(n) + 1);
    std::vector<std::uint64_t> counts;
    for (int k = 0; k <= n; ++k) {
        counts.push_back(r.u64());
        if (counts.back() != gaussian_binomial(n, k)) throw CacheError("lattice cache count mismatch");
    }
    for (int k = 0; k <= n; ++k) {
        auto& table = lat.tables_[static_cast<std::size_t>(k)];
        table.resize(counts[static_cast<std::size_t>(k)]);
        for (auto& s : table) {
            s.ambient_dim = static_cast<std::uint8_t>(n);
            s.dim = static_cast<std::uint8_t>(k);
            for (int i = 0; i < k; ++i) s.rows[static_cast<std::size_t>(i)] = r.u8();
        }
        if (!std::is_sorted(table.begin(), table.end())) throw CacheError("lattice cache table out of order");
    }
    lat.rebuild_masks();
    std::uint32_t npairs = r.u32();
    for (std::uint32_t i = 0; i < npairs; ++i) {
        int k = r.u8(), k2 = r.u8();
        if (k < 0 || k2 <= k || k2 > n) throw CacheError("lattice cache bad incidence pair");
        auto& rows = lat.incidence_[pair_key(k, k2)];
        rows.assign(lat.count(k), Bitset(lat.count(k2)));
        for (auto& row : rows)
            for (auto& w : row.words()) w = r.u64();
    }
    if (r.pos != buf.size() - 8) throw CacheError("lattice cache trailing bytes");
    return lat;
}

const Lattice& shared_lattice(int n) {
    static std::mutex mu;
    static std::map<int, Lattice> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, Lattice::build(n)).first;
    return it->second;
}

std::optional<SubspaceId> RelativeLattice::local_of(SubspaceId parent_id) const {
    if (parent_id.dim >= to_parent.size()) return std::nullopt;
    const auto& row = to_parent[parent_id.dim];
    for (std::uint32_t i = 0; i < row.size(); ++i)
        if (row[i] == parent_id) return SubspaceId{parent_id.dim, i};
    return std::nullopt;
}

RelativeLattice relative_lattice(const Lattice& parent, SubspaceId ambient) {
    RelativeLattice rel;
    rel.parent = &parent;
    rel.ambient = ambient;
    const Subspace& amb = parent.subspace(ambient);
    const int d = amb.dim;
    if (d < 1) throw std::invalid_argument("relative_lattice: zero-dimensional ambient");
    rel.local = Lattice::build(d);
    rel.to_parent.resize(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
        auto& row = rel.to_parent[static_cast<std::size_t>(k)];
        row.resize(rel.local.count(k));
        for (std::uint32_t i = 0; i < row.size(); ++i) {
            const Subspace& loc = rel.local.subspace(SubspaceId{static_cast<std::uint8_t>(k), i});
            Row global[kMaxDim];
            for (int j = 0; j < loc.dim; ++j) global[j] = vector_from_coords(amb, loc.row(j));
            row[i] = parent.id_of(rref_canonicalize(std::span<const Row>(global, static_cast<std::size_t>(loc.dim)), parent.n()));
        }
    }
    return rel;
}

}  // namespace gfspread
