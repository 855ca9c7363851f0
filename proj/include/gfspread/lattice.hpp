#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfspread/gf2.hpp"

namespace gfspread {

// Handle into a Lattice table: the rank of a canonical subspace among the
// subspaces of its dimension, in canonical (basis-tuple lexicographic) order.
struct SubspaceId {
    std::uint8_t dim = 0;
    std::uint32_t index = 0;
    friend auto operator<=>(const SubspaceId&, const SubspaceId&) = default;
};

struct CacheError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All subspaces of V(n,2) of every dimension, with dense ids and containment
// queries. Immutable after build/load; safe for concurrent reads.
class Lattice {
public:
    static Lattice build(int n);

    // Binary cache. Layout: magic "GFLT", u32 version, u32 n, u64 counts per
    // dimension, basis-row tables (one byte per row), materialized incidence
    // pairs, u64 FNV-1a checksum trailer. Load rejects bad magic, version,
    // counts or checksum with CacheError.
    static Lattice load(const std::string& path);
    void save(const std::string& path) const;

    int n() const { return n_; }
    std::uint32_t count(int k) const { return static_cast<std::uint32_t>(tables_[checked_dim(k)].size()); }

    const Subspace& subspace(SubspaceId id) const { return tables_[checked_dim(id.dim)][id.index]; }
    const PointMask& points(SubspaceId id) const { return masks_[checked_dim(id.dim)][id.index]; }

    std::optional<SubspaceId> find(const Subspace& s) const;
    SubspaceId id_of(const Subspace& s) const;
    SubspaceId point_id(Point p) const;  // index is p.mask - 1
    SubspaceId full_space_id() const { return SubspaceId{static_cast<std::uint8_t>(n_), 0}; }

    // All k2-dimensional subspaces containing / contained in the given one,
    // ascending by index. Throws std::invalid_argument unless k2 is on the
    // correct side of id.dim.
    std::vector<SubspaceId> superspaces(SubspaceId id, int k2) const;
    std::vector<SubspaceId> subspaces_within(SubspaceId id, int k2) const;

    // Materialized up-incidence row: bit j set iff subspace (k2, j) contains
    // subspace (k, index). Null when the pair is not materialized.
    const Bitset* up_incidence(int k, int k2, std::uint32_t index) const;
    bool pair_materialized(int k, int k2) const { return incidence_.count(pair_key(k, k2)) != 0; }

private:
    int checked_dim(int k) const {
        if (k < 0 || k > n_) throw std::invalid_argument("dimension out of range");
        return k;
    }
    static int pair_key(int k, int k2) { return k * 16 + k2; }
    void materialize_pair(int k, int k2);
    void rebuild_masks();

    int n_ = 0;
    std::vector<std::vector<Subspace>> tables_;
    std::vector<std::vector<PointMask>> masks_;
    std::map<int, std::vector<Bitset>> incidence_;  // key pair_key(k,k2), rows over table k
};

// Process-wide immutable lattices, built on first use.
const Lattice& shared_lattice(int n);

// View of the sublattice under a fixed ambient subspace, re-indexed through
// a local Lattice of the ambient's dimension via a fixed linear isomorphism.
struct RelativeLattice {
    const Lattice* parent = nullptr;
    SubspaceId ambient;
    Lattice local;
    std::vector<std::vector<SubspaceId>> to_parent;  // [k][local index] -> parent id

    SubspaceId parent_of(SubspaceId local_id) const {
        return to_parent[local_id.dim][local_id.index];
    }
    std::optional<SubspaceId> local_of(SubspaceId parent_id) const;
};

RelativeLattice relative_lattice(const Lattice& parent, SubspaceId ambient);

// Enumerates every reduced-echelon basis of a k-dimensional subspace of
// V(n,2), in no particular order; fn receives (rows, k).
void enumerate_rref(int n, int k, const std::function<void(const Row*, int)>& fn);

}  // namespace gfspread
