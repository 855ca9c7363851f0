#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfspread/spreads.hpp"

namespace gfspread {

// The spread condition as exact cover: universe = all s-subspaces,
// candidates = all t-subspaces, a candidate covers the s-subspaces inside it.
struct ExactCoverInstance {
    int n = 0, s = 0, t = 0;
    std::vector<SubspaceId> universe;
    std::vector<SubspaceId> candidates;
    std::vector<Bitset> covers;  // per candidate, over universe positions
};

ExactCoverInstance build_instance(const Lattice& lat, int s, int t);

struct SearchConfig {
    std::uint64_t node_budget = 0;  // 0 = unlimited
    int depth_limit = 0;            // 0 = unlimited
    bool prune_point_degree = true;
    bool prune_hyperplane45 = true;
    bool prune_fivespace5 = true;
    enum class Symmetry { none, fix_first_member };
    Symmetry symmetry = Symmetry::none;
    std::string checkpoint_path;  // written when the budget runs out
    std::string resume_path;      // replayed before searching
    int workers = 1;
    int frontier_depth = 2;       // subtree hand-off depth for workers > 1
    std::uint64_t order_seed = 0; // 0 = canonical candidate order
    std::size_t solution_limit = 0;  // 0 = all
};

struct SearchStats {
    std::uint64_t nodes = 0;
    int max_depth = 0;
    std::map<std::string, std::uint64_t> prunes;
    std::uint64_t solutions = 0;
    std::int64_t millis = 0;
    bool exhausted_budget = false;
    bool completed = false;
    std::vector<std::uint64_t> depth_histogram;  // nodes per depth
};

struct SearchResult {
    std::vector<std::vector<SubspaceId>> solutions;  // canonically sorted
    SearchStats stats;
};

// Algorithm X over dancing links; column choice is minimum remaining
// candidates with ties to the lowest universe id. Every emitted solution is
// re-verified through verify_spread. Deterministic for a fixed config with
// one worker.
SearchResult solve(const Lattice& lat, const ExactCoverInstance& inst, const SearchConfig& cfg);

// The counting caps a full (2,3)-spread of V(7,2) satisfies: at most 21
// members through a point (5 through a point within a fixed hyperplane), 45
// inside a hyperplane and 5 inside a 5-space. On any other instance the
// hooks are the identity. Returns the first violated rule name.
std::optional<std::string> prune_hooks(const Lattice& lat, const ExactCoverInstance& inst,
                                       std::span<const SubspaceId> partial,
                                       const SearchConfig& cfg = {});

// Existence-preserving restriction: the canonically least candidate is
// forced into every solution. Solution counts are not preserved.
ExactCoverInstance symmetry_fix_first(const ExactCoverInstance& inst);

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json stats_to_json(const SearchStats& st, bool with_timing = true);

}  // namespace gfspread
