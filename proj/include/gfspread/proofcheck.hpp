#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfspread/spreads.hpp"

namespace gfspread {

struct LemmaReport {
    std::string lemma;
    bool pass = false;
    std::uint64_t examined = 0;
    nlohmann::json counts = nlohmann::json::object();
    nlohmann::json witnesses = nlohmann::json::array();
    std::int64_t millis = 0;
};

nlohmann::json lemma_report_to_json(const LemmaReport& r, bool with_timing = true);

struct PipelineConfig {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t max_witnesses = 0;  // 0 = unlimited
};

// The hypothetical-spread parameters, re-derived by exact double counting
// from lattice incidence numbers: 21 members per point, 45 inside a
// hyperplane, 5 per point inside it, 5 inside every 5-space, 381 total.
// Fails loudly on any inexact division.
LemmaReport verify_conditional_counts(const Lattice& lat7);

// Between every 4-space W and 6-space U above it sit exactly three
// 5-spaces, pairwise meeting in W and together covering U.
LemmaReport verify_hyperplane_triple(const Lattice& lat7);

// (a) exhaustively: every plane of a 5-space lies in exactly 3 of its 31
// hyperplanes; (b) sampled five-plane families leave at least 16 of the 31
// hyperplanes empty.
LemmaReport verify_poor_space_lemma(std::uint64_t samples, std::uint64_t seed);

// Five lines through a common point of a 4-space cover 10 < 14 of the
// remaining points; checked by arithmetic and by exhausting all 5-line
// stars at every point.
LemmaReport verify_alpha_not_in_poor();

// Over all ordered disjoint spread pairs of PG(3,2): every line of S2 meets
// exactly three members of S1, and the rectangle configuration exists.
LemmaReport verify_disjoint_pair_lemma(int workers = 1);

// Over all ordered pairwise-disjoint spread triples of PG(3,2): some point Q
// has its S3-line outside the span of its S1- and S2-lines. One canonical
// witness per triple.
LemmaReport verify_triple_contradiction(int workers = 1, std::size_t max_witnesses = 0);

std::vector<LemmaReport> run_theorem2_pipeline(const Lattice& lat7, const PipelineConfig& cfg = {});
bool pipeline_passed(std::span<const LemmaReport> reports);

struct TripleWitness {
    std::size_t s1 = 0, s2 = 0, s3 = 0;  // spread indices in the canonical 56
    Point q;
    SubspaceId lq1, lq2, lq3;
    SubspaceId span_q;  // <L_{Q,1}, L_{Q,2}>, always 3-dimensional
};

// Certificate checking. A certificate result either refutes the candidate's
// spread property or names the promised point (with its witness object).
struct NonAlphaResult {
    std::optional<SpreadViolation> violation;
    std::optional<Point> point;
    std::optional<SubspaceId> witness_t;
};

// Certificate search: a point of the 6-space u that is not an alpha-point
// of f. The spread property is checked first unless `force`; the alpha scan
// is restricted to 5-spaces inside u, which only strengthens a negative
// verdict. Points whose status stays undetermined are skipped.
NonAlphaResult find_non_alpha_point(const Lattice& lat7, SubspaceId u, const SpreadCandidate& f,
                                    bool force = false);

struct ThomasResult {
    std::optional<SpreadViolation> violation;
    std::optional<Point> point;
    std::optional<GeometricWitness> witness;
};

// Certificate search: a point whose derived line spread is not geometric.
// With `force`, the global spread check is skipped and only probe points
// whose derived candidate verifies as a line spread are judged.
ThomasResult thomas_check(const Lattice& lat7, const SpreadCandidate& f, bool force = false,
                          std::span<const Point> probes = {});

}  // namespace gfspread
