#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfspread/lattice.hpp"

namespace gfspread {

// A family of t-dimensional subspaces claiming the exact-cover property:
// every s-dimensional subspace of the ambient lies in exactly one member.
struct SpreadCandidate {
    int n = 0;
    int s = 0;
    int t = 0;
    SubspaceId ambient;                // defaults to the full space
    std::vector<SubspaceId> members;   // sorted ascending
};

enum class ViolationKind { uncovered, doubly_covered, wrong_dimension, outside_ambient };
const char* to_string(ViolationKind k);

struct SpreadViolation {
    ViolationKind kind;
    SubspaceId witness;                 // offending s-subspace or member
    std::vector<SubspaceId> members;    // covering members, for doubly_covered
};

SpreadCandidate make_candidate(const Lattice& lat, int s, int t, std::vector<SubspaceId> members);
SpreadCandidate make_candidate_in(const Lattice& lat, int s, int t, SubspaceId ambient,
                                  std::vector<SubspaceId> members);

// nullopt == ok. The first violation in canonical order is reported: member
// shape checks first (in member order), then the coverage scan over the
// s-subspaces of the ambient in id order.
std::optional<SpreadViolation> verify_spread(const Lattice& lat, const SpreadCandidate& c);

// The line spread of the GF(4)-structure on V(n,2), n in {4,6}: coordinate
// pairs (2i, 2i+1) form one GF(4) coordinate with x^2 = x + 1; members are
// the GF(4)-scalar orbits {v, wv, w^2 v}.
SpreadCandidate desarguesian_spread(const Lattice& lat);
Row gf4_scalar_mul(Row v, int n);

// All line spreads of a 4-dimensional ambient, canonically ordered by member
// tuple; each passes verify_spread.
std::vector<SpreadCandidate> enumerate_line_spreads(const Lattice& lat, SubspaceId ambient);

// Ordered tuples (arity 2 or 3) of pairwise member-disjoint spreads, as
// index tuples into `spreads`, ascending lexicographic.
std::vector<std::vector<std::size_t>> disjoint_tuples(std::span<const SpreadCandidate> spreads,
                                                      int arity);

// The unique member of a verified line spread through q.
SubspaceId line_through(const Lattice& lat, Point q, const SpreadCandidate& c);

struct GeometricWitness {
    SubspaceId s1, s2, s3;
};

// nullopt == geometric: every member meeting <S1 u S2> nontrivially lies
// inside it. Otherwise the first violating ordered triple.
std::optional<GeometricWitness> is_geometric(const Lattice& lat, const SpreadCandidate& c);

// Images of members through p in the quotient by p; dimensions drop by one.
// Verifying the result is the caller's step.
SpreadCandidate derived_spread(const Lattice& parent, const Lattice& quot,
                               std::span<const SubspaceId> members_through_p, Point p,
                               int s_in, int t_in);

// The unique common point of five pairwise point-or-less intersecting
// 3-dimensional members of a 5-space, if it exists.
std::optional<Point> alpha_point_of_5space(const Lattice& lat, SubspaceId t5,
                                           std::span<const SubspaceId> members_in_t);

enum class AlphaStatus { yes, no, undetermined };

struct AlphaResult {
    AlphaStatus status;
    std::optional<SubspaceId> witness_t;  // a 5-space violating the property
};

// Is p an alpha-point of the candidate: every 5-space (within `scope` when
// given) containing two members through p must have all five of its members
// pass through p. Relevant 5-spaces holding a number of members other than
// five leave the answer undetermined for partial candidates; a determined
// violation wins over undetermined.
AlphaResult alpha_point_check(const Lattice& lat, Point p, const SpreadCandidate& f,
                              std::optional<SubspaceId> scope = std::nullopt);

// 4-dimensional subspaces of the 5-space containing none of the members.
std::vector<SubspaceId> poor_spaces(const Lattice& lat, SubspaceId t5,
                                    std::span<const SubspaceId> members_in_t);

// Trace lines member ^ w of 3-dimensional members on a 4-space each member
// meets in dimension exactly 2, as a candidate line spread of w.
SpreadCandidate trace_on_hyperplane(const Lattice& lat, std::span<const SubspaceId> members,
                                    SubspaceId w);

// The four-line configuration of two disjoint line spreads of a 4-space:
// l1, l2 from s1 miss one line of s2 and meet l1p, l2p from s2 in the four
// distinct points q, qp, r1, r2; the line through r1, r2 has third point r3.
struct RectangleConfig {
    SubspaceId l1, l2;    // from s1
    SubspaceId l1p, l2p;  // from s2
    Point q, qp, r1, r2, r3;
    SubspaceId line;      // <r1, r2>
};

RectangleConfig rectangle_config(const Lattice& lat, const SpreadCandidate& s1,
                                 const SpreadCandidate& s2);

// Spread literal io: one member subspace literal per line; blank lines and
// lines starting with '#' are skipped.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string to_spread_literal(const Lattice& lat, const SpreadCandidate& c);
SpreadCandidate parse_spread_literal(const Lattice& lat, std::istream& in, int s, int t);

nlohmann::json violation_to_json(const Lattice& lat, const SpreadViolation& v);

}  // namespace gfspread
