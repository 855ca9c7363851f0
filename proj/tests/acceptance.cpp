// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfspread/proofcheck.hpp"
#include "gfspread/search.hpp"
#include "oracle.hpp"
#include "proc.hpp"

using namespace gfspread;
using nlohmann::json;

namespace {

const std::string cli = GFSPREAD_CLI_PATH;
const std::string data_dir = GFSPREAD_DATA_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Harness {
    int failures = 0;
    int index = 0;

    void run(const std::string& name, const std::function<void()>& body) {
        ++index;
        try {
            body();
            std::printf("[%2d] PASS  %s\n", index, name.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[%2d] FAIL  %s: %s\n", index, name.c_str(), e.what());
        }
        std::fflush(stdout);
    }
};

void expect(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
}

json golden_counts() {
    std::ifstream in(data_dir + "/golden_counts.json");
    expect(in.good(), "cannot open golden_counts.json");
    return json::parse(in);
}

SpreadCandidate load_spread(const Lattice& lat, const std::string& file, int s, int t) {
    std::ifstream in(data_dir + "/" + file);
    expect(in.good(), "cannot open " + file);
    return parse_spread_literal(lat, in, s, t);
}

}  // namespace

int main() {
    Harness h;

    h.run("lattice counts match Gaussian binomials, build under 30 s", [] {
        auto t0 = Clock::now();
        Lattice lat7 = Lattice::build(7);
        double secs = seconds_since(t0);
        expect(secs < 30.0, "build took " + std::to_string(secs) + " s");
        for (int n = 1; n <= 7; ++n) {
            const Lattice& lat = n == 7 ? lat7 : shared_lattice(n);
            for (int k = 0; k <= n; ++k)
                expect(lat.count(k) == gaussian_binomial(n, k),
                       "count mismatch at n=" + std::to_string(n) + " k=" + std::to_string(k));
        }
        expect(lat7.count(2) == 2667, "V(7,2) line count");
        expect(lat7.count(3) == 11811, "V(7,2) 3-space count");
    });

    h.run("the 56 line spreads of PG(3,2) match the naive oracle under 5 s", [] {
        const Lattice& lat = shared_lattice(4);
        auto spreads = enumerate_line_spreads(lat, lat.full_space_id());
        expect(spreads.size() == 56, "expected 56 spreads");
        for (const auto& s : spreads) {
            expect(!verify_spread(lat, s), "a spread failed verification");
            PointMask acc;
            for (SubspaceId m : s.members) {
                expect(!acc.intersects(lat.points(m)), "members overlap");
                acc = acc | lat.points(m);
            }
            expect(acc.count() == 15, "not a partition of the 15 points");
        }
        auto t0 = Clock::now();
        auto oracle_spreads = oracle::pg32_spreads();
        double secs = seconds_since(t0);
        expect(secs < 5.0, "oracle took " + std::to_string(secs) + " s");
        expect(oracle_spreads.size() == 56, "oracle disagrees on the count");
        const auto lines = oracle::pg32_lines();
        std::set<std::set<std::array<unsigned, 3>>> oracle_set, ours;
        for (const auto& s : oracle_spreads) {
            std::set<std::array<unsigned, 3>> t;
            for (std::size_t li : s) t.insert(lines[li]);
            oracle_set.insert(t);
        }
        for (const auto& s : spreads) {
            std::set<std::array<unsigned, 3>> t;
            for (SubspaceId m : s.members) {
                std::array<unsigned, 3> pts{};
                std::size_t i = 0;
                const PointMask& pm = lat.points(m);
                for (unsigned p = pm.first(); p; p = pm.next_after(p)) pts[i++] = p;
                t.insert(pts);
            }
            ours.insert(t);
        }
        expect(ours == oracle_set, "spread sets differ from the oracle");
    });

    h.run("conditional counting facts: 21 / 5 / 45 / 5 / 381, all exact", [] {
        LemmaReport r = verify_conditional_counts(shared_lattice(7));
        expect(r.pass, "lemma failed");
        expect(r.counts["membersPerPoint"] == 21, "membersPerPoint");
        expect(r.counts["membersPerPointInsideU"] == 5, "membersPerPointInsideU");
        expect(r.counts["membersInsideU"] == 45, "membersInsideU");
        expect(r.counts["membersPerFiveSpace"] == 5, "membersPerFiveSpace");
        expect(r.counts["totalMembers"] == 381, "totalMembers");
        for (const auto& eq : r.counts["equations"])
            expect(eq["exact"] == true, "inexact division in " + eq["equation"].get<std::string>());
    });

    h.run("poor-space lemma: incidence 3 exhaustive; 1e5 samples >= 16 with equality, under 60 s", [] {
        auto t0 = Clock::now();
        LemmaReport r = verify_poor_space_lemma(100000, 1);
        double secs = seconds_since(t0);
        expect(secs < 60.0, "took " + std::to_string(secs) + " s");
        expect(r.pass, "lemma failed");
        expect(r.counts["hyperplanesPerPlane"] == 3, "incidence count");
        expect(r.counts["minPoor"] == 16, "minimum poor count with equality");
        expect(r.counts["equalityCases"].get<std::uint64_t>() >= 1, "no equality case observed");
    });

    h.run("alpha exclusion: exhaustive 5-line star coverage is 10 < 14", [] {
        LemmaReport r = verify_alpha_not_in_poor();
        expect(r.pass, "lemma failed");
        expect(r.counts["maxObservedCover"] == 10, "max coverage");
        expect(r.counts["pointsToCover"] == 14, "points to cover");
    });

    h.run("disjoint-pair lemma over all ordered pairs with rectangles, under 60 s", [] {
        auto t0 = Clock::now();
        LemmaReport r = verify_disjoint_pair_lemma(1);
        double secs = seconds_since(t0);
        expect(secs < 60.0, "took " + std::to_string(secs) + " s");
        expect(r.pass, "lemma failed");
        expect(r.examined == golden_counts()["orderedDisjointPairs"].get<std::uint64_t>(),
               "pair count drifted from the golden value");
    });

    h.run("triple contradiction over all ordered disjoint triples, under 300 s", [] {
        auto t0 = Clock::now();
        LemmaReport r = verify_triple_contradiction(1);
        double secs = seconds_since(t0);
        expect(secs < 300.0, "took " + std::to_string(secs) + " s");
        expect(r.pass, "lemma failed");
        std::uint64_t golden = golden_counts()["orderedDisjointTriples"].get<std::uint64_t>();
        expect(r.examined == golden, "triple count drifted from the golden value");
        expect(r.counts["triplesWithWitness"].get<std::uint64_t>() == golden,
               "a triple without witness");
    });

    h.run("geometric predicate: Desarguesian passes, frozen exemplar fails with witness", [] {
        const Lattice& lat6 = shared_lattice(6);
        SpreadCandidate good = load_spread(lat6, "desarguesian_v6.spread", 1, 2);
        expect(!verify_spread(lat6, good), "golden Desarguesian does not verify");
        expect(good.members.size() == 21, "golden Desarguesian size");
        expect(!is_geometric(lat6, good), "Desarguesian flagged non-geometric");
        SpreadCandidate cons = desarguesian_spread(lat6);
        expect(cons.members == good.members, "constructed spread drifted from the golden file");

        SpreadCandidate bad = load_spread(lat6, "nongeometric_v6.spread", 1, 2);
        expect(!verify_spread(lat6, bad), "exemplar does not verify as a spread");
        auto w = is_geometric(lat6, bad);
        expect(w.has_value(), "exemplar passed the geometric predicate");
        // the returned triple re-validates and matches the frozen witness
        Subspace sp = span_of(lat6.subspace(w->s1), lat6.subspace(w->s2));
        expect(point_set(sp).intersects(lat6.points(w->s3)), "witness: no intersection");
        expect(!lat6.points(w->s3).subset_of(point_set(sp)), "witness: containment holds");
        std::ifstream in(data_dir + "/nongeometric_v6_witness.json");
        json frozen = json::parse(in);
        expect(frozen["s1"] == format_subspace(lat6.subspace(w->s1)), "witness s1 drifted");
        expect(frozen["s2"] == format_subspace(lat6.subspace(w->s2)), "witness s2 drifted");
        expect(frozen["s3"] == format_subspace(lat6.subspace(w->s3)), "witness s3 drifted");
    });

    h.run("exact-cover engine: oracle match, fast (6,1,3), prune-invariance, reproducible", [] {
        const Lattice& lat4 = shared_lattice(4);
        ExactCoverInstance i4 = build_instance(lat4, 1, 2);
        SearchResult r4 = solve(lat4, i4, SearchConfig{});
        expect(r4.solutions.size() == 56, "(4,1,2) solution count");
        std::vector<std::uint32_t> sets;
        for (const auto& cov : i4.covers) {
            std::uint32_t m = 0;
            cov.for_each_set([&](std::size_t e) { m |= 1u << e; });
            sets.push_back(m);
        }
        auto naive = oracle::exact_cover(0x7FFF, sets);
        expect(naive.size() == 56, "oracle count");
        std::set<std::vector<std::uint32_t>> a, b;
        for (const auto& sol : naive) a.insert({sol.begin(), sol.end()});
        for (const auto& sol : r4.solutions) {
            std::vector<std::uint32_t> v;
            for (SubspaceId id : sol) v.push_back(id.index);
            b.insert(v);
        }
        expect(a == b, "solution sets differ from the oracle");

        const Lattice& lat6 = shared_lattice(6);
        ExactCoverInstance i6 = build_instance(lat6, 1, 3);
        SearchConfig one;
        one.solution_limit = 1;
        auto t0 = Clock::now();
        SearchResult r6 = solve(lat6, i6, one);
        double secs = seconds_since(t0);
        expect(secs < 1.0, "(6,1,3) took " + std::to_string(secs) + " s");
        expect(r6.solutions.size() == 1 && r6.solutions[0].size() == 9, "(6,1,3) solution shape");

        SearchConfig off;
        off.prune_point_degree = off.prune_hyperplane45 = off.prune_fivespace5 = false;
        expect(solve(lat4, i4, off).solutions == r4.solutions, "(4,1,2) pruning changed solutions");
        SearchConfig off6 = off;
        off6.solution_limit = 1;
        expect(solve(lat6, i6, off6).solutions == r6.solutions, "(6,1,3) pruning changed solutions");

        auto cli_a = proc::run(cli + " search 4 1 2 --json --no-timing");
        auto cli_b = proc::run(cli + " search 4 1 2 --json --no-timing");
        expect(cli_a.exit_code == 0 && cli_a.out == cli_b.out,
               "single-worker runs are not byte-identical");
    });

    h.run("certificates: mutations rejected with correct kinds, planted witnesses found", [] {
        const Lattice& lat4 = shared_lattice(4);
        auto spreads = enumerate_line_spreads(lat4, lat4.full_space_id());
        for (const auto& s : spreads) {
            for (std::size_t drop = 0; drop < s.members.size(); ++drop) {
                SpreadCandidate broken = s;
                broken.members.erase(broken.members.begin() + static_cast<std::ptrdiff_t>(drop));
                auto v = verify_spread(lat4, broken);
                expect(v && v->kind == ViolationKind::uncovered, "(4,1,2) removal missed");
            }
            for (std::size_t at = 0; at < s.members.size(); ++at)
                for (std::uint32_t li = 0; li < lat4.count(2); ++li) {
                    SubspaceId repl{2, li};
                    if (std::binary_search(s.members.begin(), s.members.end(), repl)) continue;
                    SpreadCandidate broken = s;
                    broken.members[at] = repl;
                    std::sort(broken.members.begin(), broken.members.end());
                    auto v = verify_spread(lat4, broken);
                    expect(v.has_value(), "(4,1,2) replacement missed");
                    expect(v->kind == ViolationKind::uncovered ||
                               v->kind == ViolationKind::doubly_covered,
                           "(4,1,2) replacement kind");
                }
        }

        // one verified (6,1,3) spread, all its single-member mutations
        const Lattice& lat6 = shared_lattice(6);
        ExactCoverInstance i6 = build_instance(lat6, 1, 3);
        SearchConfig one;
        one.solution_limit = 1;
        SpreadCandidate s6{6, 1, 3, lat6.full_space_id(), solve(lat6, i6, one).solutions[0]};
        for (std::size_t drop = 0; drop < 9; ++drop) {
            SpreadCandidate broken = s6;
            broken.members.erase(broken.members.begin() + static_cast<std::ptrdiff_t>(drop));
            auto v = verify_spread(lat6, broken);
            expect(v && v->kind == ViolationKind::uncovered, "(6,1,3) removal missed");
        }
        for (std::uint32_t li = 0; li < lat6.count(3); ++li) {
            SubspaceId repl{3, li};
            if (std::binary_search(s6.members.begin(), s6.members.end(), repl)) continue;
            SpreadCandidate broken = s6;
            broken.members[4] = repl;
            std::sort(broken.members.begin(), broken.members.end());
            expect(verify_spread(lat6, broken).has_value(), "(6,1,3) replacement missed");
        }

        // (7,2,3) near-candidates are rejected by both checkers
        const Lattice& lat7 = shared_lattice(7);
        std::vector<SpreadCandidate> nears;
        {
            std::vector<SubspaceId> first;
            for (std::uint32_t i = 0; i < 381; ++i) first.push_back(SubspaceId{3, i});
            nears.push_back(make_candidate(lat7, 2, 3, std::move(first)));
        }
        {
            // greedy pairwise line-disjoint packing, padded back to 381
            std::vector<SubspaceId> greedy;
            Bitset used(lat7.count(2));
            for (std::uint32_t i = 0; i < lat7.count(3) && greedy.size() < 381; ++i) {
                auto lines = lat7.subspaces_within(SubspaceId{3, i}, 2);
                bool clash = false;
                for (SubspaceId l : lines)
                    if (used.test(l.index)) clash = true;
                if (clash) continue;
                for (SubspaceId l : lines) used.set(l.index);
                greedy.push_back(SubspaceId{3, i});
            }
            for (std::uint32_t i = 0; greedy.size() < 381; ++i) {
                SubspaceId id{3, lat7.count(3) - 1 - i};
                if (!std::binary_search(greedy.begin(), greedy.end(), id)) greedy.push_back(id);
            }
            nears.push_back(make_candidate(lat7, 2, 3, std::move(greedy)));
        }
        {
            QuotientMap q(full_space(7), Point{1});
            std::vector<SubspaceId> lift;
            for (SubspaceId m : desarguesian_spread(lat6).members)
                lift.push_back(lat7.id_of(q.lift(lat6.subspace(m), true)));
            for (std::uint32_t i = 0; lift.size() < 381; ++i) {
                SubspaceId id{3, i};
                if (!std::binary_search(lift.begin(), lift.end(), id)) lift.push_back(id);
                std::sort(lift.begin(), lift.end());
            }
            nears.push_back(make_candidate(lat7, 2, 3, std::move(lift)));
        }
        for (const auto& near : nears) {
            expect(find_non_alpha_point(lat7, SubspaceId{6, 0}, near).violation.has_value(),
                   "find_non_alpha_point accepted a near-candidate");
            expect(thomas_check(lat7, near).violation.has_value(),
                   "thomas_check accepted a near-candidate");
        }

        // planted non-alpha configuration: the exact point comes back
        {
            const SubspaceId u{6, 0};
            const Point p{lat7.points(u).first()};
            SubspaceId t5{0, 0}, w4{0, 0};
            for (SubspaceId t : lat7.subspaces_within(u, 5))
                if (lat7.points(t).test(p.mask)) {
                    t5 = t;
                    break;
                }
            for (SubspaceId w : lat7.subspaces_within(t5, 4))
                if (!lat7.points(w).test(p.mask)) {
                    w4 = w;
                    break;
                }
            auto spreads_w = enumerate_line_spreads(lat7, w4);
            std::vector<SubspaceId> star;
            for (SubspaceId m : spreads_w.front().members)
                star.push_back(lat7.id_of(adjoin_point(lat7.subspace(m), p)));
            std::vector<SubspaceId> mixed(star.begin(), star.end() - 1);
            RelativeLattice rel = relative_lattice(lat7, t5);
            for (std::uint32_t i = 0; i < rel.local.count(3); ++i) {
                SubspaceId cand = rel.to_parent[3][i];
                if (!lat7.points(cand).test(p.mask)) {
                    mixed.push_back(cand);
                    break;
                }
            }
            NonAlphaResult r = find_non_alpha_point(lat7, u, make_candidate(lat7, 2, 3, mixed), true);
            expect(r.point && r.point->mask == p.mask, "planted non-alpha point not returned");
            expect(r.witness_t && *r.witness_t == t5, "planted witness 5-space not returned");
        }

        // planted non-geometric star: thomas_check names the point and triple
        {
            SpreadCandidate bad6 = load_spread(lat6, "nongeometric_v6.spread", 1, 2);
            const Point p{1};
            QuotientMap q(full_space(7), p);
            std::vector<SubspaceId> star;
            for (SubspaceId m : bad6.members)
                star.push_back(lat7.id_of(q.lift(lat6.subspace(m), true)));
            std::vector<Point> probe{p};
            ThomasResult r = thomas_check(lat7, make_candidate(lat7, 2, 3, star), true, probe);
            expect(r.point && r.point->mask == p.mask, "planted thomas point not returned");
            expect(r.witness.has_value(), "planted thomas witness missing");
            Subspace sp = span_of(lat6.subspace(r.witness->s1), lat6.subspace(r.witness->s2));
            expect(point_set(sp).intersects(lat6.points(r.witness->s3)) &&
                       !lat6.points(r.witness->s3).subset_of(point_set(sp)),
                   "thomas witness does not re-validate");
        }
    });

    h.run("bounded open-instance run: search 7 2 3 --nodes 1e6, deterministic, no solutions", [] {
        auto a = proc::run(cli + " search 7 2 3 --nodes 1e6 --json --no-timing");
        expect(a.exit_code == 0, "exit code " + std::to_string(a.exit_code));
        json rep = json::parse(a.out);
        expect(rep["result"]["exhausted"] == true, "budget not reported as exhausted");
        expect(rep["result"]["stats"]["nodes"] == 1000000, "node count");
        expect(rep["result"]["solutions"].empty(), "unexpected solutions");
        auto b = proc::run(cli + " search 7 2 3 --nodes 1e6 --json --no-timing");
        expect(a.out == b.out, "two runs differ byte for byte");
    });

    std::printf("%s: %d criterion(s) failed\n", h.failures ? "FAIL" : "OK", h.failures);
    return h.failures ? 1 : 0;
}
