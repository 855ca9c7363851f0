#include "gfspread/spreads.hpp"

#include <algorithm>
#include <istream>
#include <set>

namespace gfspread {

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::uncovered: return "uncovered";
        case ViolationKind::doubly_covered: return "doubly-covered";
        case ViolationKind::wrong_dimension: return "wrong-dimension";
        case ViolationKind::outside_ambient: return "outside-ambient";
    }
    return "?";
}

SpreadCandidate make_candidate(const Lattice& lat, int s, int t, std::vector<SubspaceId> members) {
    return make_candidate_in(lat, s, t, lat.full_space_id(), std::move(members));
}

SpreadCandidate make_candidate_in(const Lattice& lat, int s, int t, SubspaceId ambient,
                                  std::vector<SubspaceId> members) {
    std::sort(members.begin(), members.end());
    return SpreadCandidate{lat.n(), s, t, ambient, std::move(members)};
}

std::optional<SpreadViolation> verify_spread(const Lattice& lat, const SpreadCandidate& c) {
    const PointMask ambient_points = lat.points(c.ambient);
    for (const SubspaceId& m : c.members) {
        if (m.dim != c.t) return SpreadViolation{ViolationKind::wrong_dimension, m, {}};
        if (!lat.points(m).subset_of(ambient_points))
            return SpreadViolation{ViolationKind::outside_ambient, m, {}};
    }

    std::vector<SubspaceId> universe;
    const bool full = c.ambient == lat.full_space_id();
    if (!full) universe = lat.subspaces_within(c.ambient, c.s);

    std::vector<std::uint8_t> covered(lat.count(c.s), 0);
    for (const SubspaceId& m : c.members) {
        for (SubspaceId sub : lat.subspaces_within(m, c.s)) {
            if (covered[sub.index] < 2) ++covered[sub.index];
        }
    }

    auto check = [&](SubspaceId sub) -> std::optional<SpreadViolation> {
        if (covered[sub.index] == 1) return std::nullopt;
        if (covered[sub.index] == 0) return SpreadViolation{ViolationKind::uncovered, sub, {}};
        std::vector<SubspaceId> owners;
        const PointMask& sp = lat.points(sub);
        for (const SubspaceId& m : c.members)
            if (sp.subset_of(lat.points(m))) owners.push_back(m);
        return SpreadViolation{ViolationKind::doubly_covered, sub, std::move(owners)};
    };

    if (full) {
        for (std::uint32_t i = 0; i < lat.count(c.s); ++i) {
            if (auto v = check(SubspaceId{static_cast<std::uint8_t>(c.s), i})) return v;
        }
    } else {
        for (SubspaceId sub : universe) {
            if (auto v = check(sub)) return v;
        }
    }
    return std::nullopt;
}

Row gf4_scalar_mul(Row v, int n) {
    // omega * (a + b*omega) = b + (a+b)*omega per coordinate pair
    Row a = 0, b = 0;
    for (int i = 0; 2 * i < n; ++i) {
        a |= ((v >> (2 * i)) & 1) << i;
        b |= ((v >> (2 * i + 1)) & 1) << i;
    }
    Row na = b, nb = a ^ b;
    Row out = 0;
    for (int i = 0; 2 * i < n; ++i) {
        out |= ((na >> i) & 1) << (2 * i);
        out |= ((nb >> i) & 1) << (2 * i + 1);
    }
    return out;
}

SpreadCandidate desarguesian_spread(const Lattice& lat) {
    const int n = lat.n();
    if (n != 4 && n != 6) throw std::invalid_argument("desarguesian_spread: n must be 4 or 6");
    std::vector<SubspaceId> members;
    for (Row v = 1; v < (Row{1} << n); ++v) {
        Row wv = gf4_scalar_mul(v, n);
        Row w2v = gf4_scalar_mul(wv, n);
        if (v < wv && v < w2v) {
            Row rows[2] = {v, wv};
            members.push_back(lat.id_of(rref_canonicalize(rows, n)));
        }
    }
    return make_candidate(lat, 1, 2, std::move(members));
}

namespace {

void spread_backtrack(const Lattice& lat, const std::vector<SubspaceId>& lines,
                      const std::vector<PointMask>& line_pts, const PointMask& goal,
                      PointMask covered, std::vector<std::size_t>& chosen,
                      std::vector<std::vector<std::size_t>>& out) {
    if (covered == goal) {
        out.push_back(chosen);
        return;
    }
    // lowest uncovered point of the ambient
    PointMask rem = goal;
    rem.lo &= ~covered.lo;
    rem.hi &= ~covered.hi;
    unsigned p = rem.first();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!line_pts[i].test(p)) continue;
        if (line_pts[i].intersects(covered)) continue;
        chosen.push_back(i);
        spread_backtrack(lat, lines, line_pts, goal, covered | line_pts[i], chosen, out);
        chosen.pop_back();
    }
}

}  // namespace

std::vector<SpreadCandidate> enumerate_line_spreads(const Lattice& lat, SubspaceId ambient) {
    if (ambient.dim != 4) throw std::invalid_argument("enumerate_line_spreads: ambient must be 4-dimensional");
    std::vector<SubspaceId> lines = (ambient == lat.full_space_id())
                                        ? [&] {
                                              std::vector<SubspaceId> all;
                                              for (std::uint32_t i = 0; i < lat.count(2); ++i)
                                                  all.push_back(SubspaceId{2, i});
                                              return all;
                                          }()
                                        : lat.subspaces_within(ambient, 2);
    std::vector<PointMask> line_pts;
    line_pts.reserve(lines.size());
    for (SubspaceId l : lines) line_pts.push_back(lat.points(l));

    std::vector<std::vector<std::size_t>> found;
    std::vector<std::size_t> chosen;
    spread_backtrack(lat, lines, line_pts, lat.points(ambient), PointMask{}, chosen, found);

    std::vector<SpreadCandidate> out;
    out.reserve(found.size());
    for (auto& f : found) {
        std::vector<SubspaceId> members;
        members.reserve(f.size());
        for (std::size_t i : f) members.push_back(lines[i]);
        out.push_back(make_candidate_in(lat, 1, 2, ambient, std::move(members)));
    }
    std::sort(out.begin(), out.end(),
              [](const SpreadCandidate& a, const SpreadCandidate& b) { return a.members < b.members; });
    return out;
}

std::vector<std::vector<std::size_t>> disjoint_tuples(std::span<const SpreadCandidate> spreads,
                                                      int arity) {
    if (arity != 2 && arity != 3) throw std::invalid_argument("disjoint_tuples: arity must be 2 or 3");
    for (const auto& s : spreads)
        if (!(s.ambient == spreads[0].ambient))
            throw std::invalid_argument("disjoint_tuples: mixed ambients");

    const std::size_t m = spreads.size();
    auto disjoint = [&](std::size_t i, std::size_t j) {
        const auto& a = spreads[i].members;
        const auto& b = spreads[j].members;
        std::size_t x = 0, y = 0;
        while (x < a.size() && y < b.size()) {
            if (a[x] == b[y]) return false;
            if (a[x] < b[y]) ++x;
            else ++y;
        }
        return true;
    };

    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j || !disjoint(i, j)) continue;
            if (arity == 2) {
                out.push_back({i, j});
                continue;
            }
            for (std::size_t k = 0; k < m; ++k)
                if (k != i && k != j && disjoint(i, k) && disjoint(j, k)) out.push_back({i, j, k});
        }
    return out;
}

SubspaceId line_through(const Lattice& lat, Point q, const SpreadCandidate& c) {
    if (!lat.points(c.ambient).test(q.mask))
        throw std::invalid_argument("line_through: point outside ambient");
    std::optional<SubspaceId> hit;
    for (const SubspaceId& m : c.members) {
        if (lat.points(m).test(q.mask)) {
            if (hit) throw std::invalid_argument("line_through: candidate is not a partition");
            hit = m;
        }
    }
    if (!hit) throw std::invalid_argument("line_through: candidate is not a partition");
    return *hit;
}

std::optional<GeometricWitness> is_geometric(const Lattice& lat, const SpreadCandidate& c) {
    if (c.s != 1) throw std::invalid_argument("is_geometric: defined for 1-spreads");
    const auto& mem = c.members;
    const std::size_t m = mem.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const Subspace sp = span_of(lat.subspace(mem[i]), lat.subspace(mem[j]));
            const PointMask span_pts = point_set(sp);
            for (std::size_t k = 0; k < m; ++k) {
                if (k == i || k == j) continue;
                const PointMask& third = lat.points(mem[k]);
                if (third.intersects(span_pts) && !third.subset_of(span_pts))
                    return GeometricWitness{mem[i], mem[j], mem[k]};
            }
        }
    }
    return std::nullopt;
}

SpreadCandidate derived_spread(const Lattice& parent, const Lattice& quot,
                               std::span<const SubspaceId> members_through_p, Point p,
                               int s_in, int t_in) {
    if (quot.n() != parent.n() - 1)
        throw std::invalid_argument("derived_spread: quotient lattice has wrong dimension");
    QuotientMap q = quotient(full_space(parent.n()), p);
    std::vector<SubspaceId> images;
    images.reserve(members_through_p.size());
    for (SubspaceId m : members_through_p) {
        if (m.dim != t_in) throw std::invalid_argument("derived_spread: member of wrong dimension");
        if (!parent.points(m).test(p.mask))
            throw std::invalid_argument("derived_spread: member does not contain the point");
        images.push_back(quot.id_of(q.image(parent.subspace(m))));
    }
    return make_candidate(quot, s_in - 1, t_in - 1, std::move(images));
}

std::optional<Point> alpha_point_of_5space(const Lattice& lat, SubspaceId t5,
                                           std::span<const SubspaceId> members_in_t) {
    if (t5.dim != 5) throw std::invalid_argument("alpha_point_of_5space: T must be 5-dimensional");
    if (members_in_t.size() != 5)
        throw std::invalid_argument("alpha_point_of_5space: exactly five members required");
    const PointMask tp = lat.points(t5);
    for (SubspaceId m : members_in_t) {
        if (m.dim != 3 || !lat.points(m).subset_of(tp))
            throw std::invalid_argument("alpha_point_of_5space: member outside T");
    }
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j)
            if ((lat.points(members_in_t[i]) & lat.points(members_in_t[j])).count() > 1)
                throw std::invalid_argument("alpha_point_of_5space: members share a line");
    PointMask common = lat.points(members_in_t[0]);
    for (std::size_t i = 1; i < 5; ++i) common = common & lat.points(members_in_t[i]);
    if (common.empty()) return std::nullopt;
    return Point{common.first()};
}

AlphaResult alpha_point_check(const Lattice& lat, Point p, const SpreadCandidate& f,
                              std::optional<SubspaceId> scope) {
    const SubspaceId amb = scope ? *scope : f.ambient;
    const PointMask scope_pts = lat.points(amb);
    if (!scope_pts.test(p.mask)) throw std::invalid_argument("alpha_point_check: point outside ambient");

    std::vector<SubspaceId> through_p;
    for (const SubspaceId& m : f.members)
        if (lat.points(m).test(p.mask)) through_p.push_back(m);

    // 5-spaces within scope containing two members through p
    std::set<SubspaceId> relevant;
    for (std::size_t i = 0; i < through_p.size(); ++i) {
        for (std::size_t j = i + 1; j < through_p.size(); ++j) {
            Subspace sp = span_of(lat.subspace(through_p[i]), lat.subspace(through_p[j]));
            if (sp.dim > 5) continue;
            if (sp.dim == 5) {
                if (point_set(sp).subset_of(scope_pts)) relevant.insert(lat.id_of(sp));
                continue;
            }
            for (SubspaceId t5 : lat.superspaces(lat.id_of(sp), 5))
                if (lat.points(t5).subset_of(scope_pts)) relevant.insert(t5);
        }
    }

    bool any_undetermined = false;
    std::optional<SubspaceId> first_undetermined;
    for (SubspaceId t5 : relevant) {
        const PointMask tp = lat.points(t5);
        std::vector<SubspaceId> inside;
        for (const SubspaceId& m : f.members)
            if (lat.points(m).subset_of(tp)) inside.push_back(m);
        if (inside.size() != 5) {
            if (!any_undetermined) first_undetermined = t5;
            any_undetermined = true;
            continue;
        }
        for (SubspaceId m : inside) {
            if (!lat.points(m).test(p.mask)) return AlphaResult{AlphaStatus::no, t5};
        }
    }
    if (any_undetermined) return AlphaResult{AlphaStatus::undetermined, first_undetermined};
    return AlphaResult{AlphaStatus::yes, std::nullopt};
}

std::vector<SubspaceId> poor_spaces(const Lattice& lat, SubspaceId t5,
                                    std::span<const SubspaceId> members_in_t) {
    if (t5.dim != 5) throw std::invalid_argument("poor_spaces: T must be 5-dimensional");
    const PointMask tp = lat.points(t5);
    for (SubspaceId m : members_in_t)
        if (!lat.points(m).subset_of(tp))
            throw std::invalid_argument("poor_spaces: member outside T");
    std::vector<SubspaceId> out;
    for (SubspaceId w : lat.subspaces_within(t5, 4)) {
        const PointMask wp = lat.points(w);
        bool poor = true;
        for (SubspaceId m : members_in_t) {
            if (lat.points(m).subset_of(wp)) {
                poor = false;
                break;
            }
        }
        if (poor) out.push_back(w);
    }
    return out;
}

SpreadCandidate trace_on_hyperplane(const Lattice& lat, std::span<const SubspaceId> members,
                                    SubspaceId w) {
    if (w.dim != 4) throw std::invalid_argument("trace_on_hyperplane: w must be 4-dimensional");
    const Subspace& ws = lat.subspace(w);
    std::vector<SubspaceId> traces;
    traces.reserve(members.size());
    for (SubspaceId m : members) {
        Subspace tr = intersect(lat.subspace(m), ws);
        if (tr.dim != 2)
            throw std::invalid_argument("trace_on_hyperplane: member does not meet w in a line");
        traces.push_back(lat.id_of(tr));
    }
    return make_candidate_in(lat, 1, 2, w, std::move(traces));
}

RectangleConfig rectangle_config(const Lattice& lat, const SpreadCandidate& s1,
                                 const SpreadCandidate& s2) {
    if (!(s1.ambient == s2.ambient) || s1.s != 1 || s2.s != 1)
        throw std::invalid_argument("rectangle_config: need two line spreads of one ambient");
    if (s1.members == s2.members) throw std::invalid_argument("rectangle_config: spreads are equal");
    for (const SubspaceId& m : s1.members)
        if (std::binary_search(s2.members.begin(), s2.members.end(), m))
            throw std::invalid_argument("rectangle_config: spreads are not disjoint");
    if (verify_spread(lat, s1) || verify_spread(lat, s2))
        throw std::invalid_argument("rectangle_config: inputs must be verified spreads");

    auto meets = [&](SubspaceId a, SubspaceId b) { return lat.points(a).intersects(lat.points(b)); };
    auto meet_point = [&](SubspaceId a, SubspaceId b) -> Point {
        PointMask m = lat.points(a) & lat.points(b);
        return Point{m.first()};
    };

    // first line of s2 meeting exactly three members of s1 plays the
    // missing-line role; the two members of s1 it misses are l1, l2
    for (const SubspaceId& l5p : s2.members) {
        std::vector<SubspaceId> missed;
        int met = 0;
        for (const SubspaceId& l : s1.members) {
            if (meets(l5p, l)) ++met;
            else missed.push_back(l);
        }
        if (met != 3 || missed.size() != 2) continue;
        const SubspaceId l1 = missed[0], l2 = missed[1];
        for (const SubspaceId& l1p : s2.members) {
            if (l1p == l5p || !meets(l1p, l1) || !meets(l1p, l2)) continue;
            for (const SubspaceId& l2p : s2.members) {
                if (l2p == l5p || l2p == l1p || !meets(l2p, l1) || !meets(l2p, l2)) continue;
                Point q = meet_point(l1, l1p);
                Point qp = meet_point(l2, l2p);
                Point r1 = meet_point(l1, l2p);
                Point r2 = meet_point(l2, l1p);
                if (q == r1 || qp == r2) continue;
                Point r3{r1.mask ^ r2.mask};
                Row rows[2] = {r1.mask, r2.mask};
                Subspace line = rref_canonicalize(rows, lat.n());
                if (line.dim != 2) continue;
                return RectangleConfig{l1, l2, l1p, l2p, q, qp, r1, r2, r3, lat.id_of(line)};
            }
        }
    }
    throw std::runtime_error("rectangle_config: no configuration found");
}

std::string to_spread_literal(const Lattice& lat, const SpreadCandidate& c) {
    std::string out;
    for (const SubspaceId& m : c.members) {
        out += format_subspace(lat.subspace(m));
        out += '\n';
    }
    return out;
}

SpreadCandidate parse_spread_literal(const Lattice& lat, std::istream& in, int s, int t) {
    std::vector<SubspaceId> members;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        Subspace sub;
        try {
            sub = parse_subspace(line, lat.n());
        } catch (const std::invalid_argument& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        auto id = lat.find(sub);
        if (!id) throw ParseError("line " + std::to_string(lineno) + ": subspace not in lattice");
        members.push_back(*id);
    }
    return make_candidate(lat, s, t, std::move(members));
}

nlohmann::json violation_to_json(const Lattice& lat, const SpreadViolation& v) {
    nlohmann::json members = nlohmann::json::array();
    for (const SubspaceId& m : v.members) members.push_back(format_subspace(lat.subspace(m)));
    return nlohmann::json{{"kind", to_string(v.kind)},
                          {"witness", format_subspace(lat.subspace(v.witness))},
                          {"members", std::move(members)},
                          {"counts", {{"coveringMembers", v.members.size()}}}};
}

}  // namespace gfspread
