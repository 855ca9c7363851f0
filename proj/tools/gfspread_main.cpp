// gfspread: exact computations around line spreads and (s,t)-spreads of
// V(n,2): subspace lattices, spread verification, lemma checking and a
// pruned exact-cover search. JSON goes to stdout, human tables to stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gfspread/proofcheck.hpp"
#include "gfspread/search.hpp"

using nlohmann::json;
using namespace gfspread;

namespace {

using Clock = std::chrono::steady_clock;

struct Output {
    bool json_only = false;  // suppress the stderr tables
    bool no_timing = false;  // zero every millis field
};

int emit(const std::string& command, const json& config, const json& result, int status,
         Clock::time_point t0, const Output& out) {
    std::int64_t millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    json report{{"command", command},
                {"config", config},
                {"result", result},
                {"status", status},
                {"millis", out.no_timing ? 0 : millis}};
    std::cout << report.dump(2) << "\n";
    return status;
}

int emit_error(const std::string& command, const std::string& message, int status,
               const Output& out) {
    std::fprintf(stderr, "error: %s\n", message.c_str());
    json report{{"command", command},
                {"config", json::object()},
                {"result", nullptr},
                {"error", message},
                {"status", status},
                {"millis", 0}};
    (void)out;
    std::cout << report.dump(2) << "\n";
    return status;
}

std::string default_cache_path(int n) {
    const char* dir = std::getenv("GFSPREAD_CACHE_DIR");
    if (!dir || !*dir) return {};
    return (std::filesystem::path(dir) / ("v" + std::to_string(n) + ".gflt")).string();
}

// Shared lattice acquisition for commands that consume one. An explicitly
// given or environment-provided cache that fails to load is an environment
// error; only the `lattice` command itself rebuilds on a bad cache.
Lattice acquire_lattice(int n, const std::string& cache_flag, bool* loaded) {
    std::string path = cache_flag.empty() ? default_cache_path(n) : cache_flag;
    if (!path.empty() && std::filesystem::exists(path)) {
        Lattice lat = Lattice::load(path);  // CacheError propagates
        if (loaded) *loaded = true;
        return lat;
    }
    if (loaded) *loaded = false;
    return Lattice::build(n);
}

std::uint64_t parse_count(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size() || v < 0 || v > 1.8e18)
            throw std::invalid_argument("out of range");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(what) + ": expected a count, got '" + text + "'");
    }
}

json members_json(const Lattice& lat, const std::vector<SubspaceId>& members) {
    json out = json::array();
    for (SubspaceId m : members) out.push_back(format_subspace(lat.subspace(m)));
    return out;
}

SpreadCandidate read_spread_file(const Lattice& lat, const std::string& path, int s, int t) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spread file: " + path);
    return parse_spread_literal(lat, in, s, t);
}

// ---- subcommand payloads --------------------------------------------------

int run_lattice(int n, const std::string& cache_flag, Clock::time_point t0, const Output& out) {
    std::string path = cache_flag.empty() ? default_cache_path(n) : cache_flag;
    bool loaded = false;
    bool rebuilt = false;
    Lattice lat = [&] {
        if (!path.empty() && std::filesystem::exists(path)) {
            try {
                Lattice l = Lattice::load(path);
                loaded = true;
                return l;
            } catch (const CacheError& e) {
                std::fprintf(stderr, "warning: %s; rebuilding\n", e.what());
                rebuilt = true;
            }
        }
        return Lattice::build(n);
    }();
    if (!path.empty() && !loaded) {
        auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        lat.save(path);
    }

    json counts = json::array();
    for (int k = 0; k <= n; ++k) {
        counts.push_back(lat.count(k));
        if (!out.json_only) std::fprintf(stderr, "dim%d: %u\n", k, lat.count(k));
    }
    json result{{"n", n},
                {"counts", counts},
                {"cache", path.empty() ? json(nullptr) : json(path)},
                {"loadedFromCache", loaded},
                {"rebuiltCache", rebuilt}};
    json config{{"n", n}, {"cache", path}};
    return emit("lattice", config, result, 0, t0, out);
}

int run_spreads_enum4(Clock::time_point t0, const Output& out) {
    const Lattice& lat = shared_lattice(4);
    auto spreads = enumerate_line_spreads(lat, lat.full_space_id());
    json list = json::array();
    for (const auto& s : spreads) list.push_back(members_json(lat, s.members));
    if (!out.json_only) std::fprintf(stderr, "line spreads of V(4,2): %zu\n", spreads.size());
    json result{{"count", spreads.size()}, {"spreads", list}};
    return emit("spreads enum4", json::object(), result, 0, t0, out);
}

int run_verify(const std::string& file, int n, int s, int t, const std::string& cache_flag,
               Clock::time_point t0, const Output& out) {
    Lattice lat = acquire_lattice(n, cache_flag, nullptr);
    SpreadCandidate c = read_spread_file(lat, file, s, t);
    auto violation = verify_spread(lat, c);
    json config{{"file", file}, {"n", n}, {"s", s}, {"t", t}};
    json result{{"ok", !violation}, {"size", c.members.size()}};
    if (violation) result["violation"] = violation_to_json(lat, *violation);
    else result["violation"] = nullptr;
    if (!out.json_only)
        std::fprintf(stderr, "%s: %s (%zu members)\n", file.c_str(),
                     violation ? to_string(violation->kind) : "ok", c.members.size());
    return emit("verify", config, result, violation ? 1 : 0, t0, out);
}

int run_proofcheck(std::uint64_t samples, std::uint64_t seed, int workers,
                   std::uint64_t max_witnesses, const std::string& cache_flag,
                   Clock::time_point t0, const Output& out) {
    Lattice lat = acquire_lattice(7, cache_flag, nullptr);
    PipelineConfig cfg;
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.max_witnesses = max_witnesses;
    auto reports = run_theorem2_pipeline(lat, cfg);
    bool pass = pipeline_passed(reports);

    json lemmas = json::array();
    for (const auto& r : reports) {
        lemmas.push_back(lemma_report_to_json(r, !out.no_timing));
        if (!out.json_only)
            std::fprintf(stderr, "%-22s %s  examined=%llu  millis=%lld\n", r.lemma.c_str(),
                         r.pass ? "pass" : "FAIL", static_cast<unsigned long long>(r.examined),
                         static_cast<long long>(r.millis));
    }
    json config{{"samples", samples}, {"seed", seed}, {"workers", workers},
                {"maxWitnesses", max_witnesses}};
    json result{{"lemmas", lemmas}, {"pass", pass}};
    return emit("proofcheck", config, result, pass ? 0 : 1, t0, out);
}

int run_certify_theorem2(const std::string& file, const std::string& u_literal, bool force,
                         const std::string& cache_flag, Clock::time_point t0, const Output& out) {
    Lattice lat = acquire_lattice(7, cache_flag, nullptr);
    SpreadCandidate f = read_spread_file(lat, file, 2, 3);
    SubspaceId u = u_literal.empty() ? SubspaceId{6, 0} : lat.id_of(parse_subspace(u_literal, 7));
    if (u.dim != 6) throw ParseError("certify-theorem2: --u must be 6-dimensional");

    NonAlphaResult r = find_non_alpha_point(lat, u, f, force);
    json config{{"file", file}, {"u", format_subspace(lat.subspace(u))}, {"force", force}};
    json result{{"violation", r.violation ? violation_to_json(lat, *r.violation) : json(nullptr)},
                {"point", r.point ? json(format_row(r.point->mask, 7)) : json(nullptr)},
                {"witnessT", r.witness_t ? json(format_subspace(lat.subspace(*r.witness_t)))
                                         : json(nullptr)}};
    int status = r.violation ? 1 : 0;
    if (!out.json_only) {
        if (r.violation) std::fprintf(stderr, "not a spread: %s\n", to_string(r.violation->kind));
        else if (r.point) std::fprintf(stderr, "non-alpha point found\n");
        else std::fprintf(stderr, "no non-alpha point among the points of u\n");
    }
    return emit("certify-theorem2", config, result, status, t0, out);
}

int run_certify_thomas(const std::string& file, bool force, const std::string& probe_literal,
                       const std::string& cache_flag, Clock::time_point t0, const Output& out) {
    Lattice lat = acquire_lattice(7, cache_flag, nullptr);
    SpreadCandidate f = read_spread_file(lat, file, 2, 3);
    std::vector<Point> probes;
    if (!probe_literal.empty()) probes.push_back(Point{parse_row(probe_literal, 7)});

    ThomasResult r = thomas_check(lat, f, force, probes);
    const Lattice& lat6 = shared_lattice(6);
    json witness = nullptr;
    if (r.witness)
        witness = json{{"s1", format_subspace(lat6.subspace(r.witness->s1))},
                       {"s2", format_subspace(lat6.subspace(r.witness->s2))},
                       {"s3", format_subspace(lat6.subspace(r.witness->s3))},
                       {"coordinates", "quotient V/P"}};
    json config{{"file", file}, {"force", force}, {"probe", probe_literal}};
    json result{{"violation", r.violation ? violation_to_json(lat, *r.violation) : json(nullptr)},
                {"point", r.point ? json(format_row(r.point->mask, 7)) : json(nullptr)},
                {"witness", witness}};
    int status = r.violation ? 1 : 0;
    if (!out.json_only) {
        if (r.violation) std::fprintf(stderr, "not a spread: %s\n", to_string(r.violation->kind));
        else if (r.point) std::fprintf(stderr, "non-geometric derived spread found\n");
        else std::fprintf(stderr, "no probed point has a non-geometric derived spread\n");
    }
    return emit("certify-thomas", config, result, status, t0, out);
}

int run_search(int n, int s, int t, const std::string& nodes_text, int depth, std::uint64_t limit,
               int workers, int frontier, std::uint64_t order_seed, bool fix_first,
               bool no_prune, const std::string& checkpoint, const std::string& resume,
               const std::string& cache_flag, Clock::time_point t0, const Output& out) {
    Lattice lat = acquire_lattice(n, cache_flag, nullptr);
    ExactCoverInstance inst = build_instance(lat, s, t);

    SearchConfig cfg;
    // the open (7,2,3) instance defaults to a desk-scale bounded run
    const bool open_instance = n == 7 && s == 2 && t == 3;
    cfg.node_budget = nodes_text.empty() ? (open_instance ? 100000000ull : 0)
                                         : parse_count(nodes_text, "--nodes");
    cfg.depth_limit = depth;
    cfg.solution_limit = limit;
    cfg.workers = workers;
    cfg.frontier_depth = frontier;
    cfg.order_seed = order_seed;
    cfg.checkpoint_path = checkpoint;
    cfg.resume_path = resume;
    if (fix_first) cfg.symmetry = SearchConfig::Symmetry::fix_first_member;
    if (no_prune) cfg.prune_point_degree = cfg.prune_hyperplane45 = cfg.prune_fivespace5 = false;

    SearchResult r = solve(lat, inst, cfg);
    json sols = json::array();
    for (const auto& sol : r.solutions) sols.push_back(members_json(lat, sol));
    json config{{"n", n},           {"s", s},
                {"t", t},           {"nodes", cfg.node_budget},
                {"depth", depth},   {"limit", limit},
                {"workers", workers}, {"frontier", frontier},
                {"seed", order_seed}, {"fixFirst", fix_first},
                {"noPrune", no_prune}, {"checkpoint", checkpoint},
                {"resume", resume}};
    json result{{"stats", stats_to_json(r.stats, !out.no_timing)},
                {"solutions", sols},
                {"exhausted", r.stats.exhausted_budget},
                {"restrictedCounts", fix_first}};
    if (!out.json_only)
        std::fprintf(stderr,
                     "search %d %d %d: nodes=%llu maxDepth=%d solutions=%llu%s%s\n", n, s, t,
                     static_cast<unsigned long long>(r.stats.nodes), r.stats.max_depth,
                     static_cast<unsigned long long>(r.stats.solutions),
                     r.stats.exhausted_budget ? " (budget exhausted)" : "",
                     fix_first ? " (fixed first member; counts restricted)" : "");
    return emit("search", config, result, 0, t0, out);
}

}  // namespace

int main(int argc, char** argv) {
    auto t0 = Clock::now();
    Output out;

    CLI::App app{"exact finite-geometry toolkit for V(n,2) spreads"};
    app.require_subcommand(1);
    app.fallthrough();  // --json etc. may follow the subcommand
    app.add_flag("--json", out.json_only, "machine output only (no stderr tables)");
    app.add_flag("--no-timing", out.no_timing, "zero all millis fields for byte-stable output");
    std::string cache_flag;
    app.add_option("--cache", cache_flag, "lattice cache file (default: $GFSPREAD_CACHE_DIR/v<n>.gflt)");

    // lattice
    auto* cmd_lattice = app.add_subcommand("lattice", "build or load the subspace lattice");
    int lat_n = 7;
    cmd_lattice->add_option("n", lat_n, "ambient dimension")->required()->check(CLI::Range(1, 7));

    // spreads enum4
    auto* cmd_spreads = app.add_subcommand("spreads", "spread constructions");
    auto* cmd_enum4 = cmd_spreads->add_subcommand("enum4", "enumerate the line spreads of V(4,2)");
    cmd_spreads->require_subcommand(1);

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "verify a spread literal file");
    std::string verify_file;
    int vn = 7, vs = 2, vt = 3;
    cmd_verify->add_option("file", verify_file, "spread literal file")->required();
    cmd_verify->add_option("--n", vn, "ambient dimension")->check(CLI::Range(1, 7));
    cmd_verify->add_option("--s", vs, "covered dimension");
    cmd_verify->add_option("--t", vt, "member dimension");

    // proofcheck
    auto* cmd_proof = app.add_subcommand("proofcheck", "run the six-lemma verification pipeline");
    std::string samples_text = "100000";
    std::uint64_t seed = 1;
    int workers = 1;
    std::uint64_t max_witnesses = 0;
    cmd_proof->add_option("--samples", samples_text, "poor-space samples (default 1e5)");
    cmd_proof->add_option("--seed", seed, "sampling seed");
    cmd_proof->add_option("--workers", workers, "parallel workers")->check(CLI::Range(1, 256));
    cmd_proof->add_option("--max-witnesses", max_witnesses, "cap recorded witnesses (0 = all)");

    // certify-theorem2
    auto* cmd_t2 = app.add_subcommand("certify-theorem2", "find a non-alpha point of a 6-space");
    std::string t2_file, t2_u;
    bool t2_force = false;
    cmd_t2->add_option("file", t2_file, "candidate spread file")->required();
    cmd_t2->add_option("--u", t2_u, "6-space literal (default: canonical first)");
    cmd_t2->add_flag("--force", t2_force, "skip the spread verification step");

    // certify-thomas
    auto* cmd_th = app.add_subcommand("certify-thomas", "find a non-geometric derived spread");
    std::string th_file, th_probe;
    bool th_force = false;
    cmd_th->add_option("file", th_file, "candidate spread file")->required();
    cmd_th->add_option("--probe", th_probe, "probe a single point literal");
    cmd_th->add_flag("--force", th_force, "skip the spread verification step");

    // search
    auto* cmd_search = app.add_subcommand("search", "exact-cover search for (s,t)-spreads");
    int sn = 7, ss = 2, st = 3, sdepth = 0, sworkers = 1, sfrontier = 2;
    std::string nodes_text, ckpt, resume;
    std::uint64_t slimit = 0, sseed = 0;
    bool fix_first = false, no_prune = false;
    cmd_search->add_option("n", sn, "ambient dimension")->required()->check(CLI::Range(2, 7));
    cmd_search->add_option("s", ss, "covered dimension")->required();
    cmd_search->add_option("t", st, "member dimension")->required();
    cmd_search->add_option("--nodes", nodes_text,
                           "node budget, 1e6 style accepted (default: unlimited; 1e8 on 7 2 3)");
    cmd_search->add_option("--depth", sdepth, "depth limit");
    cmd_search->add_option("--limit", slimit, "stop after this many solutions");
    cmd_search->add_option("--workers", sworkers, "parallel workers")->check(CLI::Range(1, 256));
    cmd_search->add_option("--frontier", sfrontier, "subtree hand-off depth for workers > 1");
    cmd_search->add_option("--seed", sseed, "candidate order seed (0 = canonical)");
    cmd_search->add_flag("--fix-first", fix_first, "force the canonically least candidate");
    cmd_search->add_flag("--no-prune", no_prune, "disable the counting caps");
    cmd_search->add_option("--checkpoint", ckpt, "write a checkpoint when the budget runs out");
    cmd_search->add_option("--resume", resume, "resume from a checkpoint file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        if (cmd_lattice->parsed()) return run_lattice(lat_n, cache_flag, t0, out);
        if (cmd_spreads->parsed() && cmd_enum4->parsed()) return run_spreads_enum4(t0, out);
        if (cmd_verify->parsed())
            return run_verify(verify_file, vn, vs, vt, cache_flag, t0, out);
        if (cmd_proof->parsed())
            return run_proofcheck(parse_count(samples_text, "--samples"), seed, workers,
                                  max_witnesses, cache_flag, t0, out);
        if (cmd_t2->parsed())
            return run_certify_theorem2(t2_file, t2_u, t2_force, cache_flag, t0, out);
        if (cmd_th->parsed())
            return run_certify_thomas(th_file, th_force, th_probe, cache_flag, t0, out);
        if (cmd_search->parsed())
            return run_search(sn, ss, st, nodes_text, sdepth, slimit, sworkers, sfrontier, sseed,
                              fix_first, no_prune, ckpt, resume, cache_flag, t0, out);
        return emit_error(command, "unknown subcommand", 2, out);
    } catch (const ParseError& e) {
        return emit_error(command, e.what(), 2, out);
    } catch (const CacheError& e) {
        return emit_error(command, e.what(), 2, out);
    } catch (const CheckpointError& e) {
        return emit_error(command, e.what(), 2, out);
    } catch (const CLI::ValidationError& e) {
        return emit_error(command, e.what(), 2, out);
    } catch (const std::invalid_argument& e) {
        return emit_error(command, e.what(), 2, out);
    } catch (const std::exception& e) {
        return emit_error(command, e.what(), 2, out);
    }
}
