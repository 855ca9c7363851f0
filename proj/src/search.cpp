#include "gfspread/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <thread>

#include "gfspread/rng.hpp"

namespace gfspread {

namespace {

using Clock = std::chrono::steady_clock;
constexpr char kCkMagic[4] = {'G', 'F', 'C', 'K'};
constexpr std::uint32_t kCkVersion = 1;

// ---- counting caps of a (2,3)-spread of V(7,2) --------------------------

constexpr int kCapPerPoint = 21;
constexpr int kCapPerPointInHyperplane = 5;
constexpr int kCapPerFiveSpace = 5;
constexpr int kCapPerHyperplane = 45;

const char* kRulePointDegree = "point-degree";
const char* kRuleHyperplane45 = "hyperplane-45";
const char* kRuleFivespace5 = "fivespace-5";

// Incremental scope counters. Each chosen candidate bumps the counter of
// every point, 5-space, 6-space and (point, 6-space) scope it sits in; a
// branch is cut as soon as a counter would pass its cap. A full spread
// meets all caps with equality, so cuts never lose completable branches.
class PruneState {
public:
    PruneState(const Lattice& lat, const ExactCoverInstance& inst, const SearchConfig& cfg) {
        active_ = inst.n == 7 && inst.s == 2 && inst.t == 3 &&
                  (cfg.prune_point_degree || cfg.prune_hyperplane45 || cfg.prune_fivespace5);
        if (!active_) return;
        point_on_ = cfg.prune_point_degree;
        six_on_ = cfg.prune_hyperplane45;
        five_on_ = cfg.prune_fivespace5;

        const std::uint32_t nsix = lat.count(6);
        point_counts_.assign(128, 0);
        point_in_six_counts_.assign(static_cast<std::size_t>(nsix) * 128, 0);
        six_counts_.assign(nsix, 0);
        five_counts_.assign(lat.count(5), 0);

        const std::size_t m = inst.candidates.size();
        points_.resize(m);
        sixes_.resize(m);
        fives_.resize(m);
        point_in_six_.resize(m);
        for (std::size_t c = 0; c < m; ++c) {
            const SubspaceId id = inst.candidates[c];
            const PointMask& pm = lat.points(id);
            for (unsigned p = pm.first(); p; p = pm.next_after(p)) points_[c].push_back(p);
            for (SubspaceId t5 : lat.superspaces(id, 5)) fives_[c].push_back(t5.index);
            for (std::uint32_t u = 0; u < nsix; ++u) {
                if (!pm.subset_of(lat.points(SubspaceId{6, u}))) continue;
                sixes_[c].push_back(u);
                for (unsigned p : points_[c]) point_in_six_[c].push_back(u * 128 + p);
            }
        }
    }

    bool active() const { return active_; }

    // nullptr when admissible (the member is then counted); otherwise the
    // violated rule, with no state change
    const char* try_add(std::uint32_t c) {
        if (!active_) return nullptr;
        if (point_on_) {
            for (unsigned p : points_[c])
                if (point_counts_[p] >= kCapPerPoint) return kRulePointDegree;
            for (std::uint32_t k : point_in_six_[c])
                if (point_in_six_counts_[k] >= kCapPerPointInHyperplane) return kRulePointDegree;
        }
        if (six_on_) {
            for (std::uint32_t u : sixes_[c])
                if (six_counts_[u] >= kCapPerHyperplane) return kRuleHyperplane45;
        }
        if (five_on_) {
            for (std::uint32_t t : fives_[c])
                if (five_counts_[t] >= kCapPerFiveSpace) return kRuleFivespace5;
        }
        for (unsigned p : points_[c]) ++point_counts_[p];
        for (std::uint32_t k : point_in_six_[c]) ++point_in_six_counts_[k];
        for (std::uint32_t u : sixes_[c]) ++six_counts_[u];
        for (std::uint32_t t : fives_[c]) ++five_counts_[t];
        return nullptr;
    }

    void remove(std::uint32_t c) {
        if (!active_) return;
        for (unsigned p : points_[c]) --point_counts_[p];
        for (std::uint32_t k : point_in_six_[c]) --point_in_six_counts_[k];
        for (std::uint32_t u : sixes_[c]) --six_counts_[u];
        for (std::uint32_t t : fives_[c]) --five_counts_[t];
    }

private:
    bool active_ = false;
    bool point_on_ = false, six_on_ = false, five_on_ = false;
    std::vector<std::uint16_t> point_counts_, point_in_six_counts_, six_counts_, five_counts_;
    std::vector<std::vector<unsigned>> points_;
    std::vector<std::vector<std::uint32_t>> sixes_, fives_, point_in_six_;
};

// ---- dancing links -------------------------------------------------------

struct Dlx {
    std::uint32_t ncols = 0;
    std::uint32_t root = 0;
    std::vector<std::uint32_t> up, down, colof, rowof;
    std::vector<std::uint32_t> col_size, col_prev, col_next;
    std::vector<std::uint32_t> row_begin, row_len;

    // rows are appended in `order`, which fixes the within-column candidate
    // sequence; rows keep their original candidate indices
    void build(const ExactCoverInstance& inst, std::span<const std::uint32_t> order) {
        ncols = static_cast<std::uint32_t>(inst.universe.size());
        root = ncols;
        std::size_t cells = ncols;
        for (const auto& cov : inst.covers) cells += cov.count();
        up.resize(cells);
        down.resize(cells);
        colof.resize(cells);
        rowof.resize(cells);
        col_size.assign(ncols, 0);
        col_prev.resize(ncols + 1);
        col_next.resize(ncols + 1);
        row_begin.assign(inst.candidates.size(), 0);
        row_len.assign(inst.candidates.size(), 0);

        for (std::uint32_t c = 0; c <= ncols; ++c) {
            col_prev[c] = c == 0 ? ncols : c - 1;
            col_next[c] = c == ncols ? 0 : c + 1;
        }
        for (std::uint32_t c = 0; c < ncols; ++c) {
            up[c] = c;
            down[c] = c;
            colof[c] = c;
            rowof[c] = std::numeric_limits<std::uint32_t>::max();
        }
        std::uint32_t node = ncols;
        for (std::uint32_t r : order) {
            row_begin[r] = node;
            inst.covers[r].for_each_set([&](std::size_t e) {
                auto c = static_cast<std::uint32_t>(e);
                std::uint32_t u = up[c];
                up[node] = u;
                down[node] = c;
                down[u] = node;
                up[c] = node;
                colof[node] = c;
                rowof[node] = r;
                ++col_size[c];
                ++node;
            });
            row_len[r] = node - row_begin[r];
        }
    }

    void cover(std::uint32_t c) {
        col_next[col_prev[c]] = col_next[c];
        col_prev[col_next[c]] = col_prev[c];
        for (std::uint32_t i = down[c]; i != c; i = down[i]) {
            std::uint32_t r = rowof[i];
            for (std::uint32_t j = row_begin[r]; j < row_begin[r] + row_len[r]; ++j) {
                if (j == i) continue;
                down[up[j]] = down[j];
                up[down[j]] = up[j];
                --col_size[colof[j]];
            }
        }
    }

    void uncover(std::uint32_t c) {
        for (std::uint32_t i = up[c]; i != c; i = up[i]) {
            std::uint32_t r = rowof[i];
            for (std::uint32_t j = row_begin[r] + row_len[r]; j-- > row_begin[r];) {
                if (j == i) continue;
                ++col_size[colof[j]];
                down[up[j]] = j;
                up[down[j]] = j;
            }
        }
        col_next[col_prev[c]] = c;
        col_prev[col_next[c]] = c;
    }

    // cover the other columns of row r (its own column is already covered)
    void pick(std::uint32_t r, std::uint32_t skip_col) {
        for (std::uint32_t j = row_begin[r]; j < row_begin[r] + row_len[r]; ++j)
            if (colof[j] != skip_col) cover(colof[j]);
    }
    void unpick(std::uint32_t r, std::uint32_t skip_col) {
        for (std::uint32_t j = row_begin[r] + row_len[r]; j-- > row_begin[r];)
            if (colof[j] != skip_col) uncover(colof[j]);
    }

    // cover every column of row r (for a forced row)
    void force(std::uint32_t r) {
        for (std::uint32_t j = row_begin[r]; j < row_begin[r] + row_len[r]; ++j) cover(colof[j]);
    }

    bool empty() const { return col_next[root] == root; }

    // minimum remaining candidates; the header ring keeps ascending id
    // order, so the first strict minimum is the lowest-id tie-break
    std::uint32_t choose_column() const {
        std::uint32_t best = root;
        std::uint32_t best_size = std::numeric_limits<std::uint32_t>::max();
        for (std::uint32_t c = col_next[root]; c != root; c = col_next[c]) {
            if (col_size[c] < best_size) {
                best = c;
                best_size = col_size[c];
                if (best_size == 0) break;
            }
        }
        return best;
    }

    std::uint32_t find_node(std::uint32_t col, std::uint32_t row) const {
        for (std::uint32_t i = down[col]; i != col; i = down[i])
            if (rowof[i] == row) return i;
        return std::numeric_limits<std::uint32_t>::max();
    }
};

// ---- checkpoint io ---------------------------------------------------------

struct CheckpointData {
    std::uint32_t n = 0, s = 0, t = 0;
    std::uint8_t symmetry = 0;
    std::uint64_t order_seed = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack;  // (column, row)
    SearchStats stats;
    std::vector<std::vector<std::uint32_t>> solutions;  // candidate index lists
};

void ck_u32(std::string& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void ck_u64(std::string& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct CkReader {
    const std::string& buf;
    std::size_t pos = 0;
    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw CheckpointError("checkpoint truncated");
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= std::uint32_t(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= std::uint64_t(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    std::string str() {
        std::uint32_t len = u32();
        need(len);
        std::string s = buf.substr(pos, len);
        pos += len;
        return s;
    }
};

void save_checkpoint(const std::string& path, const CheckpointData& ck) {
    std::string b;
    b.append(kCkMagic, 4);
    ck_u32(b, kCkVersion);
    ck_u32(b, ck.n);
    ck_u32(b, ck.s);
    ck_u32(b, ck.t);
    b.push_back(static_cast<char>(ck.symmetry));
    ck_u64(b, ck.order_seed);
    ck_u32(b, static_cast<std::uint32_t>(ck.stack.size()));
    for (auto [c, r] : ck.stack) {
        ck_u32(b, c);
        ck_u32(b, r);
    }
    ck_u64(b, ck.stats.nodes);
    ck_u32(b, static_cast<std::uint32_t>(ck.stats.max_depth));
    ck_u64(b, ck.stats.solutions);
    ck_u32(b, static_cast<std::uint32_t>(ck.stats.prunes.size()));
    for (const auto& [rule, count] : ck.stats.prunes) {
        ck_u32(b, static_cast<std::uint32_t>(rule.size()));
        b += rule;
        ck_u64(b, count);
    }
    ck_u32(b, static_cast<std::uint32_t>(ck.stats.depth_histogram.size()));
    for (std::uint64_t v : ck.stats.depth_histogram) ck_u64(b, v);
    ck_u32(b, static_cast<std::uint32_t>(ck.solutions.size()));
    for (const auto& sol : ck.solutions) {
        ck_u32(b, static_cast<std::uint32_t>(sol.size()));
        for (std::uint32_t r : sol) ck_u32(b, r);
    }
    Fnv1a64 sum;
    sum.update(b.data(), b.size());
    ck_u64(b, sum.digest());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
    if (!out) throw CheckpointError("short write to checkpoint: " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 16) throw CheckpointError("checkpoint truncated");
    Fnv1a64 sum;
    sum.update(buf.data(), buf.size() - 8);
    CkReader tail{buf, buf.size() - 8};
    if (sum.digest() != tail.u64()) throw CheckpointError("checkpoint checksum mismatch");
    if (std::memcmp(buf.data(), kCkMagic, 4) != 0) throw CheckpointError("checkpoint bad magic");

    CkReader r{buf, 4};
    if (r.u32() != kCkVersion) throw CheckpointError("checkpoint version mismatch");
    CheckpointData ck;
    ck.n = r.u32();
    ck.s = r.u32();
    ck.t = r.u32();
    ck.symmetry = r.u8();
    ck.order_seed = r.u64();
    std::uint32_t depth = r.u32();
    for (std::uint32_t i = 0; i < depth; ++i) {
        std::uint32_t c = r.u32();
        std::uint32_t row = r.u32();
        ck.stack.emplace_back(c, row);
    }
    ck.stats.nodes = r.u64();
    ck.stats.max_depth = static_cast<int>(r.u32());
    ck.stats.solutions = r.u64();
    std::uint32_t nprunes = r.u32();
    for (std::uint32_t i = 0; i < nprunes; ++i) {
        std::string rule = r.str();
        ck.stats.prunes[rule] = r.u64();
    }
    std::uint32_t hlen = r.u32();
    for (std::uint32_t i = 0; i < hlen; ++i) ck.stats.depth_histogram.push_back(r.u64());
    std::uint32_t nsol = r.u32();
    for (std::uint32_t i = 0; i < nsol; ++i) {
        std::uint32_t len = r.u32();
        std::vector<std::uint32_t> sol(len);
        for (auto& v : sol) v = r.u32();
        ck.solutions.push_back(std::move(sol));
    }
    if (r.pos != buf.size() - 8) throw CheckpointError("checkpoint trailing bytes");
    return ck;
}

// ---- the DFS runner --------------------------------------------------------

struct Frame {
    std::uint32_t col;
    std::uint32_t node;
};

struct RunControl {
    std::uint64_t node_budget = 0;   // absolute, against stats.nodes
    int depth_limit = 0;
    int frontier_depth = 0;          // collect prefixes here instead of expanding
    std::size_t solution_limit = 0;  // against stats.solutions
};

class Runner {
public:
    Runner(Dlx& dlx, PruneState& caps, SearchStats& stats,
           std::vector<std::vector<std::uint32_t>>& sols)
        : dlx_(dlx), caps_(caps), stats_(stats), sols_(sols) {}

    std::vector<Frame>& stack() { return stack_; }
    std::vector<std::vector<std::uint32_t>>& prefixes() { return prefixes_; }

    // re-apply a checkpointed decision path, verifying each column choice
    void replay(std::span<const std::pair<std::uint32_t, std::uint32_t>> path) {
        for (auto [col, row] : path) {
            if (dlx_.choose_column() != col)
                throw CheckpointError("checkpoint does not match this instance");
            apply(col, row,
                  [](const char*) { throw CheckpointError("checkpoint violates pruning caps"); });
        }
    }

    // re-apply a frontier prefix (columns recomputed, caps must admit)
    void replay_rows(std::span<const std::uint32_t> rows) {
        for (std::uint32_t row : rows) {
            std::uint32_t col = dlx_.choose_column();
            apply(col, row, [](const char*) { throw std::logic_error("prefix violates caps"); });
        }
    }

    // Runs the DFS until everything at or below `base_depth` is exhausted;
    // a resumed run passes 0 so the replayed frames backtrack normally, a
    // subtree worker passes the prefix length to stay inside its subtree.
    // Returns false when paused on the node budget.
    bool run(const RunControl& ctl, std::size_t base_depth) {
        bool expanding = true;
        while (true) {
            if (expanding) {
                if (ctl.node_budget && stats_.nodes >= ctl.node_budget) return false;
                ++stats_.nodes;
                const int depth = static_cast<int>(stack_.size());
                if (static_cast<std::size_t>(depth) >= stats_.depth_histogram.size())
                    stats_.depth_histogram.resize(static_cast<std::size_t>(depth) + 1, 0);
                ++stats_.depth_histogram[static_cast<std::size_t>(depth)];
                stats_.max_depth = std::max(stats_.max_depth, depth);

                if (dlx_.empty()) {
                    std::vector<std::uint32_t> sol;
                    sol.reserve(stack_.size());
                    for (const Frame& f : stack_) sol.push_back(dlx_.rowof[f.node]);
                    sols_.push_back(std::move(sol));
                    ++stats_.solutions;
                    if (ctl.solution_limit && stats_.solutions >= ctl.solution_limit) return true;
                    expanding = false;
                    continue;
                }
                if (ctl.frontier_depth && depth == ctl.frontier_depth) {
                    std::vector<std::uint32_t> pre;
                    pre.reserve(stack_.size());
                    for (const Frame& f : stack_) pre.push_back(dlx_.rowof[f.node]);
                    prefixes_.push_back(std::move(pre));
                    expanding = false;
                    continue;
                }
                if (ctl.depth_limit && depth >= ctl.depth_limit) {
                    ++stats_.prunes["depth-limit"];
                    expanding = false;
                    continue;
                }
                std::uint32_t col = dlx_.choose_column();
                dlx_.cover(col);
                expanding = advance_into(col, dlx_.down[col]);
            } else {
                if (stack_.size() == base_depth) return true;
                Frame f = stack_.back();
                stack_.pop_back();
                std::uint32_t row = dlx_.rowof[f.node];
                dlx_.unpick(row, f.col);
                caps_.remove(row);
                expanding = advance_into(f.col, dlx_.down[f.node]);
            }
        }
    }

private:
    template <typename OnCut>
    void apply(std::uint32_t col, std::uint32_t row, OnCut on_cut) {
        dlx_.cover(col);
        std::uint32_t node = dlx_.find_node(col, row);
        if (node == std::numeric_limits<std::uint32_t>::max())
            throw CheckpointError("checkpointed row is not available");
        if (const char* cut = caps_.try_add(row)) on_cut(cut);
        dlx_.pick(row, col);
        stack_.push_back(Frame{col, node});
    }

    // try candidates of `col` starting at `node`; pushes a frame and returns
    // true, or uncovers the column and returns false
    bool advance_into(std::uint32_t col, std::uint32_t node) {
        while (node != col) {
            std::uint32_t row = dlx_.rowof[node];
            if (const char* cut = caps_.try_add(row)) {
                ++stats_.prunes[cut];
                node = dlx_.down[node];
                continue;
            }
            dlx_.pick(row, col);
            stack_.push_back(Frame{col, node});
            return true;
        }
        dlx_.uncover(col);
        return false;
    }

    Dlx& dlx_;
    PruneState& caps_;
    SearchStats& stats_;
    std::vector<std::vector<std::uint32_t>>& sols_;
    std::vector<Frame> stack_;
    std::vector<std::vector<std::uint32_t>> prefixes_;
};

std::vector<std::uint32_t> candidate_order(const ExactCoverInstance& inst, std::uint64_t seed) {
    std::vector<std::uint32_t> order(inst.candidates.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng_below(rng, i)]);
    }
    return order;
}

}  // namespace

ExactCoverInstance build_instance(const Lattice& lat, int s, int t) {
    const int n = lat.n();
    if (!(1 <= s && s < t && t < n)) throw std::invalid_argument("build_instance: need 1 <= s < t < n");
    ExactCoverInstance inst;
    inst.n = n;
    inst.s = s;
    inst.t = t;
    inst.universe.reserve(lat.count(s));
    for (std::uint32_t i = 0; i < lat.count(s); ++i)
        inst.universe.push_back(SubspaceId{static_cast<std::uint8_t>(s), i});
    inst.candidates.reserve(lat.count(t));
    inst.covers.reserve(lat.count(t));
    for (std::uint32_t i = 0; i < lat.count(t); ++i) {
        SubspaceId id{static_cast<std::uint8_t>(t), i};
        inst.candidates.push_back(id);
        Bitset cov(inst.universe.size());
        for (SubspaceId sub : lat.subspaces_within(id, s)) cov.set(sub.index);
        inst.covers.push_back(std::move(cov));
    }
    return inst;
}

ExactCoverInstance symmetry_fix_first(const ExactCoverInstance& inst) {
    if (inst.candidates.empty()) throw std::invalid_argument("symmetry_fix_first: no candidates");
    const Bitset& forced = inst.covers[0];
    ExactCoverInstance out;
    out.n = inst.n;
    out.s = inst.s;
    out.t = inst.t;
    std::vector<std::size_t> remap(inst.universe.size(), SIZE_MAX);
    for (std::size_t e = 0; e < inst.universe.size(); ++e) {
        if (forced.test(e)) continue;
        remap[e] = out.universe.size();
        out.universe.push_back(inst.universe[e]);
    }
    for (std::size_t c = 1; c < inst.candidates.size(); ++c) {
        bool clash = false;
        for (std::size_t w = 0; w < forced.words().size() && !clash; ++w)
            if (forced.words()[w] & inst.covers[c].words()[w]) clash = true;
        if (clash) continue;
        Bitset cov(out.universe.size());
        inst.covers[c].for_each_set([&](std::size_t e) { cov.set(remap[e]); });
        out.candidates.push_back(inst.candidates[c]);
        out.covers.push_back(std::move(cov));
    }
    return out;
}

std::optional<std::string> prune_hooks(const Lattice& lat, const ExactCoverInstance& inst,
                                       std::span<const SubspaceId> partial, const SearchConfig& cfg) {
    PruneState caps(lat, inst, cfg);
    if (!caps.active()) return std::nullopt;
    for (SubspaceId id : partial) {
        auto it = std::lower_bound(inst.candidates.begin(), inst.candidates.end(), id);
        if (it == inst.candidates.end() || !(*it == id))
            throw std::invalid_argument("prune_hooks: member is not an instance candidate");
        auto c = static_cast<std::uint32_t>(it - inst.candidates.begin());
        if (const char* rule = caps.try_add(c)) return std::string(rule);
    }
    return std::nullopt;
}

nlohmann::json stats_to_json(const SearchStats& st, bool with_timing) {
    nlohmann::json prunes = nlohmann::json::object();
    for (const auto& [rule, count] : st.prunes) prunes[rule] = count;
    return nlohmann::json{{"nodes", st.nodes},
                          {"maxDepth", st.max_depth},
                          {"prunes", prunes},
                          {"solutions", st.solutions},
                          {"millis", with_timing ? st.millis : 0},
                          {"exhausted", st.exhausted_budget},
                          {"completed", st.completed},
                          {"depthHistogram", st.depth_histogram}};
}

SearchResult solve(const Lattice& lat, const ExactCoverInstance& inst, const SearchConfig& cfg) {
    auto t0 = Clock::now();
    if (cfg.workers < 1) throw std::invalid_argument("solve: workers must be >= 1");
    if (cfg.workers > 1 && (!cfg.checkpoint_path.empty() || !cfg.resume_path.empty()))
        throw std::invalid_argument("solve: checkpointing requires a single worker");
    const bool fix_first = cfg.symmetry == SearchConfig::Symmetry::fix_first_member;
    if (fix_first && inst.candidates.empty())
        throw std::invalid_argument("solve: cannot fix a member of an empty candidate list");

    const auto order = candidate_order(inst, cfg.order_seed);

    SearchStats stats;
    std::vector<std::vector<std::uint32_t>> sols;

    CheckpointData resume;
    bool resuming = false;
    if (!cfg.resume_path.empty()) {
        resume = load_checkpoint(cfg.resume_path);
        if (resume.n != static_cast<std::uint32_t>(inst.n) ||
            resume.s != static_cast<std::uint32_t>(inst.s) ||
            resume.t != static_cast<std::uint32_t>(inst.t) ||
            resume.symmetry != (fix_first ? 1 : 0) || resume.order_seed != cfg.order_seed)
            throw CheckpointError("checkpoint was written for a different run");
        stats = resume.stats;
        stats.exhausted_budget = false;
        sols = resume.solutions;
        resuming = true;
    }

    bool finished = false;
    if (cfg.workers == 1) {
        Dlx dlx;
        dlx.build(inst, order);
        PruneState caps(lat, inst, cfg);
        if (fix_first) {
            if (const char* cut = caps.try_add(0))
                throw std::logic_error(std::string("forced member violates caps: ") + cut);
            dlx.force(0);
        }
        Runner runner(dlx, caps, stats, sols);
        if (resuming) runner.replay(resume.stack);
        RunControl ctl;
        ctl.node_budget = cfg.node_budget;
        ctl.depth_limit = cfg.depth_limit;
        ctl.solution_limit = cfg.solution_limit;
        finished = runner.run(ctl, 0);
        if (!finished) {
            stats.exhausted_budget = true;
            if (!cfg.checkpoint_path.empty()) {
                CheckpointData ck;
                ck.n = static_cast<std::uint32_t>(inst.n);
                ck.s = static_cast<std::uint32_t>(inst.s);
                ck.t = static_cast<std::uint32_t>(inst.t);
                ck.symmetry = fix_first ? 1 : 0;
                ck.order_seed = cfg.order_seed;
                for (const Frame& f : runner.stack()) ck.stack.emplace_back(f.col, dlx.rowof[f.node]);
                ck.stats = stats;
                ck.solutions = sols;
                save_checkpoint(cfg.checkpoint_path, ck);
            }
        }
    } else {
        // expand a sequential frontier, then farm the subtrees out
        std::vector<std::vector<std::uint32_t>> prefixes;
        {
            Dlx dlx;
            dlx.build(inst, order);
            PruneState caps(lat, inst, cfg);
            if (fix_first) {
                caps.try_add(0);
                dlx.force(0);
            }
            Runner runner(dlx, caps, stats, sols);
            RunControl ctl;
            ctl.frontier_depth = std::max(cfg.frontier_depth, 1);
            ctl.depth_limit = cfg.depth_limit;
            runner.run(ctl, 0);
            prefixes = std::move(runner.prefixes());
        }
        std::vector<SearchStats> wstats(prefixes.size());
        std::vector<std::vector<std::vector<std::uint32_t>>> wsols(prefixes.size());
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= prefixes.size()) return;
                Dlx dlx;
                dlx.build(inst, order);
                PruneState caps(lat, inst, cfg);
                if (fix_first) {
                    caps.try_add(0);
                    dlx.force(0);
                }
                Runner runner(dlx, caps, wstats[i], wsols[i]);
                runner.replay_rows(prefixes[i]);
                RunControl ctl;
                ctl.node_budget = cfg.node_budget;
                ctl.depth_limit = cfg.depth_limit;
                ctl.solution_limit = cfg.solution_limit;
                if (!runner.run(ctl, prefixes[i].size())) wstats[i].exhausted_budget = true;
            }
        };
        std::vector<std::thread> pool;
        for (int wi = 0; wi < cfg.workers; ++wi) pool.emplace_back(work);
        for (auto& th : pool) th.join();
        for (std::size_t i = 0; i < prefixes.size(); ++i) {
            stats.nodes += wstats[i].nodes;
            stats.max_depth = std::max(stats.max_depth, wstats[i].max_depth);
            stats.solutions += wstats[i].solutions;
            stats.exhausted_budget = stats.exhausted_budget || wstats[i].exhausted_budget;
            for (const auto& [rule, count] : wstats[i].prunes) stats.prunes[rule] += count;
            if (wstats[i].depth_histogram.size() > stats.depth_histogram.size())
                stats.depth_histogram.resize(wstats[i].depth_histogram.size(), 0);
            for (std::size_t d = 0; d < wstats[i].depth_histogram.size(); ++d)
                stats.depth_histogram[d] += wstats[i].depth_histogram[d];
            for (auto& sol : wsols[i]) sols.push_back(std::move(sol));
        }
        finished = !stats.exhausted_budget;
    }

    SearchResult result;
    result.stats = stats;
    result.stats.completed = finished;

    for (const auto& rows : sols) {
        std::vector<SubspaceId> members;
        members.reserve(rows.size() + (fix_first ? 1 : 0));
        if (fix_first) members.push_back(inst.candidates[0]);
        for (std::uint32_t r : rows) members.push_back(inst.candidates[r]);
        std::sort(members.begin(), members.end());
        result.solutions.push_back(std::move(members));
    }
    std::sort(result.solutions.begin(), result.solutions.end());
    if (cfg.solution_limit && result.solutions.size() > cfg.solution_limit)
        result.solutions.resize(cfg.solution_limit);
    result.stats.solutions = result.solutions.size();

    // spread instances: every emitted solution must verify
    if (static_cast<std::uint64_t>(inst.universe.size()) == lat.count(inst.s)) {
        for (const auto& members : result.solutions) {
            SpreadCandidate c{inst.n, inst.s, inst.t, lat.full_space_id(), members};
            if (verify_spread(lat, c)) throw std::logic_error("solver produced an invalid spread");
        }
    }
    result.stats.millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    return result;
}

}  // namespace gfspread
