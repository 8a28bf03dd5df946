#include "stochgeo/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "stochgeo/rng.hpp"
#include "stochgeo/spatial_index.hpp"

namespace stochgeo {

Edge::Edge(std::uint32_t a, std::uint32_t b, double len) : u(std::min(a, b)), v(std::max(a, b)), length(len) {
    if (a == b) throw std::invalid_argument("edge endpoints must differ");
}

WeightFunction WeightFunction::power(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("power weight needs alpha > 0");
    WeightFunction w;
    w.kind = Kind::Power;
    w.exponent = alpha;
    return w;
}

WeightFunction WeightFunction::indicator_le(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("indicator weight needs r > 0");
    WeightFunction w;
    w.kind = Kind::IndicatorLe;
    w.cutoff = r;
    return w;
}

WeightFunction WeightFunction::truncated_power(double alpha, double r) {
    if (!(alpha > 0.0) || !(r > 0.0)) throw std::invalid_argument("truncated weight needs alpha > 0, r > 0");
    WeightFunction w;
    w.kind = Kind::Truncated;
    w.exponent = alpha;
    w.cutoff = r;
    return w;
}

WeightFunction WeightFunction::truncated_table(std::vector<std::pair<double, double>> tbl, double r) {
    if (tbl.empty() || !(r > 0.0)) throw std::invalid_argument("table weight needs entries and r > 0");
    for (std::size_t i = 0; i + 1 < tbl.size(); ++i)
        if (tbl[i].first >= tbl[i + 1].first || tbl[i].second > tbl[i + 1].second)
            throw std::invalid_argument("weight table must be strictly increasing in x and non-decreasing in value");
    for (auto& [x, y] : tbl)
        if (x < 0.0 || y < 0.0) throw std::invalid_argument("weight table entries must be nonnegative");
    WeightFunction w;
    w.kind = Kind::Truncated;
    w.cutoff = r;
    w.table = std::move(tbl);
    return w;
}

double WeightFunction::operator()(double x) const {
    if (x < 0.0) throw std::invalid_argument("edge weight argument must be >= 0");
    switch (kind) {
        case Kind::Identity: return x;
        case Kind::Power: return std::pow(x, exponent);
        case Kind::IndicatorLe: return x <= cutoff ? 1.0 : 0.0;
        case Kind::Truncated: {
            if (x > cutoff) return 0.0;
            if (table.empty()) return std::pow(x, exponent);
            // Step evaluation: value of the last table node <= x, 0 before the first.
            auto it = std::upper_bound(table.begin(), table.end(), x,
                                       [](double q, const std::pair<double, double>& e) { return q < e.first; });
            if (it == table.begin()) return 0.0;
            return std::prev(it)->second;
        }
    }
    return 0.0;
}

double WeightedTree::total_weight(const WeightFunction& w) const {
    double s = 0.0;
    for (const Edge& e : edges) s += w(e.length);
    return s;
}

std::vector<std::vector<std::uint32_t>> WeightedTree::adjacency() const {
    std::vector<std::vector<std::uint32_t>> adj(base.size());
    for (const Edge& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

// ---------------------------------------------------------------------------
// ONNG

WeightedTree build_onng(const PointConfiguration& config) {
    if (config.mark_kind() != MarkKind::Time) throw std::invalid_argument("ONNG needs time marks");
    const std::size_t n = config.size();
    WeightedTree tree{config, {}};
    if (n <= 1) return tree;

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (config.mark_value(a) != config.mark_value(b)) return config.mark_value(a) < config.mark_value(b);
        if (lex_less(config.point(a), config.point(b))) return true;
        if (lex_less(config.point(b), config.point(a))) return false;
        return a < b;
    });

    std::vector<std::uint32_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = static_cast<std::uint32_t>(k);

    SpatialIndex index(config);
    tree.edges.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        const std::uint32_t me = order[k];
        const long nn = index.nearest(config.point(me), [&](std::size_t j) { return rank[j] < k; });
        const auto j = static_cast<std::uint32_t>(nn);
        tree.edges.emplace_back(me, j, euclid_dist(config.point(me), config.point(j)));
    }
    return tree;
}

double onng_length(const WeightedTree& tree, const WeightFunction& w, const Window& window) {
    if (window.dim() != tree.base.dim()) throw std::invalid_argument("onng_length: dimension mismatch");
    double s = 0.0;
    for (const Edge& e : tree.edges) {
        const double we = w(e.length);
        if (window.contains(tree.base.point(e.u))) s += we;
        if (window.contains(tree.base.point(e.v))) s += we;
    }
    return s;
}

// ---------------------------------------------------------------------------
// MST

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> rank_;

    explicit UnionFind(std::size_t n) : parent(n), rank_(n, 0) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }
};

bool edge_less(const PointConfiguration& config, const Edge& a, const Edge& b) {
    if (a.length != b.length) return a.length < b.length;
    // Lexicographic on endpoint points, then indices; stable on ties.
    const auto au = config.point(a.u), bu = config.point(b.u);
    if (lex_less(au, bu)) return true;
    if (lex_less(bu, au)) return false;
    const auto av = config.point(a.v), bv = config.point(b.v);
    if (lex_less(av, bv)) return true;
    if (lex_less(bv, av)) return false;
    return std::make_pair(a.u, a.v) < std::make_pair(b.u, b.v);
}

WeightedTree kruskal_from_edges(const PointConfiguration& config, std::vector<Edge>& candidates,
                                bool* connected) {
    const std::size_t n = config.size();
    std::sort(candidates.begin(), candidates.end(),
              [&](const Edge& a, const Edge& b) { return edge_less(config, a, b); });
    WeightedTree tree{config, {}};
    UnionFind uf(n);
    std::size_t used = 0;
    for (const Edge& e : candidates) {
        if (uf.unite(e.u, e.v)) {
            tree.edges.push_back(e);
            if (++used == n - 1) break;
        }
    }
    *connected = n <= 1 || used == n - 1;
    return tree;
}

}  // namespace

WeightedTree build_mst_kruskal(const PointConfiguration& config) {
    const std::size_t n = config.size();
    if (n <= 1) return WeightedTree{config, {}};

    if (n <= kCompleteGraphCutoff) {
        std::vector<Edge> candidates;
        candidates.reserve(n * (n - 1) / 2);
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j)
                candidates.emplace_back(i, j, euclid_dist(config.point(i), config.point(j)));
        bool connected = false;
        return kruskal_from_edges(config, candidates, &connected);
    }

    SpatialIndex index(config);
    for (std::size_t k = 16; k < 2 * n; k *= 2) {
        std::vector<Edge> candidates;
        candidates.reserve(n * k);
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::size_t j : index.knn(config.point(i), std::min(k + 1, n))) {
                if (j == i) continue;
                if (j > i)
                    candidates.emplace_back(i, static_cast<std::uint32_t>(j),
                                            euclid_dist(config.point(i), config.point(j)));
                else
                    candidates.emplace_back(static_cast<std::uint32_t>(j), i,
                                            euclid_dist(config.point(i), config.point(j)));
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const Edge& a, const Edge& b) {
            return std::tie(a.u, a.v) < std::tie(b.u, b.v);
        });
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        bool connected = false;
        WeightedTree tree = kruskal_from_edges(config, candidates, &connected);
        if (connected) return tree;
    }
    throw std::runtime_error("mst: candidate graph failed to connect");  // unreachable: k reaches n
}

double mst_length(const WeightedTree& tree, const WeightFunction& w) { return tree.total_weight(w); }

// ---------------------------------------------------------------------------
// Incremental insertion (add-and-delete)

namespace {

/// Tree scratch for insertion: adjacency with edge lengths, plus per-vertex
/// max-edge-on-path-from-x data recomputed after each swap.
struct InsertScratch {
    std::size_t n = 0;  // vertices including x at index n-1
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
    // max edge along the path from x; (length, canonical endpoints) of the argmax edge
    std::vector<double> max_len;
    std::vector<std::uint32_t> max_u, max_v;
    std::vector<std::uint32_t> bfs;

    void remove_edge(std::uint32_t a, std::uint32_t b) {
        auto drop = [&](std::uint32_t from, std::uint32_t to) {
            auto& lst = adj[from];
            for (std::size_t i = 0; i < lst.size(); ++i)
                if (lst[i].first == to) {
                    lst[i] = lst.back();
                    lst.pop_back();
                    return;
                }
        };
        drop(a, b);
        drop(b, a);
    }

    void add_edge(std::uint32_t a, std::uint32_t b, double len) {
        adj[a].emplace_back(b, len);
        adj[b].emplace_back(a, len);
    }

    void recompute_from(std::uint32_t x) {
        max_len.assign(n, -1.0);
        max_u.assign(n, 0);
        max_v.assign(n, 0);
        bfs.clear();
        bfs.push_back(x);
        max_len[x] = 0.0;
        for (std::size_t head = 0; head < bfs.size(); ++head) {
            const std::uint32_t cur = bfs[head];
            for (auto [nb, len] : adj[cur]) {
                if (max_len[nb] >= 0.0) continue;
                if (len > max_len[cur]) {
                    max_len[nb] = len;
                    max_u[nb] = std::min(cur, nb);
                    max_v[nb] = std::max(cur, nb);
                } else {
                    max_len[nb] = max_len[cur];
                    max_u[nb] = max_u[cur];
                    max_v[nb] = max_v[cur];
                }
                bfs.push_back(nb);
            }
        }
    }
};

std::pair<WeightedTree, InsertionTrace> insert_impl(const WeightedTree& tree, std::span<const double> new_point,
                                                    std::span<const std::uint32_t> candidates) {
    const std::size_t nbase = tree.base.size();
    check_finite(new_point);
    if (tree.base.mark_kind() != MarkKind::None)
        throw std::invalid_argument("mst_insert: marked configurations not supported");
    if (tree.base.contains_point(new_point)) throw std::invalid_argument("mst_insert: duplicate point");

    PointConfiguration augmented = add_point(tree.base, new_point, Mark::none());

    InsertionTrace trace;
    if (nbase == 0) return {WeightedTree{augmented, {}}, trace};

    const auto x = static_cast<std::uint32_t>(nbase);
    InsertScratch s;
    s.n = nbase + 1;
    s.adj.resize(s.n);
    for (const Edge& e : tree.edges) s.add_edge(e.u, e.v, e.length);

    auto dist_to_x = [&](std::uint32_t i) { return euclid_dist(augmented.point(i), new_point); };

    // Step 1: attach x through the first candidate.
    const std::uint32_t first = candidates[0];
    s.add_edge(x, first, dist_to_x(first));
    trace.steps.push_back({Edge(x, first, dist_to_x(first)), Edge(x, first, dist_to_x(first)), true});
    s.recompute_from(x);

    // Step 2: remaining candidates close a cycle; drop its longest edge.
    for (std::size_t ci = 1; ci < candidates.size(); ++ci) {
        const std::uint32_t y = candidates[ci];
        const double elen = dist_to_x(y);
        const Edge added(x, y, elen);
        const double path_max = s.max_len[y];
        bool swap = path_max > elen;
        if (path_max == elen) {
            // Tie: keep the lexicographically smaller edge, matching Kruskal.
            const Edge cur(s.max_u[y], s.max_v[y], path_max);
            swap = edge_less(augmented, added, cur);
        }
        if (swap) {
            const Edge removed(s.max_u[y], s.max_v[y], path_max);
            s.remove_edge(removed.u, removed.v);
            s.add_edge(x, y, elen);
            trace.steps.push_back({added, removed, true});
            s.recompute_from(x);
        } else {
            trace.steps.push_back({added, added, false});
        }
    }

    WeightedTree out{augmented, {}};
    out.edges.reserve(nbase);
    for (std::uint32_t i = 0; i < s.n; ++i)
        for (auto [nb, len] : s.adj[i])
            if (nb > i) out.edges.emplace_back(i, nb, len);
    std::sort(out.edges.begin(), out.edges.end(),
              [&](const Edge& a, const Edge& b) { return edge_less(augmented, a, b); });
    return {std::move(out), std::move(trace)};
}

}  // namespace

std::pair<WeightedTree, InsertionTrace> mst_insert(const WeightedTree& tree, std::span<const double> new_point) {
    std::vector<std::uint32_t> all(tree.base.size());
    std::iota(all.begin(), all.end(), 0u);
    return insert_impl(tree, new_point, all);
}

std::pair<WeightedTree, InsertionTrace> mst_insert_candidates(const WeightedTree& tree,
                                                              std::span<const double> new_point,
                                                              std::span<const std::uint32_t> candidates) {
    if (candidates.empty()) throw std::invalid_argument("mst_insert_candidates: empty candidate list");
    return insert_impl(tree, new_point, candidates);
}

// ---------------------------------------------------------------------------
// Minimax / degree / components

namespace {

/// Minimax closure over the complete graph: mm[i][j] = min over paths of the
/// maximal edge length. Exact for all pairs.
std::vector<std::vector<double>> minimax_closure(const PointConfiguration& config) {
    const std::size_t n = config.size();
    std::vector<std::vector<double>> mm(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            mm[i][j] = mm[j][i] = euclid_dist(config.point(i), config.point(j));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                mm[i][j] = std::min(mm[i][j], std::max(mm[i][k], mm[k][j]));
    return mm;
}

std::vector<std::vector<double>> tree_path_max(const WeightedTree& tree) {
    const std::size_t n = tree.size();
    auto adj = tree.adjacency();
    std::vector<std::vector<double>> pm(n, std::vector<double>(n, 0.0));
    for (std::size_t root = 0; root < n; ++root) {
        std::vector<char> seen(n, 0);
        std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(root)};
        seen[root] = 1;
        std::vector<double> best(n, 0.0);
        while (!stack.empty()) {
            const std::uint32_t cur = stack.back();
            stack.pop_back();
            for (std::uint32_t nb : adj[cur]) {
                if (seen[nb]) continue;
                seen[nb] = 1;
                const double len = euclid_dist(tree.base.point(cur), tree.base.point(nb));
                best[nb] = std::max(best[cur], len);
                pm[root][nb] = best[nb];
                stack.push_back(nb);
            }
        }
    }
    return pm;
}

}  // namespace

MinimaxReport verify_minimax(const WeightedTree& tree, std::size_t exhaustive_limit, std::size_t sampled_paths,
                             SeedState seed) {
    const std::size_t n = tree.size();
    MinimaxReport rep;
    if (n <= 2) {
        rep.detail = "trivial";
        return rep;
    }
    auto pm = tree_path_max(tree);
    constexpr double kTol = 1e-12;
    if (n <= exhaustive_limit) {
        auto mm = minimax_closure(tree.base);
        for (std::uint32_t i = 0; i < n && rep.pass; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j)
                if (pm[i][j] > mm[i][j] * (1.0 + kTol)) {
                    rep.pass = false;
                    rep.witness = {i, j};
                    rep.detail = "tree path max exceeds complete-graph minimax";
                    break;
                }
        return rep;
    }
    // Sampled mode: random alternative simple paths must not beat the tree path.
    rep.exhaustive = false;
    Rng rng(seed);
    for (std::size_t trial = 0; trial < sampled_paths; ++trial) {
        const auto i = static_cast<std::uint32_t>(rng.next_u64() % n);
        auto j = static_cast<std::uint32_t>(rng.next_u64() % n);
        while (j == i) j = static_cast<std::uint32_t>(rng.next_u64() % n);
        // Random simple path i -> j through up to 4 intermediate vertices.
        std::vector<std::uint32_t> path{i};
        const std::size_t hops = 1 + rng.next_u64() % 4;
        for (std::size_t h = 0; h < hops; ++h) {
            auto v = static_cast<std::uint32_t>(rng.next_u64() % n);
            if (v != j && std::find(path.begin(), path.end(), v) == path.end()) path.push_back(v);
        }
        path.push_back(j);
        double alt = 0.0;
        for (std::size_t h = 0; h + 1 < path.size(); ++h)
            alt = std::max(alt, euclid_dist(tree.base.point(path[h]), tree.base.point(path[h + 1])));
        if (pm[i][j] > alt * (1.0 + kTol)) {
            rep.pass = false;
            rep.witness = {i, j};
            rep.detail = "sampled path beats tree path";
            return rep;
        }
    }
    return rep;
}

int max_degree(const WeightedTree& tree) {
    std::vector<int> deg(tree.size(), 0);
    for (const Edge& e : tree.edges) {
        ++deg[e.u];
        ++deg[e.v];
    }
    int m = 0;
    for (int d : deg) m = std::max(m, d);
    return m;
}

ComponentLabeling geometric_components(const PointConfiguration& config, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("geometric_components needs r > 0");
    const std::size_t n = config.size();
    UnionFind uf(n);
    SpatialIndex index(config);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::size_t j : index.radius_indices(config.point(i), r))
            if (j > i) uf.unite(i, static_cast<std::uint32_t>(j));
    ComponentLabeling lab;
    lab.labels.assign(n, 0);
    std::vector<std::int64_t> remap(n, -1);
    std::size_t next = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t root = uf.find(i);
        if (remap[root] < 0) remap[root] = static_cast<std::int64_t>(next++);
        lab.labels[i] = static_cast<std::uint32_t>(remap[root]);
    }
    lab.count = next;
    return lab;
}

std::size_t adjacent_component_count(const PointConfiguration& config, const ComponentLabeling& labeling,
                                     std::span<const double> q, double r) {
    SpatialIndex index(config);
    std::vector<std::uint32_t> seen;
    for (std::size_t j : index.radius_indices(q, r)) {
        const std::uint32_t lab = labeling.labels[j];
        if (std::find(seen.begin(), seen.end(), lab) == seen.end()) seen.push_back(lab);
    }
    return seen.size();
}

}  // namespace stochgeo
