#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "stochgeo/config.hpp"
#include "stochgeo/graphs.hpp"

using namespace stochgeo;

namespace {

PointConfiguration make_config(const std::vector<Point>& pts, const std::vector<double>& times = {}) {
    PointConfiguration c(pts[0].size(), times.empty() ? MarkKind::None : MarkKind::Time);
    for (std::size_t i = 0; i < pts.size(); ++i)
        c.append_unchecked(pts[i], times.empty() ? Mark::none() : Mark::time(times[i]));
    return c;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const WeightedTree& t) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> s;
    for (const Edge& e : t.edges) s.insert({e.u, e.v});
    return s;
}

bool is_spanning_tree(const WeightedTree& t) {
    const std::size_t n = t.size();
    if (n <= 1) return t.edges.empty();
    if (t.edges.size() != n - 1) return false;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : t.edges) {
        const auto a = find(e.u), b = find(e.v);
        if (a == b) return false;  // cycle
        parent[a] = b;
    }
    return true;
}

const PointConfiguration kChain = make_config({{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}});

}  // namespace

TEST_CASE("onng follows the arrival procedure") {
    const auto c = make_config({{0.0, 0.0}, {5.0, 0.0}, {1.0, 0.0}}, {0.1, 0.2, 0.3});
    const auto tree = build_onng(c);
    REQUIRE(tree.edges.size() == 2);
    CHECK(edge_set(tree) == std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {0, 2}});
    CHECK(tree.edges[0].length == doctest::Approx(5.0));
    CHECK(tree.edges[1].length == doctest::Approx(1.0));
}

TEST_CASE("onng degenerate sizes") {
    PointConfiguration empty(2, MarkKind::Time);
    CHECK(build_onng(empty).edges.empty());
    const auto single = make_config({{1.0, 1.0}}, {0.5});
    CHECK(build_onng(single).edges.empty());
    CHECK_THROWS_AS(build_onng(kChain), std::invalid_argument);  // needs time marks
}

TEST_CASE("onng on sampled configurations is a tree attaching to earlier marks") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = sample_marked_poisson(Region::centered_cube(2, 6.0), 1.0, MarkKind::Time,
                                             {101, static_cast<std::uint64_t>(trial)});
        if (c.size() < 2) continue;
        const auto tree = build_onng(c);
        CHECK(tree.edges.size() == c.size() - 1);
        CHECK(is_spanning_tree(tree));
        // each edge after sorting joins a vertex to a strictly earlier-marked one,
        // except the first two which are mutually joined
        std::vector<std::uint32_t> order(c.size());
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](auto a, auto b) { return c.mark_value(a) < c.mark_value(b); });
        std::vector<std::size_t> rank(c.size());
        for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
        for (const Edge& e : tree.edges) {
            const auto child = rank[e.u] > rank[e.v] ? e.u : e.v;
            const auto parent = rank[e.u] > rank[e.v] ? e.v : e.u;
            CHECK(c.mark_value(parent) < c.mark_value(child));
        }
    }
}

TEST_CASE("onng length is the literal double sum") {
    const auto c = make_config({{0.0, 0.0}, {5.0, 0.0}, {1.0, 0.0}}, {0.1, 0.2, 0.3});
    const auto tree = build_onng(c);
    const Window whole(Region::centered_cube(2, 10.0));
    CHECK(onng_length(tree, WeightFunction::identity(), whole) == doctest::Approx(12.0));
    // window away from all points
    CHECK(onng_length(tree, WeightFunction::identity(), Window(Region::cube({50.0, 0.0}, 1.0))) == 0.0);
    // zero weight function via a zero table
    const auto zero = WeightFunction::truncated_table({{0.0, 0.0}}, 100.0);
    CHECK(onng_length(tree, zero, whole) == 0.0);
    // window holding only vertex 0 counts each incident edge once
    CHECK(onng_length(tree, WeightFunction::identity(), Window(Region::cube({0.0, 0.0}, 0.5))) ==
          doctest::Approx(6.0));
}

TEST_CASE("kruskal mst on hand configurations") {
    const auto tree = build_mst_kruskal(kChain);
    CHECK(mst_length(tree, WeightFunction::identity()) == doctest::Approx(3.0));
    CHECK(edge_set(tree) == std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {1, 2}});

    const auto square = make_config({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
    const auto sq_tree = build_mst_kruskal(square);
    CHECK(oracle::brute_spanning_tree_count(square) == 16);
    CHECK(mst_length(sq_tree, WeightFunction::identity()) == doctest::Approx(oracle::brute_mst_total(square)));
    CHECK(mst_length(sq_tree, WeightFunction::identity()) == doctest::Approx(3.0));
    const int deg = max_degree(sq_tree);
    CHECK(deg >= 2);
    CHECK(deg <= 3);
}

TEST_CASE("kruskal total matches brute enumeration on random configs") {
    for (int trial = 0; trial < 30; ++trial) {
        auto c = sample_poisson(Region::centered_cube(2, 1.3), 1.0, {202, static_cast<std::uint64_t>(trial)});
        if (c.size() < 2 || c.size() > 6) continue;
        const auto tree = build_mst_kruskal(c);
        CHECK(is_spanning_tree(tree));
        CHECK(mst_length(tree, WeightFunction::identity()) == doctest::Approx(oracle::brute_mst_total(c)));
    }
}

TEST_CASE("mst never exceeds the onng length on the same points") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto marked = sample_marked_poisson(Region::centered_cube(2, 5.0), 1.0, MarkKind::Time,
                                                  {203, static_cast<std::uint64_t>(trial)});
        if (marked.size() < 2) continue;
        PointConfiguration plain(2);
        for (std::size_t i = 0; i < marked.size(); ++i) plain.append_unchecked(marked.point(i), Mark::none());
        const double mst = mst_length(build_mst_kruskal(plain), WeightFunction::identity());
        const double onng = build_onng(marked).total_weight(WeightFunction::identity());
        CHECK(mst <= onng + 1e-12);
    }
}

TEST_CASE("mst weights with truncation and powers") {
    const auto tree = build_mst_kruskal(kChain);
    CHECK(mst_length(tree, WeightFunction::indicator_le(1.5)) == doctest::Approx(1.0));
    CHECK(mst_length(tree, WeightFunction::power(2.0)) == doctest::Approx(5.0));
    CHECK(mst_length(tree, WeightFunction::truncated_power(1.0, 1.5)) == doctest::Approx(1.0));
}

TEST_CASE("mst_insert examples") {
    SUBCASE("chain insertion removes the long edge") {
        const auto tree = build_mst_kruskal(kChain);
        const auto [augmented, trace] = mst_insert(tree, Point{2.0, 0.0});
        CHECK(mst_length(augmented, WeightFunction::identity()) == doctest::Approx(3.0));
        for (const Edge& e : augmented.edges) CHECK(e.length == doctest::Approx(1.0));
        bool removed_long = false;
        for (const auto& step : trace.steps)
            if (step.changed && step.removed.length == doctest::Approx(2.0) && step.removed != step.added)
                removed_long = true;
        CHECK(removed_long);
    }
    SUBCASE("insert into empty and singleton") {
        PointConfiguration empty(2);
        const auto [t0, tr0] = mst_insert(WeightedTree{empty, {}}, Point{1.0, 1.0});
        CHECK(t0.edges.empty());
        CHECK(t0.size() == 1);
        PointConfiguration single(2);
        single.append_unchecked(Point{0.0, 0.0}, Mark::none());
        const auto [t1, tr1] = mst_insert(WeightedTree{single, {}}, Point{1.0, 0.0});
        REQUIRE(t1.edges.size() == 1);
        CHECK(t1.edges[0].length == doctest::Approx(1.0));
    }
    SUBCASE("duplicate point rejected") {
        const auto tree = build_mst_kruskal(kChain);
        CHECK_THROWS_AS(mst_insert(tree, Point{1.0, 0.0}), std::invalid_argument);
    }
}

TEST_CASE("mst_insert equals batch kruskal on random instances") {
    Rng rng({204, 0});
    int tested = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Region window = Region::centered_cube(trial % 2 ? 3 : 2, 3.0);
        auto c = sample_poisson(window, 1.0, {205, static_cast<std::uint64_t>(trial)});
        if (c.size() < 2) continue;
        const Point x = rng.point_in(window);
        const auto base = build_mst_kruskal(c);
        const auto [incremental, trace] = mst_insert(base, x);
        const auto batch = build_mst_kruskal(add_point(c, x, Mark::none()));
        CHECK(edge_set(incremental) == edge_set(batch));
        ++tested;
    }
    CHECK(tested > 80);
}

TEST_CASE("minimax verification") {
    SUBCASE("random mst passes exhaustively and the dp matches literal enumeration") {
        for (int trial = 0; trial < 15; ++trial) {
            auto c = sample_poisson(Region::centered_cube(2, 1.5), 1.0, {206, static_cast<std::uint64_t>(trial)});
            if (c.size() < 3 || c.size() > 8) continue;
            const auto tree = build_mst_kruskal(c);
            const auto rep = verify_minimax(tree);
            CHECK(rep.pass);
            CHECK(rep.exhaustive);
            // literal path enumeration agrees with the tree-path maxima
            const auto mm = oracle::enumerate_minimax(c);
            const auto adj = tree.adjacency();
            // tree path max must equal complete-graph minimax for an MST
            for (std::size_t i = 0; i < c.size(); ++i)
                for (std::size_t j = i + 1; j < c.size(); ++j) {
                    // recompute tree path max by DFS
                    std::vector<double> best(c.size(), -1.0);
                    std::vector<std::size_t> stack{i};
                    best[i] = 0.0;
                    while (!stack.empty()) {
                        const auto cur = stack.back();
                        stack.pop_back();
                        for (auto nb : adj[cur])
                            if (best[nb] < 0.0) {
                                best[nb] = std::max(best[cur], oracle::edge_len(c, cur, nb));
                                stack.push_back(nb);
                            }
                    }
                    CHECK(best[j] == doctest::Approx(mm[i][j]));
                }
        }
    }
    SUBCASE("corrupted tree fails with a witness") {
        auto c = sample_poisson(Region::centered_cube(2, 1.6), 1.2, {207, 3});
        REQUIRE(c.size() >= 4);
        auto tree = build_mst_kruskal(c);
        // swap one tree edge for the longest non-tree edge, keeping a spanning tree
        const auto tree_edges = edge_set(tree);
        Edge longest(0, 1, -1.0);
        for (std::uint32_t i = 0; i < c.size(); ++i)
            for (std::uint32_t j = i + 1; j < c.size(); ++j)
                if (!tree_edges.count({i, j})) {
                    const double len = oracle::edge_len(c, i, j);
                    if (len > longest.length) longest = Edge(i, j, len);
                }
        REQUIRE(longest.length > 0.0);
        // remove the max edge on the tree path between its endpoints, add it
        auto adj = tree.adjacency();
        std::vector<long> parent(c.size(), -1);
        std::vector<std::size_t> stack{longest.u};
        parent[longest.u] = longest.u;
        while (!stack.empty()) {
            const auto cur = stack.back();
            stack.pop_back();
            for (auto nb : adj[cur])
                if (parent[nb] < 0) {
                    parent[nb] = static_cast<long>(cur);
                    stack.push_back(nb);
                }
        }
        std::uint32_t walk = longest.v;
        Edge on_path(0, 1, -1.0);
        while (walk != longest.u) {
            const auto par = static_cast<std::uint32_t>(parent[walk]);
            const double len = oracle::edge_len(c, walk, par);
            if (len > on_path.length) on_path = Edge(walk, par, len);
            walk = par;
        }
        WeightedTree corrupted{c, {}};
        for (const Edge& e : tree.edges)
            if (!(e.u == on_path.u && e.v == on_path.v)) corrupted.edges.push_back(e);
        corrupted.edges.push_back(longest);
        REQUIRE(is_spanning_tree(corrupted));
        const auto rep = verify_minimax(corrupted);
        CHECK(!rep.pass);
        CHECK(rep.witness.has_value());
    }
    SUBCASE("two point tree passes vacuously") {
        const auto two = make_config({{0.0, 0.0}, {1.0, 0.0}});
        CHECK(verify_minimax(build_mst_kruskal(two)).pass);
    }
}

TEST_CASE("max degree on chain and star") {
    CHECK(max_degree(build_mst_kruskal(kChain)) == 2);
    const auto star = make_config({{0.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}});
    const auto tree = build_mst_kruskal(star);
    CHECK(mst_length(tree, WeightFunction::identity()) == doctest::Approx(oracle::brute_mst_total(star)));
    CHECK(max_degree(tree) == 4);
}

TEST_CASE("geometric components against the bfs oracle") {
    SUBCASE("hand cases") {
        const auto far = make_config({{0.0, 0.0}, {3.0, 0.0}, {0.0, 3.0}});
        CHECK(geometric_components(far, 1.0).count == 3);
        const auto chain = make_config({{0.0, 0.0}, {0.9, 0.0}, {1.8, 0.0}});
        CHECK(geometric_components(chain, 1.0).count == 1);
        CHECK_THROWS_AS(geometric_components(chain, 0.0), std::invalid_argument);
    }
    SUBCASE("random configurations across radii") {
        for (int trial = 0; trial < 8; ++trial) {
            const auto c = sample_poisson(Region::centered_cube(2, 3.0), 1.0, {208, static_cast<std::uint64_t>(trial)});
            if (c.empty()) continue;
            std::size_t prev = 0;
            bool first = true;
            for (double r : {0.2, 0.4, 0.8, 1.6, 3.0}) {
                const auto lab = geometric_components(c, r);
                CHECK(lab.count == oracle::bfs_component_count(c, r));
                if (!first) CHECK(lab.count <= prev);  // monotone in r
                prev = lab.count;
                first = false;
            }
        }
    }
}

TEST_CASE("weight table validation and evaluation") {
    CHECK_THROWS_AS(WeightFunction::truncated_table({}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightFunction::truncated_table({{0.0, 1.0}, {1.0, 0.5}}, 1.0), std::invalid_argument);
    const auto w = WeightFunction::truncated_table({{0.0, 0.0}, {1.0, 2.0}, {2.0, 3.0}}, 2.5);
    CHECK(w(0.5) == 0.0);
    CHECK(w(1.5) == 2.0);
    CHECK(w(2.2) == 3.0);
    CHECK(w(2.6) == 0.0);  // beyond the truncation level
    CHECK_THROWS_AS(w(-1.0), std::invalid_argument);
}

TEST_CASE("knn-candidate kruskal agrees with the complete graph at scale") {
    // above kCompleteGraphCutoff the builder switches to k-NN candidates;
    // check it against a test-local complete-graph Kruskal
    const Region window = Region::centered_cube(2, 25.0);  // ~2500 points
    const auto c = sample_poisson(window, 1.0, {209, 0});
    REQUIRE(c.size() > kCompleteGraphCutoff);
    const auto fast = build_mst_kruskal(c);

    struct Cand {
        std::uint32_t u, v;
        double len;
    };
    std::vector<Cand> all;
    all.reserve(c.size() * (c.size() - 1) / 2);
    for (std::uint32_t i = 0; i < c.size(); ++i)
        for (std::uint32_t j = i + 1; j < c.size(); ++j)
            all.push_back({i, j, euclid_dist(c.point(i), c.point(j))});
    std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) { return a.len < b.len; });
    std::vector<std::uint32_t> parent(c.size());
    std::iota(parent.begin(), parent.end(), 0u);
    std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    double total = 0.0;
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::size_t used = 0;
    for (const Cand& e : all) {
        const auto a = find(e.u), b = find(e.v);
        if (a == b) continue;
        parent[a] = b;
        total += e.len;
        edges.insert({e.u, e.v});
        if (++used == c.size() - 1) break;
    }
    CHECK(edge_set(fast) == edges);
    CHECK(mst_length(fast, WeightFunction::identity()) == doctest::Approx(total));
}
