#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochgeo/config.hpp"
#include "stochgeo/geometry.hpp"

namespace stochgeo {

/// Undirected edge between two point indices, endpoints stored with u < v,
/// length equal to the Euclidean distance between the indexed points.
struct Edge {
    std::uint32_t u = 0, v = 0;
    double length = 0.0;

    Edge() = default;
    Edge(std::uint32_t a, std::uint32_t b, double len);

    bool operator==(const Edge&) const = default;
};

/// Edge weight phi applied to edge lengths. The truncated form is
/// psi(x) * 1(x <= r) with psi non-decreasing (a power or a monotone table).
struct WeightFunction {
    enum class Kind { Identity, Power, IndicatorLe, Truncated };

    Kind kind = Kind::Identity;
    double exponent = 1.0;                              // Power / Truncated-with-power
    double cutoff = std::numeric_limits<double>::infinity();  // IndicatorLe / Truncated
    std::vector<std::pair<double, double>> table;       // Truncated-with-table, non-decreasing

    static WeightFunction identity() { return {}; }
    static WeightFunction power(double alpha);
    static WeightFunction indicator_le(double r);
    static WeightFunction truncated_power(double alpha, double r);
    static WeightFunction truncated_table(std::vector<std::pair<double, double>> tbl, double r);

    double operator()(double x) const;
};

/// Spanning tree over a point configuration: edge count = size - 1 (0 if the
/// configuration has at most one point). Immutable.
struct WeightedTree {
    PointConfiguration base;
    std::vector<Edge> edges;

    std::size_t size() const { return base.size(); }
    double total_weight(const WeightFunction& w) const;
    std::vector<std::vector<std::uint32_t>> adjacency() const;  // neighbor point indices
};

/// On-line nearest neighbour graph of a time-marked configuration: after
/// sorting by mark, each vertex k >= 2 is linked to its nearest neighbour
/// among vertices 1..k-1 (which joins the first two vertices as a special
/// case). Edge endpoints refer to the original configuration indices.
WeightedTree build_onng(const PointConfiguration& config);

/// Sum over vertices in `window` of phi(|e|) over their incident edges; an
/// edge with both endpoints in the window contributes twice. (Whether edges
/// straddling the window boundary should instead be half-weighted is a
/// convention choice; this is the literal double sum.)
double onng_length(const WeightedTree& tree, const WeightFunction& w, const Window& window);

/// Exact Euclidean MST. Unique when inter-point distances are distinct; ties
/// are broken lexicographically on (length, endpoint indices). Uses the
/// complete edge set up to kCompleteGraphCutoff points and a k-NN candidate
/// graph above, re-running with doubled k whenever the candidate graph fails
/// to connect.
WeightedTree build_mst_kruskal(const PointConfiguration& config);

constexpr std::size_t kCompleteGraphCutoff = 2000;

/// Sum of phi(|e|) over tree edges.
double mst_length(const WeightedTree& tree, const WeightFunction& w);

/// One add-and-delete step: candidate edge `added` = {x, y_i} closed a cycle
/// and `removed` was its longest edge. When the candidate itself is longest,
/// removed == added and the tree is unchanged. Step 0 is the initial
/// attachment and has no removal (removed mirrors added there).
struct InsertStep {
    Edge added;
    Edge removed;
    bool changed = false;
};

struct InsertionTrace {
    std::vector<InsertStep> steps;
};

/// Incremental MST update: attaches `new_point` to the tree and restores
/// minimality by the add-and-delete sweep over candidate edges {x, y} for
/// every base vertex y, in base-index order. The new point gets index
/// base.size() in the returned tree. Cycle maxima are found by tree walks
/// from the new vertex, recomputed after each swap; no link-cut structures.
std::pair<WeightedTree, InsertionTrace> mst_insert(const WeightedTree& tree, std::span<const double> new_point);

/// As mst_insert but restricted to the given candidate vertex list (used by
/// the paired two-scale diagnostics, where both runs must process the same
/// candidates in the same order). The result is the true MST of the augmented
/// set only when the candidate list provably covers every edge that can touch
/// the new point (e.g. under a wall event).
std::pair<WeightedTree, InsertionTrace> mst_insert_candidates(const WeightedTree& tree,
                                                              std::span<const double> new_point,
                                                              std::span<const std::uint32_t> candidates);

struct MinimaxReport {
    bool pass = true;
    bool exhaustive = true;
    std::optional<std::pair<std::uint32_t, std::uint32_t>> witness;
    std::string detail;
};

/// Checks the minimax property: for each vertex pair, the maximal edge on the
/// tree path must not exceed the minimax over all paths in the complete
/// graph. Exact (dynamic-programming closure over all pairs) up to
/// `exhaustive_limit` points; above it compares against `sampled_paths`
/// random alternative paths per pair.
MinimaxReport verify_minimax(const WeightedTree& tree, std::size_t exhaustive_limit = 12,
                             std::size_t sampled_paths = 1000, SeedState seed = {9937, 0});

int max_degree(const WeightedTree& tree);

/// Connected components of the fixed-radius geometric graph: two points are
/// adjacent iff their distance is <= r. Labels are consecutive ids in order
/// of first appearance.
struct ComponentLabeling {
    std::vector<std::uint32_t> labels;
    std::size_t count = 0;
};

ComponentLabeling geometric_components(const PointConfiguration& config, double r);

/// Number of distinct components of `labeling` with a point within r of q.
std::size_t adjacent_component_count(const PointConfiguration& config, const ComponentLabeling& labeling,
                                     std::span<const double> q, double r);

}  // namespace stochgeo
