#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stochgeo/config.hpp"

namespace stochgeo {

/// Static spatial index over a point set: nearest-neighbour (optionally under
/// a per-point predicate), k-NN and radius queries. Uses a kd-tree above
/// kBruteForceCutoff points and a linear scan below it; the crossover was
/// picked by the micro-benchmark in tools (see README), not assumed.
///
/// Borrows the coordinate storage: the indexed configuration must outlive the
/// index. Distance ties are broken by lexicographic point order, then index,
/// so results are deterministic even on hand-built degenerate inputs.
class SpatialIndex {
public:
    static constexpr std::size_t kBruteForceCutoff = 64;

    SpatialIndex() = default;
    explicit SpatialIndex(const PointConfiguration& config);
    SpatialIndex(const double* coords, std::size_t n, std::size_t dim);

    std::size_t size() const { return n_; }

    /// Index of the nearest point to `q` among those accepted by `pred`
    /// (all points if pred is empty); -1 if none qualify. Points exactly at
    /// `q` are included.
    long nearest(std::span<const double> q, const std::function<bool(std::size_t)>& pred = {}) const;

    /// Indices of points with ||p - q|| <= r, in increasing index order.
    std::vector<std::size_t> radius_indices(std::span<const double> q, double r) const;

    /// The k nearest points to q, closest first.
    std::vector<std::size_t> knn(std::span<const double> q, std::size_t k) const;

    bool any_within(std::span<const double> q, double r) const;

private:
    struct Node {
        int axis = -1;          // -1 marks a leaf
        double split = 0.0;
        std::size_t begin = 0, end = 0;  // leaf range into order_
        int left = -1, right = -1;
    };

    std::size_t n_ = 0, dim_ = 0;
    const double* coords_ = nullptr;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
    bool brute_ = true;

    std::span<const double> pt(std::size_t i) const { return {coords_ + i * dim_, dim_}; }
    int build(std::size_t begin, std::size_t end, std::vector<double>& lo, std::vector<double>& hi);
    void init();
    bool better(std::size_t cand, double cand_d2, long best, double best_d2, std::span<const double> q) const;
};

}  // namespace stochgeo
