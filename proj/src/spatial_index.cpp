#include "stochgeo/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stochgeo {

namespace {
constexpr std::size_t kLeafSize = 16;
}

SpatialIndex::SpatialIndex(const PointConfiguration& config)
    : n_(config.size()), dim_(config.dim()), coords_(config.flat_coords().data()) {
    init();
}

SpatialIndex::SpatialIndex(const double* coords, std::size_t n, std::size_t dim)
    : n_(n), dim_(dim), coords_(coords) {
    init();
}

void SpatialIndex::init() {
    order_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) order_[i] = i;
    brute_ = n_ < kBruteForceCutoff;
    if (brute_ || n_ == 0) return;
    std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t a = 0; a < dim_; ++a) {
            lo[a] = std::min(lo[a], pt(i)[a]);
            hi[a] = std::max(hi[a], pt(i)[a]);
        }
    nodes_.reserve(2 * n_ / kLeafSize + 2);
    build(0, n_, lo, hi);
}

int SpatialIndex::build(std::size_t begin, std::size_t end, std::vector<double>& lo, std::vector<double>& hi) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }
    // Split the widest axis at the median; deterministic comparator.
    std::size_t axis = 0;
    for (std::size_t a = 1; a < dim_; ++a)
        if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    const std::size_t mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                         if (pt(a)[axis] != pt(b)[axis]) return pt(a)[axis] < pt(b)[axis];
                         if (lex_less(pt(a), pt(b))) return true;
                         if (lex_less(pt(b), pt(a))) return false;
                         return a < b;
                     });
    const double split = pt(order_[mid])[axis];
    nodes_[id].axis = static_cast<int>(axis);
    nodes_[id].split = split;
    const double saved_hi = hi[axis];
    hi[axis] = split;
    const int l = build(begin, mid, lo, hi);
    hi[axis] = saved_hi;
    const double saved_lo = lo[axis];
    lo[axis] = split;
    const int r = build(mid, end, lo, hi);
    lo[axis] = saved_lo;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

bool SpatialIndex::better(std::size_t cand, double cand_d2, long best, double best_d2,
                          std::span<const double>) const {
    if (best < 0) return true;
    if (cand_d2 != best_d2) return cand_d2 < best_d2;
    const auto a = pt(cand), b = pt(static_cast<std::size_t>(best));
    if (lex_less(a, b)) return true;
    if (lex_less(b, a)) return false;
    return cand < static_cast<std::size_t>(best);
}

long SpatialIndex::nearest(std::span<const double> q, const std::function<bool(std::size_t)>& pred) const {
    long best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    auto consider = [&](std::size_t i) {
        if (pred && !pred(i)) return;
        const double d2 = sq_dist(pt(i), q);
        if (d2 < best_d2 || (d2 == best_d2 && better(i, d2, best, best_d2, q)))
            best = static_cast<long>(i), best_d2 = d2;
    };
    if (brute_) {
        for (std::size_t i = 0; i < n_; ++i) consider(i);
        return best;
    }
    if (n_ == 0) return -1;
    // Iterative DFS, near child first.
    std::vector<std::pair<int, double>> stack;
    stack.emplace_back(0, 0.0);
    while (!stack.empty()) {
        auto [id, plane_d2] = stack.back();
        stack.pop_back();
        if (plane_d2 > best_d2) continue;
        const Node& nd = nodes_[static_cast<std::size_t>(id)];
        if (nd.axis < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i) consider(order_[i]);
            continue;
        }
        const double delta = q[static_cast<std::size_t>(nd.axis)] - nd.split;
        const int near = delta < 0 ? nd.left : nd.right;
        const int far = delta < 0 ? nd.right : nd.left;
        stack.emplace_back(far, delta * delta);
        stack.emplace_back(near, plane_d2);
    }
    return best;
}

std::vector<std::size_t> SpatialIndex::radius_indices(std::span<const double> q, double r) const {
    std::vector<std::size_t> out;
    const double r2 = r * r;
    if (brute_) {
        for (std::size_t i = 0; i < n_; ++i)
            if (sq_dist(pt(i), q) <= r2) out.push_back(i);
        return out;
    }
    if (n_ == 0) return out;
    std::vector<std::pair<int, double>> stack;
    stack.emplace_back(0, 0.0);
    while (!stack.empty()) {
        auto [id, plane_d2] = stack.back();
        stack.pop_back();
        if (plane_d2 > r2) continue;
        const Node& nd = nodes_[static_cast<std::size_t>(id)];
        if (nd.axis < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i)
                if (sq_dist(pt(order_[i]), q) <= r2) out.push_back(order_[i]);
            continue;
        }
        const double delta = q[static_cast<std::size_t>(nd.axis)] - nd.split;
        const int near = delta < 0 ? nd.left : nd.right;
        const int far = delta < 0 ? nd.right : nd.left;
        stack.emplace_back(far, delta * delta);
        stack.emplace_back(near, plane_d2);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool SpatialIndex::any_within(std::span<const double> q, double r) const {
    const double r2 = r * r;
    if (brute_) {
        for (std::size_t i = 0; i < n_; ++i)
            if (sq_dist(pt(i), q) <= r2) return true;
        return false;
    }
    if (n_ == 0) return false;
    std::vector<std::pair<int, double>> stack;
    stack.emplace_back(0, 0.0);
    while (!stack.empty()) {
        auto [id, plane_d2] = stack.back();
        stack.pop_back();
        if (plane_d2 > r2) continue;
        const Node& nd = nodes_[static_cast<std::size_t>(id)];
        if (nd.axis < 0) {
            for (std::size_t i = nd.begin; i < nd.end; ++i)
                if (sq_dist(pt(order_[i]), q) <= r2) return true;
            continue;
        }
        const double delta = q[static_cast<std::size_t>(nd.axis)] - nd.split;
        const int near = delta < 0 ? nd.left : nd.right;
        const int far = delta < 0 ? nd.right : nd.left;
        stack.emplace_back(far, delta * delta);
        stack.emplace_back(near, plane_d2);
    }
    return false;
}

std::vector<std::size_t> SpatialIndex::knn(std::span<const double> q, std::size_t k) const {
    k = std::min(k, n_);
    std::vector<std::pair<double, std::size_t>> best;  // (d2, index), kept sorted
    best.reserve(k + 1);
    auto consider = [&](std::size_t i) {
        const double d2 = sq_dist(pt(i), q);
        if (best.size() == k && d2 >= best.back().first) return;
        auto it = std::lower_bound(best.begin(), best.end(), std::make_pair(d2, i));
        best.insert(it, {d2, i});
        if (best.size() > k) best.pop_back();
    };
    if (brute_ || n_ == 0) {
        for (std::size_t i = 0; i < n_; ++i) consider(i);
    } else {
        std::vector<std::pair<int, double>> stack;
        stack.emplace_back(0, 0.0);
        while (!stack.empty()) {
            auto [id, plane_d2] = stack.back();
            stack.pop_back();
            if (best.size() == k && plane_d2 > best.back().first) continue;
            const Node& nd = nodes_[static_cast<std::size_t>(id)];
            if (nd.axis < 0) {
                for (std::size_t i = nd.begin; i < nd.end; ++i) consider(order_[i]);
                continue;
            }
            const double delta = q[static_cast<std::size_t>(nd.axis)] - nd.split;
            const int near = delta < 0 ? nd.left : nd.right;
            const int far = delta < 0 ? nd.right : nd.left;
            stack.emplace_back(far, delta * delta);
            stack.emplace_back(near, plane_d2);
        }
    }
    std::vector<std::size_t> out(best.size());
    for (std::size_t i = 0; i < best.size(); ++i) out[i] = best[i].second;
    return out;
}

}  // namespace stochgeo
