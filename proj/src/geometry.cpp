#include "stochgeo/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace stochgeo {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double euclid_dist(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(sq_dist(a, b));
}

double linf_dist(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

void check_finite(std::span<const double> p) {
    for (double c : p)
        if (!std::isfinite(c)) throw std::invalid_argument("point has non-finite coordinate");
}

Region::Region(Shape s, Point c, double sc) : shape(s), center(std::move(c)), scale(sc) {
    if (center.empty()) throw std::invalid_argument("region needs dimension >= 1");
    check_finite(center);
    if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("region scale must be positive and finite");
}

Region Region::centered_cube(std::size_t dim, double half_side) {
    return Region(Shape::Cube, Point(dim, 0.0), half_side);
}

bool Region::contains(std::span<const double> p) const {
    if (shape == Shape::Cube) return linf_dist(p, center) <= scale;
    return sq_dist(p, center) <= scale * scale;
}

double Region::volume() const {
    const std::size_t d = dim();
    if (shape == Shape::Cube) return std::pow(2.0 * scale, static_cast<double>(d));
    return unit_ball_volume(d) * std::pow(scale, static_cast<double>(d));
}

Region Region::shrink(double margin) const {
    if (margin >= scale) throw std::invalid_argument("shrink margin >= region scale");
    Region r = *this;
    r.scale = scale - margin;
    return r;
}

double Region::boundary_distance(std::span<const double> p) const {
    if (shape == Shape::Cube) {
        double m = scale;
        for (std::size_t i = 0; i < p.size(); ++i) m = std::min(m, scale - std::abs(p[i] - center[i]));
        return std::max(0.0, m);
    }
    return std::max(0.0, scale - euclid_dist(p, center));
}

double Region::distance_to(std::span<const double> p) const {
    if (shape == Shape::Cube) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = std::abs(p[i] - center[i]) - scale;
            if (d > 0) s += d * d;
        }
        return std::sqrt(s);
    }
    return std::max(0.0, euclid_dist(p, center) - scale);
}

double Region::diameter() const {
    if (shape == Shape::Cube) return 2.0 * scale * std::sqrt(static_cast<double>(dim()));
    return 2.0 * scale;
}

bool Region::contains_region(const Region& other) const {
    if (dim() != other.dim()) return false;
    const std::size_t d = dim();
    if (shape == Shape::Cube && other.shape == Shape::Cube) {
        for (std::size_t i = 0; i < d; ++i)
            if (std::abs(other.center[i] - center[i]) + other.scale > scale) return false;
        return true;
    }
    if (shape == Shape::Ball && other.shape == Shape::Ball)
        return euclid_dist(other.center, center) + other.scale <= scale;
    if (shape == Shape::Ball && other.shape == Shape::Cube) {
        // Farthest cube corner from the ball center must be inside.
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double v = std::abs(other.center[i] - center[i]) + other.scale;
            s += v * v;
        }
        return std::sqrt(s) <= scale;
    }
    // Cube contains ball.
    for (std::size_t i = 0; i < d; ++i)
        if (std::abs(other.center[i] - center[i]) + other.scale > scale) return false;
    return true;
}

void Window::bounding_box(std::vector<double>& lo, std::vector<double>& hi) const {
    const std::size_t d = dim();
    lo.assign(d, 0.0);
    hi.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        lo[i] = region.center[i] - region.scale;
        hi[i] = region.center[i] + region.scale;
        if (clip) {
            lo[i] = std::max(lo[i], clip->center[i] - clip->scale);
            hi[i] = std::min(hi[i], clip->center[i] + clip->scale);
        }
    }
}

double unit_ball_volume(std::size_t d) {
    const double pi = 3.14159265358979323846;
    return std::pow(pi, 0.5 * static_cast<double>(d)) / std::tgamma(0.5 * static_cast<double>(d) + 1.0);
}

}  // namespace stochgeo
