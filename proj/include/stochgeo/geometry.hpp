#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace stochgeo {

/// A point of R^d. Kept as a plain coordinate vector; bulk storage lives in
/// PointConfiguration as a flat array and hands out spans.
using Point = std::vector<double>;

double sq_dist(std::span<const double> a, std::span<const double> b);
double euclid_dist(std::span<const double> a, std::span<const double> b);
double linf_dist(std::span<const double> a, std::span<const double> b);

/// Lexicographic order on coordinates. Used as the universal tie-breaker:
/// sampled configurations have distinct coordinates almost surely, so ties
/// only arise in hand-built inputs, where this keeps every algorithm
/// deterministic.
bool lex_less(std::span<const double> a, std::span<const double> b);

void check_finite(std::span<const double> p);

enum class Shape { Cube, Ball };

/// Axis-aligned cube or Euclidean ball. `scale` is the half-side for cubes
/// and the radius for balls. Membership is closed-set membership.
struct Region {
    Shape shape = Shape::Cube;
    Point center;
    double scale = 0.0;

    Region() = default;
    Region(Shape s, Point c, double sc);

    static Region cube(Point c, double half_side) { return Region(Shape::Cube, std::move(c), half_side); }
    static Region ball(Point c, double radius) { return Region(Shape::Ball, std::move(c), radius); }
    static Region centered_cube(std::size_t dim, double half_side);

    std::size_t dim() const { return center.size(); }
    bool contains(std::span<const double> p) const;
    double volume() const;

    /// Shrinks the scale by `margin`; throws if margin >= scale.
    Region shrink(double margin) const;

    /// Distance from an interior point to the boundary (0 if outside).
    double boundary_distance(std::span<const double> p) const;

    /// Euclidean distance from p to the (closed) region; 0 inside.
    double distance_to(std::span<const double> p) const;

    /// Largest ball radius around the center contained in the region.
    double inradius() const { return scale; }
    double diameter() const;

    bool contains_region(const Region& other) const;

    bool operator==(const Region&) const = default;
};

/// Evaluation window: a region with an optional second region clipped
/// against it. Covers local windows near a boundary, which are the
/// intersection of a translated base region with the global window.
struct Window {
    Region region;
    std::optional<Region> clip;

    Window(Region r) : region(std::move(r)) {}
    Window(Region r, Region c) : region(std::move(r)), clip(std::move(c)) {}

    std::size_t dim() const { return region.dim(); }
    bool contains(std::span<const double> p) const {
        return region.contains(p) && (!clip || clip->contains(p));
    }
    /// Axis-aligned bounding box (lo, hi per axis) of the window.
    void bounding_box(std::vector<double>& lo, std::vector<double>& hi) const;
};

double unit_ball_volume(std::size_t d);

}  // namespace stochgeo
