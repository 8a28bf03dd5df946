#pragma once

#include <optional>
#include <vector>

#include "stochgeo/config.hpp"
#include "stochgeo/geometry.hpp"

namespace stochgeo {

/// Shot-noise kernel with closed-form value and gradient. Two families:
///   polynomial_decay: g(x) = Cg * (1 + ||x||)^(-delta), delta > d
///   gaussian:         g(x) = A * exp(-||x||^2 / (2 w^2))
/// The polynomial gradient has the radial form -delta*Cg*(1+r)^(-delta-1) x/r,
/// undefined in direction at the origin; eval returns the zero vector there
/// (a measure-zero convention, sources almost surely never coincide with
/// evaluation nodes).
struct KernelSpec {
    enum class Family { PolynomialDecay, Gaussian };

    Family family = Family::PolynomialDecay;
    double cg = 1.0;      // PolynomialDecay amplitude
    double delta = 3.0;   // PolynomialDecay exponent, must exceed the dimension
    double amplitude = 1.0;
    double bandwidth = 1.0;

    static KernelSpec polynomial_decay(double cg, double delta, std::size_t dim);
    static KernelSpec gaussian(double amplitude, double bandwidth);

    double value_at_r(double r) const;
    double value(std::span<const double> dx) const;
    void gradient(std::span<const double> dx, std::span<double> out) const;

    /// Constant C with max(|g|, ||grad g||) <= C (1+r)^(-decay_exponent()).
    double decay_bound() const;
    double decay_exponent() const;
};

/// A realized shot-noise field: sign-marked sources convolved with a kernel.
/// Field value at x is the sum of mark * g(x - source) over sources within
/// cutoff_radius of x (all sources when the cutoff is absent).
struct FieldSample {
    PointConfiguration sources;  // sign marks
    KernelSpec kernel;
    std::optional<double> cutoff_radius;

    FieldSample(PointConfiguration src, KernelSpec k, std::optional<double> cutoff = std::nullopt);
};

/// Cutoff radius making the neglected far-field tail smaller than
/// `tail_budget` in expectation at unit intensity. Heavy tails push this
/// beyond any desk-scale window, in which case callers should keep all
/// sources (no cutoff).
double suggested_cutoff(const KernelSpec& kernel, std::size_t dim, double tail_budget = 1e-8);

double eval_field(const FieldSample& fs, std::span<const double> x);
void eval_gradient(const FieldSample& fs, std::span<const double> x, std::span<double> out);

/// Cell-centered quadrature grid over a (cube or clipped) window; node weight
/// is h^d. Nodes outside a ball window are dropped.
struct Grid {
    Window window;
    double h = 0.0;
    std::vector<double> lo;
    std::vector<std::size_t> counts;

    Grid(Window w, double spacing);

    std::size_t dim() const { return lo.size(); }
    std::size_t raw_size() const;
    void node(std::size_t flat, std::span<double> out) const;
    bool node_active(std::span<const double> p) const { return window.contains(p); }
    double weight() const;  // h^d
};

/// Nonnegative C^1 bump on [a,b]: phi(x) = amp * (x-a)^2 (b-x)^2, with its
/// primitive Phi vanishing at -infinity in closed form.
struct SmoothTest {
    double a = 0.0, b = 1.0, amplitude = 1.0;

    SmoothTest(double lo, double hi, double amp = 1.0);

    double phi(double x) const;
    double phi_prime(double x) const;
    double primitive(double x) const;  // Phi
    double total_mass() const { return primitive(b); }
};

/// Values of the field at every raw grid node (inactive nodes get NaN).
std::vector<double> field_on_grid(const FieldSample& fs, const Grid& grid);

/// h^d * #{active nodes with field >= u}.
double excursion_volume(const FieldSample& fs, double u, const Grid& grid);

/// h^d * sum Phi(field) over active nodes.
double smoothed_volume(const FieldSample& fs, const SmoothTest& test, const Grid& grid);

/// h^d * sum phi(field) * ||gradient|| over active nodes (coarea quadrature).
double smoothed_perimeter(const FieldSample& fs, const SmoothTest& test, const Grid& grid);

/// Total length of the u-level contour by marching squares with linear
/// interpolation; d = 2 only. Contour runs along the window edge are not
/// counted (open-window perimeter convention).
double perimeter_marching(const FieldSample& fs, double u, const Grid& grid);

}  // namespace stochgeo
