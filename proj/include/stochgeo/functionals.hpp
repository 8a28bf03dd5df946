#pragma once

#include <optional>
#include <string>

#include "stochgeo/config.hpp"
#include "stochgeo/graphs.hpp"
#include "stochgeo/shotnoise.hpp"

namespace stochgeo {

/// A named geometric functional F mapping (configuration, window) -> real.
/// Evaluation only sees the restriction of the configuration to the window,
/// so F(restrict(C,B), B) == F(C, B) by construction.
struct FunctionalSpec {
    enum class Kind { OnngLength, MstLength, ComponentCount, ExcursionVolume, ExcursionPerimeter };

    Kind kind = Kind::MstLength;
    WeightFunction weight;                 // Onng/Mst length
    std::optional<Region> sub_window;      // Onng length vertex restriction (whole window if absent)
    double radius = 1.0;                   // ComponentCount graph radius
    std::optional<double> level;           // ExcursionVolume sharp level (else smoothed)
    std::optional<SmoothTest> smooth_test; // Excursion smoothed functionals
    KernelSpec kernel;                     // Excursion field kernel
    double grid_h = 0.05;                  // Excursion quadrature spacing

    static FunctionalSpec onng_length_spec(WeightFunction w, std::optional<Region> sub = std::nullopt);
    static FunctionalSpec mst_length_spec(WeightFunction w);
    static FunctionalSpec component_count_spec(double r);
    static FunctionalSpec excursion_volume_spec(KernelSpec k, double level, double h);
    static FunctionalSpec excursion_volume_spec(KernelSpec k, SmoothTest test, double h);
    static FunctionalSpec excursion_perimeter_spec(KernelSpec k, SmoothTest test, double h);

    MarkKind required_marks() const;
    std::string name() const;

    double evaluate(const PointConfiguration& config, const Window& window) const;
};

/// Add-one cost D_x F(B) = F((C + x)|_B, B) - F(C|_B, B). Exactly 0 when x
/// lies outside B (the restriction removes x again). Component counts use an
/// O(neighbourhood) incremental path; everything else evaluates F twice.
double add_one_cost(const FunctionalSpec& f, const PointConfiguration& config, const Window& window,
                    std::span<const double> x, Mark m);

/// D_x of the y-augmented functional: F((C + x + y)|_B, B) - F((C + y)|_B, B).
double add_one_cost_augmented(const FunctionalSpec& f, const PointConfiguration& config, const Window& window,
                              std::span<const double> x, Mark mx, std::span<const double> y, Mark my);

}  // namespace stochgeo
