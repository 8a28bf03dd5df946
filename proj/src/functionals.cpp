#include "stochgeo/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace stochgeo {

FunctionalSpec FunctionalSpec::onng_length_spec(WeightFunction w, std::optional<Region> sub) {
    FunctionalSpec f;
    f.kind = Kind::OnngLength;
    f.weight = std::move(w);
    f.sub_window = std::move(sub);
    return f;
}

FunctionalSpec FunctionalSpec::mst_length_spec(WeightFunction w) {
    FunctionalSpec f;
    f.kind = Kind::MstLength;
    f.weight = std::move(w);
    return f;
}

FunctionalSpec FunctionalSpec::component_count_spec(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("component count needs r > 0");
    FunctionalSpec f;
    f.kind = Kind::ComponentCount;
    f.radius = r;
    return f;
}

FunctionalSpec FunctionalSpec::excursion_volume_spec(KernelSpec k, double level, double h) {
    FunctionalSpec f;
    f.kind = Kind::ExcursionVolume;
    f.kernel = k;
    f.level = level;
    f.grid_h = h;
    return f;
}

FunctionalSpec FunctionalSpec::excursion_volume_spec(KernelSpec k, SmoothTest test, double h) {
    FunctionalSpec f;
    f.kind = Kind::ExcursionVolume;
    f.kernel = k;
    f.smooth_test = test;
    f.grid_h = h;
    return f;
}

FunctionalSpec FunctionalSpec::excursion_perimeter_spec(KernelSpec k, SmoothTest test, double h) {
    FunctionalSpec f;
    f.kind = Kind::ExcursionPerimeter;
    f.kernel = k;
    f.smooth_test = test;
    f.grid_h = h;
    return f;
}

MarkKind FunctionalSpec::required_marks() const {
    switch (kind) {
        case Kind::OnngLength: return MarkKind::Time;
        case Kind::ExcursionVolume:
        case Kind::ExcursionPerimeter: return MarkKind::Sign;
        default: return MarkKind::None;
    }
}

std::string FunctionalSpec::name() const {
    switch (kind) {
        case Kind::OnngLength: return "onng_length";
        case Kind::MstLength: return "mst_length";
        case Kind::ComponentCount: return "component_count";
        case Kind::ExcursionVolume: return "excursion_volume";
        case Kind::ExcursionPerimeter: return "excursion_perimeter";
    }
    return "?";
}

double FunctionalSpec::evaluate(const PointConfiguration& config, const Window& window) const {
    if (config.dim() != window.dim()) throw std::invalid_argument("functional evaluation: dimension mismatch");
    if (config.mark_kind() != required_marks())
        throw std::invalid_argument("functional " + name() + " needs " + mark_kind_name(required_marks()) +
                                    " marks");
    PointConfiguration local = restrict_to(config, window);
    switch (kind) {
        case Kind::OnngLength: {
            WeightedTree tree = build_onng(local);
            if (sub_window) return onng_length(tree, weight, Window(*sub_window));
            return onng_length(tree, weight, window);
        }
        case Kind::MstLength:
            return mst_length(build_mst_kruskal(local), weight);
        case Kind::ComponentCount:
            return static_cast<double>(geometric_components(local, radius).count);
        case Kind::ExcursionVolume: {
            FieldSample fs(local, kernel);
            Grid grid(window, grid_h);
            if (smooth_test) return smoothed_volume(fs, *smooth_test, grid);
            return excursion_volume(fs, *level, grid);
        }
        case Kind::ExcursionPerimeter: {
            FieldSample fs(local, kernel);
            Grid grid(window, grid_h);
            return smoothed_perimeter(fs, *smooth_test, grid);
        }
    }
    return 0.0;
}

namespace {

/// Component-count add-one cost without rebuilding: adding x creates one new
/// component and merges the distinct components adjacent to it, so
/// D_x K_r = 1 - #(distinct components within r of x).
double component_add_one(const FunctionalSpec& f, const PointConfiguration& local, std::span<const double> x) {
    if (local.contains_point(x)) throw std::invalid_argument("add_one_cost: duplicate point");
    ComponentLabeling lab = geometric_components(local, f.radius);
    const std::size_t adj = adjacent_component_count(local, lab, x, f.radius);
    return 1.0 - static_cast<double>(adj);
}

using EdgeContribution = std::pair<std::vector<double>, double>;

/// Per-edge contributions keyed by canonical endpoint coordinates, so two
/// trees over overlapping point sets can be diffed structurally.
std::vector<EdgeContribution> tree_contributions(const WeightedTree& tree, const WeightFunction& w,
                                                 const Window* vertex_window) {
    std::vector<EdgeContribution> out;
    out.reserve(tree.edges.size());
    for (const Edge& e : tree.edges) {
        const auto pu = tree.base.point(e.u);
        const auto pv = tree.base.point(e.v);
        const bool u_first = lex_less(pu, pv);
        const auto a = u_first ? pu : pv;
        const auto b = u_first ? pv : pu;
        std::vector<double> key(a.begin(), a.end());
        key.insert(key.end(), b.begin(), b.end());
        double value = w(e.length);
        if (vertex_window) {
            double mult = 0.0;
            if (vertex_window->contains(pu)) mult += 1.0;
            if (vertex_window->contains(pv)) mult += 1.0;
            value *= mult;
        }
        out.emplace_back(std::move(key), value);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Sum(after) - Sum(before) with identical edges cancelled structurally, not
/// in floating point: unchanged edges never touch the accumulator, so a cost
/// that is identical edge-for-edge at two scales compares exactly equal.
double contribution_diff(const std::vector<EdgeContribution>& after, const std::vector<EdgeContribution>& before) {
    double plus = 0.0, minus = 0.0;
    std::size_t i = 0, j = 0;
    while (i < after.size() || j < before.size()) {
        if (j == before.size() || (i < after.size() && after[i].first < before[j].first)) {
            plus += after[i++].second;
        } else if (i == after.size() || before[j].first < after[i].first) {
            minus += before[j++].second;
        } else {
            if (after[i].second != before[j].second) {  // coordinate ties with distinct lengths
                plus += after[i].second;
                minus += before[j].second;
            }
            ++i;
            ++j;
        }
    }
    return plus - minus;
}

double mst_add_one(const FunctionalSpec& f, const PointConfiguration& local, const Window&,
                   std::span<const double> x) {
    WeightedTree before = build_mst_kruskal(local);
    auto [after, trace] = mst_insert(before, x);
    return contribution_diff(tree_contributions(after, f.weight, nullptr),
                             tree_contributions(before, f.weight, nullptr));
}

double onng_add_one(const FunctionalSpec& f, const PointConfiguration& local, const Window& window,
                    std::span<const double> x, Mark m) {
    WeightedTree before = build_onng(local);
    WeightedTree after = build_onng(add_point(local, x, m));
    const Window vertex_window = f.sub_window ? Window(*f.sub_window) : window;
    return contribution_diff(tree_contributions(after, f.weight, &vertex_window),
                             tree_contributions(before, f.weight, &vertex_window));
}

}  // namespace

double add_one_cost(const FunctionalSpec& f, const PointConfiguration& config, const Window& window,
                    std::span<const double> x, Mark m) {
    if (x.size() != config.dim()) throw std::invalid_argument("add_one_cost: dimension mismatch");
    if (m.kind != f.required_marks()) throw std::invalid_argument("add_one_cost: mark variant mismatch");
    if (!window.contains(x)) return 0.0;
    PointConfiguration local = restrict_to(config, window);
    switch (f.kind) {
        case FunctionalSpec::Kind::ComponentCount:
            return component_add_one(f, local, x);
        case FunctionalSpec::Kind::MstLength:
            return mst_add_one(f, local, window, x);
        case FunctionalSpec::Kind::OnngLength:
            return onng_add_one(f, local, window, x, m);
        default: {
            const double base = f.evaluate(local, window);
            PointConfiguration augmented = add_point(local, x, m);
            return f.evaluate(augmented, window) - base;
        }
    }
}

double add_one_cost_augmented(const FunctionalSpec& f, const PointConfiguration& config, const Window& window,
                              std::span<const double> x, Mark mx, std::span<const double> y, Mark my) {
    if (x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin()))
        throw std::invalid_argument("add_one_cost_augmented: x and y must differ");
    if (my.kind != f.required_marks()) throw std::invalid_argument("add_one_cost_augmented: mark variant mismatch");
    PointConfiguration shifted = config;
    if (!config.contains_point(y)) shifted = add_point(config, y, my);
    return add_one_cost(f, shifted, window, x, mx);
}

}  // namespace stochgeo
