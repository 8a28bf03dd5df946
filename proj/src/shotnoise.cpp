#include "stochgeo/shotnoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochgeo/spatial_index.hpp"

namespace stochgeo {

KernelSpec KernelSpec::polynomial_decay(double cg, double delta, std::size_t dim) {
    if (!(cg >= 0.0)) throw std::invalid_argument("kernel amplitude must be >= 0");
    if (!(delta > static_cast<double>(dim))) throw std::invalid_argument("kernel decay must exceed the dimension");
    KernelSpec k;
    k.family = Family::PolynomialDecay;
    k.cg = cg;
    k.delta = delta;
    return k;
}

KernelSpec KernelSpec::gaussian(double amplitude, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("gaussian kernel bandwidth must be > 0");
    KernelSpec k;
    k.family = Family::Gaussian;
    k.amplitude = amplitude;
    k.bandwidth = bandwidth;
    return k;
}

double KernelSpec::value_at_r(double r) const {
    if (family == Family::PolynomialDecay) return cg * std::pow(1.0 + r, -delta);
    const double z = r / bandwidth;
    return amplitude * std::exp(-0.5 * z * z);
}

double KernelSpec::value(std::span<const double> dx) const {
    double s = 0.0;
    for (double c : dx) s += c * c;
    return value_at_r(std::sqrt(s));
}

void KernelSpec::gradient(std::span<const double> dx, std::span<double> out) const {
    double s = 0.0;
    for (double c : dx) s += c * c;
    const double r = std::sqrt(s);
    if (family == Family::PolynomialDecay) {
        if (r == 0.0) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        const double factor = -delta * cg * std::pow(1.0 + r, -delta - 1.0) / r;
        for (std::size_t i = 0; i < dx.size(); ++i) out[i] = factor * dx[i];
        return;
    }
    const double w2 = bandwidth * bandwidth;
    const double factor = -amplitude * std::exp(-0.5 * s / w2) / w2;
    for (std::size_t i = 0; i < dx.size(); ++i) out[i] = factor * dx[i];
}

double KernelSpec::decay_bound() const {
    if (family == Family::PolynomialDecay) return cg * std::max(1.0, delta);
    // exp(-z^2/2) (1+r)^q is bounded; crude but verified bound over r >= 0.
    double m = 0.0;
    for (double r = 0.0; r <= 20.0 * bandwidth; r += 0.01 * bandwidth) {
        const double z = r / bandwidth;
        const double env = std::pow(1.0 + r, decay_exponent()) * std::exp(-0.5 * z * z);
        m = std::max(m, env * std::max(1.0, z / bandwidth));
    }
    return std::abs(amplitude) * m * 1.01;
}

double KernelSpec::decay_exponent() const {
    if (family == Family::PolynomialDecay) return delta;
    return 6.0;  // any exponent works for the gaussian family; fixed for reporting
}

FieldSample::FieldSample(PointConfiguration src, KernelSpec k, std::optional<double> cutoff)
    : sources(std::move(src)), kernel(k), cutoff_radius(cutoff) {
    if (sources.mark_kind() != MarkKind::Sign) throw std::invalid_argument("shot-noise sources need sign marks");
    if (cutoff_radius && !(*cutoff_radius > 0.0)) throw std::invalid_argument("cutoff radius must be > 0");
}

double suggested_cutoff(const KernelSpec& kernel, std::size_t dim, double tail_budget) {
    // Expected |g|-mass beyond R at unit intensity: int_R^inf C(1+r)^-q s_d r^(d-1) dr.
    const double q = kernel.decay_exponent();
    const double c = kernel.decay_bound();
    const double sphere = static_cast<double>(dim) * unit_ball_volume(dim);
    double r = 1.0;
    while (r < 1e12) {
        const double tail = c * sphere * std::pow(r, static_cast<double>(dim) - 1.0) *
                            std::pow(1.0 + r, 1.0 - q) / (q - static_cast<double>(dim));
        if (tail < tail_budget) return r;
        r *= 2.0;
    }
    return std::numeric_limits<double>::infinity();
}

namespace {

double field_at(const FieldSample& fs, std::span<const double> x, const SpatialIndex* index) {
    const std::size_t d = fs.sources.dim();
    std::vector<double> dx(d);
    double s = 0.0;
    auto add = [&](std::size_t i) {
        for (std::size_t a = 0; a < d; ++a) dx[a] = x[a] - fs.sources.point(i)[a];
        s += fs.sources.mark_value(i) * fs.kernel.value(dx);
    };
    if (fs.cutoff_radius && index) {
        for (std::size_t i : index->radius_indices(x, *fs.cutoff_radius)) add(i);
    } else if (fs.cutoff_radius) {
        const double r2 = *fs.cutoff_radius * *fs.cutoff_radius;
        for (std::size_t i = 0; i < fs.sources.size(); ++i)
            if (sq_dist(fs.sources.point(i), x) <= r2) add(i);
    } else {
        for (std::size_t i = 0; i < fs.sources.size(); ++i) add(i);
    }
    return s;
}

}  // namespace

double eval_field(const FieldSample& fs, std::span<const double> x) {
    if (x.size() != fs.sources.dim()) throw std::invalid_argument("eval_field: dimension mismatch");
    return field_at(fs, x, nullptr);
}

void eval_gradient(const FieldSample& fs, std::span<const double> x, std::span<double> out) {
    const std::size_t d = fs.sources.dim();
    if (x.size() != d || out.size() != d) throw std::invalid_argument("eval_gradient: dimension mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> dx(d), g(d);
    const double r2 = fs.cutoff_radius ? *fs.cutoff_radius * *fs.cutoff_radius
                                       : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fs.sources.size(); ++i) {
        if (sq_dist(fs.sources.point(i), x) > r2) continue;
        for (std::size_t a = 0; a < d; ++a) dx[a] = x[a] - fs.sources.point(i)[a];
        fs.kernel.gradient(dx, g);
        const double m = fs.sources.mark_value(i);
        for (std::size_t a = 0; a < d; ++a) out[a] += m * g[a];
    }
}

// ---------------------------------------------------------------------------
// Grid functionals

Grid::Grid(Window w, double spacing) : window(std::move(w)), h(spacing) {
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
    std::vector<double> hi;
    window.bounding_box(lo, hi);
    const std::size_t d = lo.size();
    counts.resize(d);
    for (std::size_t a = 0; a < d; ++a) {
        const double side = hi[a] - lo[a];
        if (!(side > 0.0)) throw std::invalid_argument("grid window is empty");
        counts[a] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(side / h)));
    }
}

std::size_t Grid::raw_size() const {
    std::size_t n = 1;
    for (std::size_t c : counts) n *= c;
    return n;
}

void Grid::node(std::size_t flat, std::span<double> out) const {
    for (std::size_t a = 0; a < counts.size(); ++a) {
        const std::size_t idx = flat % counts[a];
        flat /= counts[a];
        out[a] = lo[a] + (static_cast<double>(idx) + 0.5) * h;
    }
}

double Grid::weight() const { return std::pow(h, static_cast<double>(dim())); }

SmoothTest::SmoothTest(double lo, double hi, double amp) : a(lo), b(hi), amplitude(amp) {
    if (!(hi > lo)) throw std::invalid_argument("smooth test needs b > a");
    if (!(amp >= 0.0)) throw std::invalid_argument("smooth test amplitude must be >= 0");
}

double SmoothTest::phi(double x) const {
    if (x <= a || x >= b) return 0.0;
    const double p = x - a, q = b - x;
    return amplitude * p * p * q * q;
}

double SmoothTest::phi_prime(double x) const {
    if (x <= a || x >= b) return 0.0;
    const double p = x - a, q = b - x;
    return amplitude * (2.0 * p * q * q - 2.0 * p * p * q);
}

double SmoothTest::primitive(double x) const {
    if (x <= a) return 0.0;
    const double t = std::min(x, b) - a;
    const double w = b - a;
    // int_0^t s^2 (w-s)^2 ds = w^2 t^3/3 - w t^4/2 + t^5/5
    return amplitude * (w * w * t * t * t / 3.0 - w * t * t * t * t / 2.0 + t * t * t * t * t / 5.0);
}

std::vector<double> field_on_grid(const FieldSample& fs, const Grid& grid) {
    const std::size_t n = grid.raw_size();
    const std::size_t d = grid.dim();
    std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
    SpatialIndex index(fs.sources);
    std::vector<double> p(d);
    for (std::size_t i = 0; i < n; ++i) {
        grid.node(i, p);
        if (!grid.node_active(p)) continue;
        values[i] = field_at(fs, p, fs.cutoff_radius ? &index : nullptr);
    }
    return values;
}

double excursion_volume(const FieldSample& fs, double u, const Grid& grid) {
    auto values = field_on_grid(fs, grid);
    std::size_t count = 0;
    for (double v : values)
        if (!std::isnan(v) && v >= u) ++count;
    return grid.weight() * static_cast<double>(count);
}

double smoothed_volume(const FieldSample& fs, const SmoothTest& test, const Grid& grid) {
    auto values = field_on_grid(fs, grid);
    double s = 0.0;
    for (double v : values)
        if (!std::isnan(v)) s += test.primitive(v);
    return grid.weight() * s;
}

double smoothed_perimeter(const FieldSample& fs, const SmoothTest& test, const Grid& grid) {
    const std::size_t n = grid.raw_size();
    const std::size_t d = grid.dim();
    SpatialIndex index(fs.sources);
    std::vector<double> p(d), g(d), dx(d), gk(d);
    double s = 0.0;
    // One candidate pass per node accumulates the value and gradient together.
    auto accumulate = [&](std::size_t src, double& value) {
        for (std::size_t a = 0; a < d; ++a) dx[a] = p[a] - fs.sources.point(src)[a];
        const double m = fs.sources.mark_value(src);
        value += m * fs.kernel.value(dx);
        fs.kernel.gradient(dx, gk);
        for (std::size_t a = 0; a < d; ++a) g[a] += m * gk[a];
    };
    for (std::size_t i = 0; i < n; ++i) {
        grid.node(i, p);
        if (!grid.node_active(p)) continue;
        double v = 0.0;
        std::fill(g.begin(), g.end(), 0.0);
        if (fs.cutoff_radius) {
            for (std::size_t src : index.radius_indices(p, *fs.cutoff_radius)) accumulate(src, v);
        } else {
            for (std::size_t src = 0; src < fs.sources.size(); ++src) accumulate(src, v);
        }
        const double ph = test.phi(v);
        if (ph == 0.0) continue;
        double norm = 0.0;
        for (double c : g) norm += c * c;
        s += ph * std::sqrt(norm);
    }
    return grid.weight() * s;
}

double perimeter_marching(const FieldSample& fs, double u, const Grid& grid) {
    if (grid.dim() != 2) throw std::invalid_argument("perimeter_marching supports d = 2 only");
    auto values = field_on_grid(fs, grid);
    const std::size_t nx = grid.counts[0], ny = grid.counts[1];
    auto at = [&](std::size_t ix, std::size_t iy) { return values[iy * nx + ix]; };

    double total = 0.0;
    // March over cells between adjacent active nodes; linear interpolation on
    // cell sides. Saddles resolved by the cell-center average.
    for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
            const double v00 = at(ix, iy), v10 = at(ix + 1, iy);
            const double v01 = at(ix, iy + 1), v11 = at(ix + 1, iy + 1);
            if (std::isnan(v00) || std::isnan(v10) || std::isnan(v01) || std::isnan(v11)) continue;
            int mask = 0;
            if (v00 >= u) mask |= 1;
            if (v10 >= u) mask |= 2;
            if (v11 >= u) mask |= 4;
            if (v01 >= u) mask |= 8;
            if (mask == 0 || mask == 15) continue;

            // Interpolated crossing offsets in [0,1] along each cell side.
            auto frac = [&](double a, double b) { return (u - a) / (b - a); };
            const double h = grid.h;
            // side points: bottom (y=0), right (x=1), top (y=1), left (x=0)
            double px[4] = {frac(v00, v10), 1.0, 1.0 - frac(v11, v01), 0.0};
            double py[4] = {0.0, frac(v10, v11), 1.0, 1.0 - frac(v01, v00)};
            auto seg = [&](int s1, int s2) {
                const double dx = (px[s1] - px[s2]) * h;
                const double dy = (py[s1] - py[s2]) * h;
                total += std::sqrt(dx * dx + dy * dy);
            };
            switch (mask) {
                case 1: case 14: seg(0, 3); break;
                case 2: case 13: seg(0, 1); break;
                case 4: case 11: seg(1, 2); break;
                case 8: case 7: seg(2, 3); break;
                case 3: case 12: seg(1, 3); break;
                case 6: case 9: seg(0, 2); break;
                case 5: case 10: {
                    const double center = 0.25 * (v00 + v10 + v01 + v11);
                    const bool join = (center >= u) == (mask == 5);
                    if (join) {
                        seg(0, 1);
                        seg(2, 3);
                    } else {
                        seg(0, 3);
                        seg(1, 2);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return total;
}

}  // namespace stochgeo
