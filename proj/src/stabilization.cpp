#include "stochgeo/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "stochgeo/parallel.hpp"
#include "stochgeo/spatial_index.hpp"
#include "stochgeo/stats.hpp"

namespace stochgeo {

double default_margin_factor(const Region& base_shape_region) {
    Region unit(base_shape_region.shape, Point(base_shape_region.dim(), 0.0), 1.0);
    return 1.1 * unit.diameter();
}

TwoScalePair::TwoScalePair(Region outer_region, double b, double theta)
    : outer(std::move(outer_region)), inner_scale(b), margin_factor(theta) {
    if (!(inner_scale > 0.0)) throw std::invalid_argument("two-scale inner scale must be > 0");
    if (inner_scale > outer.scale) throw std::invalid_argument("two-scale inner scale must not exceed the outer scale");
    if (margin_factor <= 0.0) margin_factor = default_margin_factor(outer);
}

Region TwoScalePair::inner_region(std::span<const double> x) const {
    return Region(outer.shape, Point(x.begin(), x.end()), inner_scale);
}

Window TwoScalePair::inner_window(std::span<const double> x) const {
    return Window(inner_region(x), outer);
}

double TwoScalePair::site_margin() const { return margin_factor * inner_scale; }

Region TwoScalePair::shrunk_site_region() const {
    const double margin = std::min(site_margin(), 0.999 * outer.scale);
    return outer.shrink(margin);
}

bool TwoScalePair::locally_disjoint(std::span<const double> x, std::span<const double> y) const {
    if (outer.shape == Shape::Cube) return linf_dist(x, y) > 2.0 * inner_scale;
    return euclid_dist(x, y) > 2.0 * inner_scale;
}

double two_scale_discrepancy(const FunctionalSpec& f, const PointConfiguration& config, const TwoScalePair& pair,
                             std::span<const double> x, Mark m) {
    if (!pair.outer.contains(x)) throw std::invalid_argument("two_scale_discrepancy: site outside the outer region");
    const double big = add_one_cost(f, config, Window(pair.outer), x, m);
    const double small = add_one_cost(f, config, pair.inner_window(x), x, m);
    return std::abs(big - small);
}

// ---------------------------------------------------------------------------
// psi / phi estimation

namespace {

Mark probe_mark(MarkKind kind, Rng& rng) {
    switch (kind) {
        case MarkKind::None: return Mark::none();
        case MarkKind::Time: return Mark{MarkKind::Time, rng.uniform01_open()};
        case MarkKind::Sign: return Mark{MarkKind::Sign, rng.rademacher()};
    }
    return Mark::none();
}

PointConfiguration sample_for(const Region& region, MarkKind kind, SeedState seed) {
    return kind == MarkKind::None ? sample_poisson(region, 1.0, seed)
                                  : sample_marked_poisson(region, 1.0, kind, seed);
}

DiscrepancyEstimate finalize_sites(std::vector<SiteEstimate> sites,
                                   const std::vector<std::vector<double>>& samples) {
    DiscrepancyEstimate est;
    for (std::size_t s = 0; s < sites.size(); ++s) {
        sites[s].mean = mean_of(samples[s]);
        const double var = variance_of(samples[s]);
        sites[s].std_error = samples[s].size() > 1 ? std::sqrt(var / static_cast<double>(samples[s].size())) : 0.0;
        sites[s].replicas = samples[s].size();
    }
    est.per_site = std::move(sites);
    est.sup_estimate = 0.0;
    for (const auto& s : est.per_site) est.sup_estimate = std::max(est.sup_estimate, s.mean);
    return est;
}

}  // namespace

DiscrepancyEstimate estimate_psi(const FunctionalSpec& f, const TwoScalePair& pair,
                                 const std::vector<Point>& sites, std::size_t replicas, SeedState seed,
                                 std::size_t threads, bool require_shrunk_sites) {
    if (replicas < 30) throw std::invalid_argument("estimate_psi needs at least 30 replicas");
    if (sites.empty()) throw std::invalid_argument("estimate_psi needs at least one site");
    const Region site_region = require_shrunk_sites ? pair.shrunk_site_region() : pair.outer;
    for (const Point& s : sites)
        if (!site_region.contains(s))
            throw std::invalid_argument(require_shrunk_sites ? "estimate_psi: site outside the shrunk outer region"
                                                             : "estimate_psi: site outside the outer region");

    std::vector<SiteEstimate> per_site(sites.size());
    for (std::size_t s = 0; s < sites.size(); ++s) per_site[s].site = sites[s];
    std::vector<std::vector<double>> samples(sites.size(), std::vector<double>(replicas, 0.0));

    run_indexed_tasks(replicas, threads, [&](std::size_t r) {
        const SeedState rep_seed = seed.substream(r);
        PointConfiguration config = sample_for(pair.outer, f.required_marks(), rep_seed);
        Rng mark_rng(rep_seed.substream(0x6d61726bULL));
        for (std::size_t s = 0; s < sites.size(); ++s) {
            const Mark m = probe_mark(f.required_marks(), mark_rng);
            samples[s][r] = two_scale_discrepancy(f, config, pair, sites[s], m);
        }
    });
    return finalize_sites(std::move(per_site), samples);
}

DiscrepancyEstimate estimate_phi(const FunctionalSpec& f, const TwoScalePair& pair,
                                 const std::vector<std::pair<Point, Point>>& site_pairs, std::size_t replicas,
                                 SeedState seed, std::size_t threads) {
    if (replicas < 30) throw std::invalid_argument("estimate_phi needs at least 30 replicas");
    if (site_pairs.empty()) throw std::invalid_argument("estimate_phi needs at least one site pair");
    for (const auto& [x, y] : site_pairs) {
        if (!pair.outer.contains(x) || !pair.outer.contains(y))
            throw std::invalid_argument("estimate_phi: site outside the outer region");
        if (!pair.locally_disjoint(x, y))
            throw std::invalid_argument("estimate_phi: local windows of the site pair are not disjoint");
    }

    std::vector<SiteEstimate> per_site(site_pairs.size());
    for (std::size_t s = 0; s < site_pairs.size(); ++s) {
        per_site[s].site = site_pairs[s].first;
        per_site[s].site2 = site_pairs[s].second;
    }
    std::vector<std::vector<double>> samples(site_pairs.size(), std::vector<double>(replicas, 0.0));

    run_indexed_tasks(replicas, threads, [&](std::size_t r) {
        const SeedState rep_seed = seed.substream(r);
        PointConfiguration config = sample_for(pair.outer, f.required_marks(), rep_seed);
        Rng mark_rng(rep_seed.substream(0x6d61726bULL));
        for (std::size_t s = 0; s < site_pairs.size(); ++s) {
            const auto& [x, y] = site_pairs[s];
            const Mark mx = probe_mark(f.required_marks(), mark_rng);
            const Mark my = probe_mark(f.required_marks(), mark_rng);
            const double big = add_one_cost_augmented(f, config, Window(pair.outer), x, mx, y, my);
            const double small = add_one_cost_augmented(f, config, pair.inner_window(x), x, mx, y, my);
            samples[s][r] = std::abs(big - small);
        }
    });
    return finalize_sites(std::move(per_site), samples);
}

// ---------------------------------------------------------------------------
// Wall event

bool wall_event(const PointConfiguration& config, std::span<const double> x, double u, const Region& window) {
    const std::size_t d = config.dim();
    if (x.size() != d || window.dim() != d) throw std::invalid_argument("wall_event: dimension mismatch");
    if (!(u > 0.0) || u >= 2.0 * window.scale) throw std::invalid_argument("wall_event: u out of range (0, 2*scale)");

    // Local candidates: lens points satisfy |z - x| <= 0.74 * rho <= 0.74 * u sqrt(d) / 2.
    const double reach = 0.74 * u * std::sqrt(static_cast<double>(d)) / 2.0 + 1e-12;
    std::vector<std::size_t> local;
    {
        SpatialIndex index(config);
        local = index.radius_indices(x, reach);
    }
    const double shrink = 0.74;

    // Lattice on each face of the side-u cube around x. A candidate in the
    // shrunken lens at a lattice site certifies the true lens for every
    // boundary point within rho/175 of it; the per-axis spacing below keeps
    // lattice coverage radius under (u/2)/175 <= rho/175.
    const double cover = (u / 2.0) / 175.0;
    const double spacing_bound = 2.0 * cover / std::sqrt(static_cast<double>(std::max<std::size_t>(d - 1, 1)));
    const std::size_t cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(u / spacing_bound)));
    const double step = u / static_cast<double>(cells);

    std::vector<double> bp(d);
    auto lens_occupied = [&](std::span<const double> xp) {
        const double rho = euclid_dist(x, xp);
        const double rad = shrink * rho;
        const double rad2 = rad * rad;
        for (std::size_t idx : local) {
            const auto z = config.point(idx);
            if (sq_dist(z, x) <= rad2 && sq_dist(z, xp) <= rad2) return true;
        }
        return false;
    };

    // Iterate faces: fixed axis a at +- u/2, lattice over the remaining axes.
    std::vector<std::size_t> free_axes;
    std::vector<std::size_t> counter;
    for (std::size_t a = 0; a < d; ++a) {
        for (int sign = -1; sign <= 1; sign += 2) {
            free_axes.clear();
            for (std::size_t b = 0; b < d; ++b)
                if (b != a) free_axes.push_back(b);
            counter.assign(free_axes.size(), 0);
            for (;;) {
                bp.assign(x.begin(), x.end());
                bp[a] = x[a] + sign * u / 2.0;
                for (std::size_t fa = 0; fa < free_axes.size(); ++fa)
                    bp[free_axes[fa]] = x[free_axes[fa]] - u / 2.0 + static_cast<double>(counter[fa]) * step;
                if (window.contains(bp) && !lens_occupied(bp)) return false;
                std::size_t carry = 0;
                while (carry < counter.size()) {
                    if (++counter[carry] <= cells) break;
                    counter[carry] = 0;
                    ++carry;
                }
                if (carry == counter.size()) break;  // also ends the d = 1 single-point face
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Attachment and stabilization radii

double mst_attachment_radius(const PointConfiguration& config, std::span<const double> x, const Region& window) {
    if (!window.contains(x)) throw std::invalid_argument("mst_attachment_radius: x outside the window");
    PointConfiguration local = restrict_to(config, Window(window));
    if (local.empty()) return 0.0;
    WeightedTree tree = build_mst_kruskal(local);
    auto [augmented, trace] = mst_insert(tree, x);
    const auto xi = static_cast<std::uint32_t>(local.size());
    double r = 0.0;
    for (const Edge& e : augmented.edges) {
        if (e.u != xi && e.v != xi) continue;
        const std::uint32_t other = e.u == xi ? e.v : e.u;
        r = std::max(r, 2.0 * linf_dist(augmented.base.point(other), x));
    }
    return r;
}

namespace {

std::vector<Point> icosahedral_axes() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Point> verts;
    for (double s1 : {-1.0, 1.0})
        for (double s2 : {-1.0, 1.0}) {
            verts.push_back({0.0, s1, s2 * phi});
            verts.push_back({s1, s2 * phi, 0.0});
            verts.push_back({s2 * phi, 0.0, s1});
        }
    auto normalize = [](Point p) {
        double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        for (double& c : p) c /= n;
        return p;
    };
    for (auto& v : verts) v = normalize(v);

    std::vector<Point> axes = verts;
    const double edge2 = 4.0 / (phi * phi + 1.0) * 1.0001;  // squared chord of an icosahedron edge (unit sphere)
    const std::size_t nv = verts.size();
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = i + 1; j < nv; ++j) {
            if (sq_dist(verts[i], verts[j]) > edge2) continue;
            axes.push_back(normalize({(verts[i][0] + verts[j][0]) / 2, (verts[i][1] + verts[j][1]) / 2,
                                      (verts[i][2] + verts[j][2]) / 2}));
            for (std::size_t k = j + 1; k < nv; ++k) {
                if (sq_dist(verts[i], verts[k]) > edge2 || sq_dist(verts[j], verts[k]) > edge2) continue;
                axes.push_back(normalize({(verts[i][0] + verts[j][0] + verts[k][0]) / 3,
                                          (verts[i][1] + verts[j][1] + verts[k][1]) / 3,
                                          (verts[i][2] + verts[j][2] + verts[k][2]) / 3}));
            }
        }
    return axes;
}

}  // namespace

const std::vector<Point>& cone_axes(std::size_t d) {
    if (d == 2) {
        static const std::vector<Point> axes = [] {
            std::vector<Point> a;
            for (int k = 0; k < 6; ++k) {
                const double ang = k * 3.14159265358979323846 / 3.0;
                a.push_back({std::cos(ang), std::sin(ang)});
            }
            return a;
        }();
        return axes;
    }
    if (d == 3) {
        static const std::vector<Point> axes = icosahedral_axes();
        return axes;
    }
    throw std::invalid_argument("cone cover available for d = 2 and d = 3 only");
}

bool cone_cover_is_valid(std::size_t d, std::size_t samples, SeedState seed) {
    const auto& axes = cone_axes(d);
    const double cos_cap = std::cos(3.14159265358979323846 / 6.0);
    Rng rng(seed);
    Point v(d);
    for (std::size_t s = 0; s < samples; ++s) {
        double norm = 0.0;
        do {
            norm = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                v[a] = rng.normal();
                norm += v[a] * v[a];
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        bool covered = false;
        for (const Point& ax : axes) {
            double dot = 0.0;
            for (std::size_t a = 0; a < d; ++a) dot += ax[a] * v[a];
            if (dot >= cos_cap * norm) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

double onng_stabilization_radius(const PointConfiguration& config, std::span<const double> x, double t) {
    if (config.mark_kind() != MarkKind::Time)
        throw std::invalid_argument("onng_stabilization_radius needs time marks");
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("probe mark must lie in (0,1]");
    const std::size_t d = config.dim();
    if (x.size() != d) throw std::invalid_argument("onng_stabilization_radius: dimension mismatch");
    const auto& axes = cone_axes(d);
    const double cos_cap = std::cos(3.14159265358979323846 / 6.0);

    std::vector<double> best(axes.size(), kCensored);
    const std::size_t n = config.size();
    std::vector<double> dxv(d);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(config.mark_value(i) < t)) continue;
        const auto p = config.point(i);
        double norm2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            dxv[a] = p[a] - x[a];
            norm2 += dxv[a] * dxv[a];
        }
        if (norm2 == 0.0) continue;
        const double dist = std::sqrt(norm2);
        for (std::size_t j = 0; j < axes.size(); ++j) {
            double dot = 0.0;
            for (std::size_t a = 0; a < d; ++a) dot += axes[j][a] * dxv[a];
            if (dot >= cos_cap * dist && dist < best[j]) best[j] = dist;
        }
    }
    double r = 0.0;
    for (double b : best) {
        if (b == kCensored) return kCensored;
        r = std::max(r, 2.0 * b);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Two-arm events

namespace {

bool two_arm_impl(const PointConfiguration& config, const Region& inner, const Region& outer, double graph_r,
                  double touch_r) {
    if (!outer.contains_region(inner)) throw std::invalid_argument("two-arm event: inner not contained in outer");
    // Annulus points.
    PointConfiguration shell(config.dim(), config.mark_kind());
    const std::size_t n = config.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = config.point(i);
        if (outer.contains(p) && !inner.contains(p)) shell.append_unchecked(p, config.mark(i));
    }
    if (shell.size() < 2) return false;
    ComponentLabeling lab = geometric_components(shell, graph_r);
    std::vector<char> touch_in(lab.count, 0), touch_out(lab.count, 0);
    for (std::size_t i = 0; i < shell.size(); ++i) {
        const auto p = shell.point(i);
        const std::uint32_t c = lab.labels[i];
        if (inner.distance_to(p) <= touch_r) touch_in[c] = 1;
        if (outer.boundary_distance(p) <= touch_r) touch_out[c] = 1;
    }
    std::size_t crossings = 0;
    for (std::size_t c = 0; c < lab.count; ++c)
        if (touch_in[c] && touch_out[c]) ++crossings;
    return crossings >= 2;
}

}  // namespace

bool two_arm_event_boolean(const PointConfiguration& config, const Region& inner, const Region& outer, double u) {
    if (!(u > 0.0)) throw std::invalid_argument("two_arm_event_boolean needs u > 0");
    return two_arm_impl(config, inner, outer, u, u / 2.0);
}

bool two_arm_event_components(const PointConfiguration& config, double r, double a, double N, const Point& center) {
    if (!(r > 0.0) || r > a || a > N) throw std::invalid_argument("two_arm_event_components needs 0 < r <= a <= N");
    const Region inner = Region::cube(center, a / 2.0);
    const Region outer = Region::cube(center, N / 2.0);
    return two_arm_impl(config, inner, outer, r, r);
}

// ---------------------------------------------------------------------------
// Gamma terms

namespace {

double lens_volume(std::size_t d, double big_r, double small_r, double dist) {
    if (dist >= big_r + small_r) return 0.0;
    const double mn = std::min(big_r, small_r);
    if (dist <= std::abs(big_r - small_r)) return unit_ball_volume(d) * std::pow(mn, static_cast<double>(d));
    if (d == 1) return std::min(big_r, dist + small_r) - std::max(-big_r, dist - small_r);
    if (d == 2) {
        const double r1 = big_r, r2 = small_r;
        const double a1 = std::acos(std::clamp((dist * dist + r1 * r1 - r2 * r2) / (2 * dist * r1), -1.0, 1.0));
        const double a2 = std::acos(std::clamp((dist * dist + r2 * r2 - r1 * r1) / (2 * dist * r2), -1.0, 1.0));
        const double tri = 0.5 * std::sqrt(std::max(0.0, (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) *
                                                             (dist + r1 + r2)));
        return r1 * r1 * a1 + r2 * r2 * a2 - tri;
    }
    if (d == 3) {
        const double r1 = big_r, r2 = small_r;
        const double num = (r1 + r2 - dist) * (r1 + r2 - dist) *
                           (dist * dist + 2 * dist * r2 - 3 * r2 * r2 + 2 * dist * r1 + 6 * r1 * r2 - 3 * r1 * r1);
        return 3.14159265358979323846 * num / (12.0 * dist);
    }
    throw std::invalid_argument("ball overlap supported for d <= 3 only");
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(std::abs(whole), 1e-300) * rel_tol;
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

GammaTerms gamma_geometric(double n, double b_n, std::size_t d, const std::vector<double>& sigmas, Shape shape) {
    if (sigmas.empty()) throw std::invalid_argument("gamma_geometric needs at least one sigma");
    for (double s : sigmas)
        if (!(s > 0.0)) throw std::invalid_argument("gamma_geometric: sigmas must be positive");
    if (!(n > 0.0) || b_n < 0.0) throw std::invalid_argument("gamma_geometric: scales must be positive");

    double inv_sum = 0.0;
    for (double s : sigmas) inv_sum += 1.0 / s;

    GammaTerms g;
    const double dd = static_cast<double>(d);
    if (shape == Shape::Cube) {
        const double side = 2.0 * n;
        g.lambda_b = std::pow(side, dd);
        const double c = 2.0 * b_n;  // local cubes meet iff per-axis offsets are < c
        const double per_axis = c >= side ? side * side : 2.0 * c * side - c * c;
        g.lambda2_overlap = b_n == 0.0 ? 0.0 : std::pow(per_axis, dd);
    } else {
        g.lambda_b = unit_ball_volume(d) * std::pow(n, dd);
        const double c = 2.0 * b_n;
        if (b_n == 0.0) {
            g.lambda2_overlap = 0.0;
        } else if (c >= 2.0 * n) {
            g.lambda2_overlap = g.lambda_b * g.lambda_b;
        } else {
            // int over x in B of |B ∩ Ball(x, c)| via the radial profile.
            const double sphere = dd * unit_ball_volume(d);
            auto f = [&](double rho) {
                return sphere * std::pow(rho, dd - 1.0) * lens_volume(d, n, c, rho);
            };
            g.lambda2_overlap = integrate(f, 0.0, n, 1e-6);
        }
    }
    g.gamma3 = inv_sum * inv_sum * std::sqrt(g.lambda2_overlap);
    g.gamma4 = inv_sum * inv_sum * inv_sum * g.lambda_b;
    g.gamma5 = inv_sum * inv_sum * std::sqrt(g.lambda_b);
    return g;
}

double gamma1_estimate(const std::vector<double>& sigma_targets_flat, const std::vector<double>& covariance_flat,
                       const std::vector<double>& sigmas) {
    const std::size_t m = sigmas.size();
    if (sigma_targets_flat.size() != m * m || covariance_flat.size() != m * m)
        throw std::invalid_argument("gamma1_estimate: matrix sizes must match sigmas");
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double target = sigma_targets_flat[i * m + j] * sigmas[i] * sigmas[j];
            total += std::abs(target - covariance_flat[i * m + j]) / (sigmas[i] * sigmas[j]);
        }
    return total;
}

double gamma2_estimate(const DiscrepancyEstimate& est, const std::vector<double>& sigmas, double lambda2_disjoint,
                       double q, double p) {
    if (sigmas.empty()) throw std::invalid_argument("gamma2_estimate needs at least one sigma");
    if (!(lambda2_disjoint >= 0.0)) throw std::invalid_argument("gamma2_estimate: negative pair mass");
    if (!(p > q)) throw std::invalid_argument("gamma2_estimate: needs p > q");
    double inv_sum = 0.0;
    for (double s : sigmas) {
        if (!(s > 0.0)) throw std::invalid_argument("gamma2_estimate: sigmas must be positive");
        inv_sum += 1.0 / s;
    }
    const double exponent = std::isinf(p) ? 1.0 : 1.0 - q / p;
    return inv_sum * inv_sum * std::sqrt(std::pow(est.sup_estimate, exponent) * lambda2_disjoint);
}

// ---------------------------------------------------------------------------
// Radius tails

std::vector<TailPoint> estimate_radius_tail(const RadiusSample& radii, const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw std::invalid_argument("estimate_radius_tail needs thresholds");
    const std::size_t n = radii.size();
    const double u_min = *std::min_element(thresholds.begin(), thresholds.end());
    std::size_t decidable = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!radii.censored[i] || radii.values[i] > u_min) ++decidable;
    if (decidable < 100) throw std::invalid_argument("estimate_radius_tail: fewer than 100 decidable samples");

    std::vector<TailPoint> out;
    out.reserve(thresholds.size());
    for (double u : thresholds) {
        std::size_t exceed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (radii.censored[i] ? radii.values[i] > u : radii.values[i] > u) ++exceed;
        }
        TailPoint tp;
        tp.threshold = u;
        tp.survival = static_cast<double>(exceed) / static_cast<double>(n);
        tp.std_error = wilson_halfwidth(static_cast<double>(exceed), static_cast<double>(n));
        out.push_back(tp);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Paired insertion traces

PairedTraces mst_paired_traces(const PointConfiguration& config, std::span<const double> x, double wall_scale,
                               const TwoScalePair& pair) {
    if (!(wall_scale > 0.0)) throw std::invalid_argument("mst_paired_traces: wall scale must be > 0");
    if (wall_scale / 2.0 > pair.inner_scale)
        throw std::invalid_argument("mst_paired_traces: wall cube must fit inside the local window");

    const Window outer_w(pair.outer);
    const Window inner_w = pair.inner_window(x);
    PointConfiguration big = restrict_to(config, outer_w);
    PointConfiguration small = restrict_to(config, inner_w);

    // Candidates: points in the side-wall_scale cube around x, identified by
    // coordinates in both restrictions (restriction preserves order, so both
    // lists enumerate the same geometric points in the same order).
    const Region wall_cube = Region::cube(Point(x.begin(), x.end()), wall_scale / 2.0);
    std::vector<std::uint32_t> big_cand, small_cand;
    for (std::uint32_t i = 0; i < big.size(); ++i)
        if (wall_cube.contains(big.point(i)) && inner_w.contains(big.point(i))) big_cand.push_back(i);
    for (std::uint32_t i = 0; i < small.size(); ++i)
        if (wall_cube.contains(small.point(i))) small_cand.push_back(i);
    if (big_cand.size() != small_cand.size())
        throw std::runtime_error("mst_paired_traces: candidate lists disagree");

    PairedTraces out;
    out.candidate_count = big_cand.size();
    if (big_cand.empty()) return out;

    WeightedTree big_tree = build_mst_kruskal(big);
    WeightedTree small_tree = build_mst_kruskal(small);
    out.outer_trace = mst_insert_candidates(big_tree, x, big_cand).second;
    out.inner_trace = mst_insert_candidates(small_tree, x, small_cand).second;
    return out;
}

}  // namespace stochgeo
