#pragma once

#include <limits>
#include <vector>

#include "stochgeo/functionals.hpp"
#include "stochgeo/graphs.hpp"

namespace stochgeo {

/// Two evaluation scales around a global window: the outer region B_n, and
/// per-site local windows A_x = (x + inner_scale * B_0) clipped to B_n, where
/// B_0 is the unit-scale region of the same shape as B_n. For sites deeper
/// than margin_factor * inner_scale inside the outer region, the local window
/// is unclipped.
struct TwoScalePair {
    Region outer;
    double inner_scale = 1.0;
    double margin_factor = 0.0;  // must exceed the unit base region diameter

    TwoScalePair(Region outer_region, double b, double theta = 0.0);

    Region inner_region(std::span<const double> x) const;
    Window inner_window(std::span<const double> x) const;

    /// The site margin theta * b_n, clamped so at least the center survives.
    double site_margin() const;
    /// Outer region shrunk by site_margin(); collapses toward the center for
    /// margins at or beyond the outer scale.
    Region shrunk_site_region() const;

    /// Whether two local windows are guaranteed disjoint (shape-aware test on
    /// the unclipped translates; conservative for clipped ones).
    bool locally_disjoint(std::span<const double> x, std::span<const double> y) const;
};

double default_margin_factor(const Region& base_shape_region);

/// |D_x F(B_n) - D_x F(A_x)| with common random input: both costs are
/// evaluated on the same configuration.
double two_scale_discrepancy(const FunctionalSpec& f, const PointConfiguration& config, const TwoScalePair& pair,
                             std::span<const double> x, Mark m);

struct SiteEstimate {
    Point site;
    Point site2;  // second point of the pair for the augmented variant
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t replicas = 0;
};

struct DiscrepancyEstimate {
    std::vector<SiteEstimate> per_site;
    double sup_estimate = 0.0;
};

/// Monte Carlo estimate of the per-site mean two-scale discrepancy and its
/// sup over sites. One fresh Poisson configuration per replica, shared by
/// every site and both scales; time-marked functionals integrate the probe
/// mark by drawing it uniformly per (replica, site). Replicas run on
/// independent seed substreams into preassigned slots, so the estimate is
/// identical for every thread count. Sites must lie in the shrunk outer
/// region.
DiscrepancyEstimate estimate_psi(const FunctionalSpec& f, const TwoScalePair& pair,
                                 const std::vector<Point>& sites, std::size_t replicas, SeedState seed,
                                 std::size_t threads = 1, bool require_shrunk_sites = true);

/// The pair variant: |D_x F^y(B_n) - D_x F^y(A_x)| over site pairs whose
/// local windows are disjoint (checked; violating pairs are an error).
DiscrepancyEstimate estimate_phi(const FunctionalSpec& f, const TwoScalePair& pair,
                                 const std::vector<std::pair<Point, Point>>& site_pairs, std::size_t replicas,
                                 SeedState seed, std::size_t threads = 1);

/// Wall event at scale u: every boundary point x' of the side-u cube around
/// x that lies in the window must have a configuration point in the lens
/// B(x, 3/4 |x-x'|) ∩ B(x', 3/4 |x-x'|). Decided on a deterministic boundary
/// lattice with shrunken lenses (factor 0.74), which certifies the condition
/// for every boundary point near a lattice site: the result can only err
/// toward `false` (never a false positive). Requires 0 < u < 2 * window
/// scale.
bool wall_event(const PointConfiguration& config, std::span<const double> x, double u, const Region& window);

/// Smallest R such that the cube of side R centered at x contains every edge
/// incident to x in MST(config|window + x); 0 when the window holds no other
/// point. Equals twice the max L-infinity distance to an MST neighbour.
double mst_attachment_radius(const PointConfiguration& config, std::span<const double> x, const Region& window);

/// Cone axes (unit vectors) such that every direction of R^d is within pi/6
/// of some axis; d = 2 (six axes) and d = 3 (icosahedral vertex/face/edge
/// directions) only.
const std::vector<Point>& cone_axes(std::size_t d);

/// Verifies the pi/6 covering property of cone_axes(d) on `samples` random
/// directions.
bool cone_cover_is_valid(std::size_t d, std::size_t samples = 200000, SeedState seed = {777, 0});

/// Twice the max over cones of the distance from x to the nearest
/// configuration point in the cone with mark < t; +infinity (censored) when
/// some cone holds no earlier point.
double onng_stabilization_radius(const PointConfiguration& config, std::span<const double> x, double t);

constexpr double kCensored = std::numeric_limits<double>::infinity();

/// At least two disjoint components of the radius-u geometric graph on the
/// annulus outer \ inner reach within u/2 of both boundaries (the Boolean
/// occupied set with balls of radius u/2 crosses the annulus twice).
bool two_arm_event_boolean(const PointConfiguration& config, const Region& inner, const Region& outer, double u);

/// Cube-shell variant at fixed graph radius r: components of the r-graph on
/// points in the side-N cube minus the side-a cube, touching both shells
/// within r. Requires r <= a <= N.
bool two_arm_event_components(const PointConfiguration& config, double r, double a, double N, const Point& center);

struct GammaTerms {
    double gamma3 = 0.0;
    double gamma4 = 0.0;
    double gamma5 = 0.0;
    double lambda_b = 0.0;        // lambda(B)
    double lambda2_overlap = 0.0; // lambda^2 of {(x,y) in B^2 : A_x and A_y meet}
};

/// Geometric terms of the multidimensional bounds for base scale n, local
/// scale b_n and normalizations sigma_i. Exact closed form for cubes; the
/// ball overlap mass integrates lens volumes by adaptive quadrature
/// (relative tolerance 1e-6).
GammaTerms gamma_geometric(double n, double b_n, std::size_t d, const std::vector<double>& sigmas,
                           Shape shape = Shape::Cube);

/// Monte Carlo assembly of the covariance-mismatch term: sum over (i,j) of
/// |Sigma(i,j) sigma_i sigma_j - Cov(F_i,F_j)| / (sigma_i sigma_j), with the
/// target Sigma supplied by the caller and the covariance estimated from
/// replicas. Flagged as a Monte Carlo quantity wherever reported.
double gamma1_estimate(const std::vector<double>& sigma_targets_flat, const std::vector<double>& covariance_flat,
                       const std::vector<double>& sigmas);

/// Monte Carlo assembly of the discrepancy term from a psi/phi estimate:
/// (sum 1/sigma_i)^2 sqrt(sup^(1-q/p) * lambda^2(disjoint pairs)), with
/// p = infinity admitted as exponent one. The disjoint-pair mass is
/// lambda(B)^2 minus the overlap mass from gamma_geometric.
double gamma2_estimate(const DiscrepancyEstimate& est, const std::vector<double>& sigmas, double lambda2_disjoint,
                       double q = 4.0, double p = std::numeric_limits<double>::infinity());

struct RadiusSample {
    std::vector<double> values;  // censored entries hold the censoring cap
    std::vector<char> censored;

    void add(double value, bool is_censored) {
        values.push_back(value);
        censored.push_back(is_censored ? 1 : 0);
    }
    std::size_t size() const { return values.size(); }
};

struct TailPoint {
    double threshold = 0.0;
    double survival = 0.0;
    double std_error = 0.0;
};

/// Empirical survival P[R > u] with Wilson standard errors. A censored value
/// counts as exceeding thresholds below its cap and as not exceeding those
/// above it (so reported survival is a lower bound there). Requires at least
/// 100 samples decidable at the smallest threshold.
std::vector<TailPoint> estimate_radius_tail(const RadiusSample& radii, const std::vector<double>& thresholds);

/// Paired add-and-delete traces for the two-scale MST diagnostics: both the
/// global-window and local-window insertions process the same candidate list
/// (configuration points in the side-`wall_scale` cube around x, in
/// configuration order), so removed edges are comparable step by step.
struct PairedTraces {
    InsertionTrace outer_trace;
    InsertionTrace inner_trace;
    std::size_t candidate_count = 0;
};

PairedTraces mst_paired_traces(const PointConfiguration& config, std::span<const double> x, double wall_scale,
                               const TwoScalePair& pair);

}  // namespace stochgeo
