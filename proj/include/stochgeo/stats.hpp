#pragma once

#include <string>
#include <vector>

namespace stochgeo {

double normal_cdf(double x);
double normal_pdf(double x);
/// Inverse standard normal CDF (Wichura's AS241, double precision).
double normal_quantile(double p);

struct SampleSet {
    std::vector<double> values;
    std::string label;
};

struct MetricReport {
    double d_k = 0.0;
    double d_w = 0.0;
    std::size_t sample_count = 0;
    std::string reference = "standard_normal";
};

/// Kolmogorov distance between the empirical law of `s` and the standard
/// normal: exact sup over the CDF breakpoints of the sorted sample.
double empirical_dk(const SampleSet& s);

/// 1-Wasserstein distance to the standard normal via the CDF-difference
/// integral; piecewise exact between breakpoints, tails analytic.
double empirical_dw(const SampleSet& s);

MetricReport normal_metrics(const SampleSet& s);

/// Centered and scaled to unit sample variance (divisor n-1).
SampleSet standardize(const SampleSet& s);

struct VectorSampleSet {
    std::size_t m = 0;
    std::vector<double> rows;  // row-major, rows.size() = count * m

    std::size_t count() const { return m == 0 ? 0 : rows.size() / m; }
    double at(std::size_t row, std::size_t col) const { return rows[row * m + col]; }
    void push_row(const std::vector<double>& row);
};

struct CovarianceEstimate {
    std::size_t m = 0;
    std::vector<double> matrix;      // row-major, exactly symmetric
    std::vector<double> eigenvalues; // ascending
    double min_eigenvalue = 0.0;
    bool psd_within_floor = true;    // min eigenvalue >= -1e-12 * trace scale

    double at(std::size_t i, std::size_t j) const { return matrix[i * m + j]; }
};

/// Unbiased sample covariance with symmetric accumulation (never
/// symmetrized after the fact). Eigenvalues are reported so rank deficiency
/// is visible; nothing is clamped.
CovarianceEstimate covariance_matrix(const VectorSampleSet& v);

struct VarianceFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS residual of the log-log fit
    double r_squared = 1.0;
};

/// Least squares of log(variance) against log(n); the slope estimates the
/// variance growth exponent.
VarianceFit variance_scaling_fit(const std::vector<std::pair<double, double>>& points);

/// Plain least squares of y against x (used for tail-slope diagnostics).
VarianceFit linear_fit(const std::vector<std::pair<double, double>>& xy);

double mean_of(const std::vector<double>& v);
double variance_of(const std::vector<double>& v);  // unbiased

/// Wilson score interval half-width for a binomial proportion (z = 1).
double wilson_halfwidth(double successes, double trials, double z = 1.0);

}  // namespace stochgeo
