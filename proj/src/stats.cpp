#include "stochgeo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochgeo {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double normal_pdf(double x) { return 0.39894228040143267794 * std::exp(-0.5 * x * x); }

double normal_quantile(double p) {
    // Wichura, Algorithm AS241 (PPND16).
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile needs p in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r + 6.7265770927008700853e4) * r +
                    4.5921953931549871457e4) * r + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r + 3.9307895800092710610e4) * r +
                    2.1213794301586595867e4) * r + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                  4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                   1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                 4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                   1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                 2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                   2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                 5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                   7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                 5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

double empirical_dk(const SampleSet& s) {
    if (s.values.empty()) throw std::invalid_argument("empirical_dk needs at least one value");
    std::vector<double> v = s.values;
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("sample has non-finite value");
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double phi = normal_cdf(v[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - phi));
        d = std::max(d, std::abs(static_cast<double>(i) / n - phi));
    }
    return d;
}

double empirical_dw(const SampleSet& s) {
    if (s.values.empty()) throw std::invalid_argument("empirical_dw needs at least one value");
    std::vector<double> v = s.values;
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("sample has non-finite value");
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());

    // Antiderivative of Phi is x Phi(x) + pdf(x); integrate |F_emp - Phi|
    // piecewise, splitting at the interior crossing Phi^{-1}(c).
    auto big_phi = [](double x) { return x * normal_cdf(x) + normal_pdf(x); };
    auto piece = [&](double c, double lo, double hi) {
        // int_lo^hi |c - Phi(x)| dx with Phi increasing
        auto signed_part = [&](double a, double b) { return (big_phi(b) - big_phi(a)) - c * (b - a); };
        if (c <= 0.0) return signed_part(lo, hi);
        if (c >= 1.0) return -signed_part(lo, hi);
        const double cross = normal_quantile(c);
        if (cross <= lo) return signed_part(lo, hi);
        if (cross >= hi) return -signed_part(lo, hi);
        return -signed_part(lo, cross) + signed_part(cross, hi);
    };

    double total = big_phi(v.front());  // int_{-inf}^{v1} Phi
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        total += piece(static_cast<double>(i + 1) / n, v[i], v[i + 1]);
    const double last = v.back();
    total += normal_pdf(last) - last * (1.0 - normal_cdf(last));  // int_{vn}^{inf} (1 - Phi)
    return total;
}

MetricReport normal_metrics(const SampleSet& s) {
    MetricReport r;
    r.d_k = empirical_dk(s);
    r.d_w = empirical_dw(s);
    r.sample_count = s.values.size();
    return r;
}

SampleSet standardize(const SampleSet& s) {
    if (s.values.size() < 2) throw std::invalid_argument("standardize needs at least two values");
    const double mu = mean_of(s.values);
    const double var = variance_of(s.values);
    if (!(var > 0.0)) throw std::invalid_argument("standardize: zero variance");
    const double sd = std::sqrt(var);
    SampleSet out;
    out.label = s.label;
    out.values.reserve(s.values.size());
    for (double x : s.values) out.values.push_back((x - mu) / sd);
    return out;
}

void VectorSampleSet::push_row(const std::vector<double>& row) {
    if (m == 0) m = row.size();
    if (row.size() != m) throw std::invalid_argument("vector sample row has wrong length");
    rows.insert(rows.end(), row.begin(), row.end());
}

namespace {

/// Jacobi eigenvalues of a small symmetric matrix (row-major copy).
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t m) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) off += a[i * m + j] * a[i * m + j];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = a[p * m + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < m; ++k) {
                    const double akp = a[k * m + p], akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double apk = a[p * m + k], aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(m);
    for (std::size_t i = 0; i < m; ++i) eig[i] = a[i * m + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace

CovarianceEstimate covariance_matrix(const VectorSampleSet& v) {
    const std::size_t n = v.count();
    if (n < 2) throw std::invalid_argument("covariance_matrix needs at least two rows");
    const std::size_t m = v.m;
    std::vector<double> mean(m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) mean[c] += v.at(r, c);
    for (double& x : mean) x /= static_cast<double>(n);

    CovarianceEstimate est;
    est.m = m;
    est.matrix.assign(m * m, 0.0);
    // Upper triangle accumulated once and mirrored: symmetry is exact.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t i = 0; i < m; ++i) {
            const double di = v.at(r, i) - mean[i];
            for (std::size_t j = i; j < m; ++j) est.matrix[i * m + j] += di * (v.at(r, j) - mean[j]);
        }
    const double inv = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            est.matrix[i * m + j] *= inv;
            est.matrix[j * m + i] = est.matrix[i * m + j];
        }
    est.eigenvalues = symmetric_eigenvalues(est.matrix, m);
    est.min_eigenvalue = est.eigenvalues.front();
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(est.matrix[i * m + i]));
    est.psd_within_floor = est.min_eigenvalue >= -1e-12 * std::max(scale, 1.0);
    return est;
}

VarianceFit linear_fit(const std::vector<std::pair<double, double>>& xy) {
    if (xy.size() < 2) throw std::invalid_argument("linear_fit needs at least two points");
    const double n = static_cast<double>(xy.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    VarianceFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / n;
    for (auto [x, y] : xy) {
        const double e = y - (fit.intercept + fit.slope * x);
        ss_res += e * e;
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.residual = std::sqrt(ss_res / n);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

VarianceFit variance_scaling_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("variance_scaling_fit needs at least three scales");
    std::vector<std::pair<double, double>> loglog;
    loglog.reserve(points.size());
    for (auto [n, var] : points) {
        if (!(n > 0.0)) throw std::invalid_argument("variance_scaling_fit: scale must be positive");
        if (!(var > 0.0)) throw std::invalid_argument("variance_scaling_fit: variance must be positive");
        loglog.emplace_back(std::log(n), std::log(var));
    }
    return linear_fit(loglog);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
}

double wilson_halfwidth(double successes, double trials, double z) {
    if (trials <= 0.0) return 1.0;
    const double p = successes / trials;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / trials;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials));
    return half;
}

}  // namespace stochgeo
