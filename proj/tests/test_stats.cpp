#include <doctest.h>

#include <cmath>

#include "stochgeo/rng.hpp"
#include "stochgeo/stats.hpp"

using namespace stochgeo;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("normal cdf quantile round trip") {
    for (double p : {1e-8, 0.001, 0.2, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
}

TEST_CASE("kolmogorov distance exact values") {
    SUBCASE("two symmetric points") {
        const double d = empirical_dk(SampleSet{{-1.0, 1.0}, ""});
        CHECK(std::abs(d - (normal_cdf(1.0) - 0.5)) < 1e-5);
        CHECK(d == doctest::Approx(0.34134).epsilon(1e-4));
    }
    SUBCASE("quantile construction reaches the floor 1/(2n)") {
        for (std::size_t n : {10u, 100u, 1000u}) {
            SampleSet s;
            for (std::size_t i = 1; i <= n; ++i)
                s.values.push_back(normal_quantile((static_cast<double>(i) - 0.5) / static_cast<double>(n)));
            CHECK(std::abs(empirical_dk(s) - 0.5 / static_cast<double>(n)) < 1e-12);
        }
    }
    SUBCASE("single point at the median") {
        CHECK(empirical_dk(SampleSet{{0.0}, ""}) == doctest::Approx(0.5));
    }
    SUBCASE("bounded by one and empty rejected") {
        CHECK(empirical_dk(SampleSet{{1e9}, ""}) <= 1.0);
        CHECK_THROWS_AS(empirical_dk(SampleSet{}), std::invalid_argument);
    }
}

TEST_CASE("wasserstein distance exact values") {
    SUBCASE("point mass at zero") {
        CHECK(empirical_dw(SampleSet{{0.0}, ""}) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-6));
    }
    SUBCASE("symmetry under negation") {
        Rng rng({501, 0});
        SampleSet s;
        for (int i = 0; i < 200; ++i) s.values.push_back(rng.normal() * 1.3 + 0.2);
        SampleSet neg;
        for (double v : s.values) neg.values.push_back(-v);
        CHECK(empirical_dw(s) == doctest::Approx(empirical_dw(neg)).epsilon(1e-12));
    }
    SUBCASE("quantile sample converges") {
        const std::size_t n = 10000;
        SampleSet s;
        for (std::size_t i = 1; i <= n; ++i)
            s.values.push_back(normal_quantile((static_cast<double>(i) - 0.5) / static_cast<double>(n)));
        CHECK(empirical_dw(s) < 1e-3);
    }
    SUBCASE("location shift moves the distance by at most the shift") {
        Rng rng({502, 0});
        SampleSet s;
        for (int i = 0; i < 300; ++i) s.values.push_back(rng.normal());
        const double base = empirical_dw(s);
        for (int trial = 0; trial < 10; ++trial) {
            const double c = rng.uniform(-2.0, 2.0);
            SampleSet shifted;
            for (double v : s.values) shifted.values.push_back(v + c);
            CHECK(std::abs(empirical_dw(shifted) - base) <= std::abs(c) + 1e-9);
        }
    }
}

TEST_CASE("standardize") {
    SUBCASE("two point sample") {
        const auto s = standardize(SampleSet{{0.0, 2.0}, ""});
        CHECK(s.values[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
        CHECK(s.values[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    SUBCASE("affine invariance") {
        Rng rng({503, 0});
        SampleSet s;
        for (int i = 0; i < 100; ++i) s.values.push_back(rng.normal());
        SampleSet affine;
        for (double v : s.values) affine.values.push_back(3.7 * v - 11.0);
        const auto a = standardize(s);
        const auto b = standardize(affine);
        for (std::size_t i = 0; i < a.values.size(); ++i)
            CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-10));
    }
    SUBCASE("idempotent to 1e-12") {
        Rng rng({504, 0});
        SampleSet s;
        for (int i = 0; i < 50; ++i) s.values.push_back(rng.uniform(0.0, 10.0));
        const auto once = standardize(s);
        const auto twice = standardize(once);
        for (std::size_t i = 0; i < once.values.size(); ++i)
            CHECK(std::abs(once.values[i] - twice.values[i]) < 1e-12);
    }
    SUBCASE("degenerate samples rejected") {
        CHECK_THROWS_AS(standardize(SampleSet{{1.0, 1.0, 1.0}, ""}), std::invalid_argument);
        CHECK_THROWS_AS(standardize(SampleSet{{1.0}, ""}), std::invalid_argument);
    }
}

TEST_CASE("covariance matrix") {
    SUBCASE("duplicated coordinate reports the zero eigenvalue") {
        VectorSampleSet v;
        Rng rng({505, 0});
        for (int i = 0; i < 100; ++i) {
            const double x = rng.normal();
            v.push_row({x, x});
        }
        const auto est = covariance_matrix(v);
        CHECK(std::abs(est.min_eigenvalue) < 1e-10);
        CHECK(est.at(0, 1) == est.at(1, 0));
    }
    SUBCASE("independent normal columns have small off-diagonals") {
        VectorSampleSet v;
        Rng rng({506, 0});
        const int n = 100000;
        for (int i = 0; i < n; ++i) v.push_row({rng.normal(), rng.normal(), rng.normal()});
        const auto est = covariance_matrix(v);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                if (i == j) {
                    CHECK(est.at(i, j) == doctest::Approx(1.0).epsilon(0.05));
                } else {
                    CHECK(std::abs(est.at(i, j)) < 4.0 / std::sqrt(static_cast<double>(n)));
                    CHECK(est.at(i, j) == est.at(j, i));  // exactly symmetric
                }
            }
        CHECK(est.psd_within_floor);
    }
    SUBCASE("perfect anticorrelation") {
        VectorSampleSet v;
        Rng rng({507, 0});
        for (int i = 0; i < 60; ++i) {
            const double x = rng.normal();
            v.push_row({x, -x});
        }
        const auto est = covariance_matrix(v);
        CHECK(est.at(0, 0) == doctest::Approx(-est.at(0, 1)));
        CHECK(est.at(1, 1) == doctest::Approx(est.at(0, 0)));
    }
    SUBCASE("fewer than two rows rejected") {
        VectorSampleSet v;
        v.push_row({1.0, 2.0});
        CHECK_THROWS_AS(covariance_matrix(v), std::invalid_argument);
    }
}

TEST_CASE("variance scaling fit") {
    SUBCASE("exact power law") {
        std::vector<std::pair<double, double>> pts;
        for (double n : {4.0, 8.0, 16.0, 32.0}) pts.emplace_back(n, 7.0 * n * n);
        const auto fit = variance_scaling_fit(pts);
        CHECK(std::abs(fit.slope - 2.0) < 1e-9);
        CHECK(fit.intercept == doctest::Approx(std::log(7.0)));
    }
    SUBCASE("constant variance has zero slope") {
        std::vector<std::pair<double, double>> pts{{2.0, 5.0}, {4.0, 5.0}, {8.0, 5.0}};
        CHECK(std::abs(variance_scaling_fit(pts).slope) < 1e-12);
    }
    SUBCASE("one percent noise keeps the exponent within 0.05") {
        Rng rng({508, 0});
        std::vector<std::pair<double, double>> pts;
        for (double n : {4.0, 6.0, 9.0, 14.0, 21.0, 32.0})
            pts.emplace_back(n, n * n * (1.0 + 0.01 * (2.0 * rng.uniform01() - 1.0)));
        CHECK(std::abs(variance_scaling_fit(pts).slope - 2.0) < 0.05);
    }
    SUBCASE("nonpositive variance rejected") {
        CHECK_THROWS_AS(variance_scaling_fit({{1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(variance_scaling_fit({{1.0, 1.0}, {2.0, 2.0}}), std::invalid_argument);
    }
}
