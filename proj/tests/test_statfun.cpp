#include <doctest.h>

#include <cmath>
#include <vector>

#include "varscale/errors.hpp"
#include "varscale/simgen.hpp"
#include "varscale/statfun.hpp"

using namespace varscale;

namespace {

// Independent normal CDF oracle: Simpson quadrature of the density from 0.
double normal_cdf_quadrature(double x) {
    const int steps = 20000;
    const double a = 0.0, b = x;
    const double h = (b - a) / steps;
    double sum = 0.0;
    auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
    for (int i = 0; i < steps; ++i) {
        const double lo = a + i * h;
        sum += (h / 6.0) * (pdf(lo) + 4.0 * pdf(lo + 0.5 * h) + pdf(lo + h));
    }
    return 0.5 + sum;
}

double normal_quantile_oracle(double q) {
    double lo = -20.0, hi = 20.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf_quadrature(mid) < q) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal quantile symmetry and median") {
    CHECK(stat::normal_quantile(0.5) == 0.0);
    for (double q : {0.01, 0.05, 0.1, 0.25, 0.4, 0.7, 0.9, 0.975, 0.999}) {
        CHECK(stat::normal_quantile(q) == doctest::Approx(-stat::normal_quantile(1.0 - q)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(stat::normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(stat::normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("normal quantile against quadrature oracle") {
    CHECK(stat::normal_quantile(0.05) == doctest::Approx(-1.6448536).epsilon(1e-6));
    for (double q : {0.01, 0.05, 0.2, 0.5, 0.8, 0.95, 0.99}) {
        const double oracle = q == 0.5 ? 0.0 : normal_quantile_oracle(q);
        CHECK(std::fabs(stat::normal_quantile(q) - oracle) < 1e-9);
    }
}

TEST_CASE("quantile/CDF round trips") {
    std::vector<double> grid;
    for (double q = 0.001; q < 1.0; q += 0.02) grid.push_back(q);
    grid.push_back(0.999);
    for (double q : grid) {
        CHECK(stat::normal_cdf(stat::normal_quantile(q)) == doctest::Approx(q).epsilon(1e-7));
        CHECK(stat::t_cdf(stat::t_quantile(q, 3.0), 3.0) == doctest::Approx(q).epsilon(1e-7));
        CHECK(stat::t_cdf(stat::t_quantile(q, 0.7), 0.7) == doctest::Approx(q).epsilon(1e-7));
        CHECK(stat::chisq_cdf(stat::chisq_quantile(q, 1.0), 1.0) == doctest::Approx(q).epsilon(1e-7));
        CHECK(stat::chisq_cdf(stat::chisq_quantile(q, 2.0), 2.0) == doctest::Approx(q).epsilon(1e-7));
    }
}

TEST_CASE("t quantile closed forms and limits") {
    CHECK(stat::t_quantile(0.5, 7.3) == 0.0);
    // Cauchy closed form tan(pi (q - 1/2)).
    CHECK(stat::t_quantile(0.75, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(stat::t_quantile(0.9, 1.0) == doctest::Approx(std::tan(M_PI * 0.4)).epsilon(1e-8));
    // Large-v limit approaches the normal quantile.
    CHECK(stat::t_quantile(0.05, 1e6) == doctest::Approx(stat::normal_quantile(0.05)).epsilon(1e-4));
}

TEST_CASE("t quantile monotonicity in q and tail weight in v") {
    double prev = -1e300;
    for (double q = 0.01; q < 1.0; q += 0.03) {
        const double x = stat::t_quantile(q, 4.0);
        CHECK(x > prev);
        prev = x;
    }
    // Heavier tails as v shrinks: the 5% quantile moves further left.
    double prev_q = 0.0;
    for (double v : {50.0, 10.0, 4.0, 2.0, 1.0, 0.5}) {
        const double x = stat::t_quantile(0.05, v);
        CHECK(x < prev_q);
        prev_q = x;
    }
}

TEST_CASE("chi-square critical values") {
    CHECK(stat::chisq_quantile(0.95, 1.0) == doctest::Approx(3.841).epsilon(5e-4));
    CHECK(stat::chisq_quantile(0.95, 2.0) == doctest::Approx(5.991).epsilon(5e-4));
    CHECK(stat::chisq_quantile(0.99, 1.0) == doctest::Approx(6.635).epsilon(5e-4));
    CHECK(stat::chisq_quantile(0.99, 2.0) == doctest::Approx(9.210).epsilon(5e-4));
    // df = 2 is exponential: quantile(q) = -2 ln(1 - q).
    for (double q : {0.1, 0.5, 0.9, 0.95, 0.99}) {
        CHECK(stat::chisq_quantile(q, 2.0) == doctest::Approx(-2.0 * std::log1p(-q)).epsilon(1e-9));
    }
    CHECK(stat::chisq_quantile(0.95, 2.0) == doctest::Approx(5.99146).epsilon(1e-5));
}

TEST_CASE("t location-scale MLE recovers simulated parameters") {
    sim::Rng rng(20240811);
    std::vector<double> sample;
    sample.reserve(50000);
    for (int i = 0; i < 50000; ++i) sample.push_back(0.01 * rng.student_t(5.0));

    const auto fit = stat::fit_t_mle(sample);
    CHECK(fit.converged);
    CHECK(fit.dof > 4.2);
    CHECK(fit.dof < 5.8);
    CHECK(fit.scale == doctest::Approx(0.01).epsilon(0.05));
    CHECK(std::fabs(fit.location) < 5e-4);

    // Likelihood at the fitted point beats the moment-based start.
    const double n = static_cast<double>(sample.size());
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    CHECK(fit.loglik >= stat::t_loc_scale_loglik(sample, mean, sd, 8.0));
}

TEST_CASE("t MLE on a normal sample drifts to a large dof") {
    sim::Rng rng(7);
    std::vector<double> sample;
    sample.reserve(50000);
    for (int i = 0; i < 50000; ++i) sample.push_back(rng.normal());
    const auto fit = stat::fit_t_mle(sample);
    CHECK(fit.dof > 20.0);
}

TEST_CASE("t MLE rejects degenerate samples") {
    std::vector<double> constant(30, 0.42);
    CHECK_THROWS_AS(stat::fit_t_mle(constant), DataError);
    std::vector<double> tiny(5, 1.0);
    CHECK_THROWS_AS(stat::fit_t_mle(tiny), std::invalid_argument);
}
