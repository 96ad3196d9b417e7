#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "varscale/dates.hpp"
#include "varscale/errors.hpp"
#include "varscale/simgen.hpp"
#include "varscale/statfun.hpp"
#include "varscale/var_engine.hpp"

using namespace varscale;

namespace {

// Brute-force counting oracle: order the sample, strike the floor(n * alpha)
// largest losses one by one, report the next return.
double hs_oracle(std::vector<double> sample, double p) {
    std::sort(sample.begin(), sample.end());
    const std::size_t strike =
        static_cast<std::size_t>(std::floor(sample.size() * (1.0 - p)));
    for (std::size_t i = 0; i < strike && sample.size() > 1; ++i) {
        sample.erase(sample.begin());
    }
    return sample.front();
}

ReturnSeries series_of(std::vector<double> values, int horizon = 1) {
    ReturnSeries r;
    r.horizon = horizon;
    r.dates = date_grid("2015-01-01", values.size());
    r.values = std::move(values);
    return r;
}

}  // namespace

TEST_CASE("historical simulation: counting rule") {
    std::vector<double> window;
    for (int i = 0; i < 20; ++i) window.push_back(-0.05 + 0.01 * i);
    std::shuffle(window.begin(), window.end(), std::mt19937_64(3));
    // n = 20, p = 0.95: strike one loss, VaR is the second smallest.
    CHECK(hs_var(window, 0.95) == doctest::Approx(-0.04));
    CHECK(hs_var(window, 0.99) <= hs_var(window, 0.95));

    const std::vector<double> constant(25, 0.0123);
    CHECK(hs_var(constant, 0.95) == 0.0123);
    CHECK(hs_var(constant, 0.5) == 0.0123);

    const std::vector<double> tiny(5, 0.0);
    CHECK_THROWS_AS(hs_var(tiny, 0.95), DataError);
}

TEST_CASE("historical simulation matches the counting oracle on random windows") {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<int> size_dist(20, 500);
    std::normal_distribution<double> ret(0.0, 0.02);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> window(size_dist(gen));
        for (auto& v : window) v = ret(gen);
        const double p = (trial % 2 == 0) ? 0.95 : 0.99;
        const double got = hs_var(window, p);
        CHECK(got == hs_oracle(window, p));
        CHECK(got >= *std::min_element(window.begin(), window.end()));
        CHECK(got <= *std::max_element(window.begin(), window.end()));
    }
}

TEST_CASE("interpolated historical simulation stays inside the sample") {
    std::vector<double> window;
    for (int i = 0; i < 21; ++i) window.push_back(-0.05 + 0.005 * i);
    const double v = hs_var(window, 0.95, /*interpolate=*/true);
    CHECK(v >= window.front());
    CHECK(v <= window.back());
    CHECK(hs_var(window, 0.99, true) <= hs_var(window, 0.95, true));
}

TEST_CASE("variance-covariance normal VaR") {
    // Window with mean 0 and sd 0.01: z_{0.05} * 0.01.
    std::vector<double> window;
    for (int i = 0; i < 50; ++i) window.push_back((i % 2 == 0) ? 0.01 : -0.01);
    const double sd = std::sqrt(50.0 / 49.0) * 0.01;
    const double expect = stat::normal_quantile(0.05) * sd;
    CHECK(vc_var_normal(window, 0.95, false) == doctest::Approx(expect).epsilon(1e-12));
    // Zero-mean window: include_mean makes no difference.
    CHECK(vc_var_normal(window, 0.95, true) == doctest::Approx(expect).epsilon(1e-12));
    // Doubling sigma doubles the loss magnitude (mean excluded).
    std::vector<double> doubled;
    for (double v : window) doubled.push_back(2.0 * v);
    CHECK(vc_var_normal(doubled, 0.95, false) ==
          doctest::Approx(2.0 * vc_var_normal(window, 0.95, false)).epsilon(1e-12));

    CHECK(vc_var_normal(window, 0.95, false) == doctest::Approx(-0.0164485 * sd / 0.01).epsilon(1e-4));
    const std::vector<double> constant(30, 0.01);
    CHECK_THROWS_AS(vc_var_normal(constant, 0.95, false), DataError);
}

TEST_CASE("variance-covariance t VaR") {
    std::vector<double> window;
    for (int i = 0; i < 50; ++i) window.push_back((i % 2 == 0) ? 0.01 : -0.01);
    const double sd = std::sqrt(50.0 / 49.0) * 0.01;

    // Literal quantile: t_{0.05,5} * sd.
    const double literal = vc_var_t_with_dof(window, 0.95, false, false, 5.0);
    CHECK(literal == doctest::Approx(stat::t_quantile(0.05, 5.0) * sd).epsilon(1e-12));
    CHECK(stat::t_quantile(0.05, 5.0) * 0.01 == doctest::Approx(-0.0201505).epsilon(1e-5));

    // Standardized variant rescales by sqrt((v-2)/v).
    const double standardized = vc_var_t_with_dof(window, 0.95, false, true, 5.0);
    CHECK(standardized == doctest::Approx(literal * std::sqrt(3.0 / 5.0)).epsilon(1e-12));

    // Large dof converges to the normal method.
    CHECK(vc_var_t_with_dof(window, 0.95, false, false, 1e7) ==
          doctest::Approx(vc_var_normal(window, 0.95, false)).epsilon(1e-3));
}

TEST_CASE("square-root-of-time scaling") {
    CHECK(scale_var(-0.02, 1) == -0.02);
    CHECK(scale_var(-0.02, 4) == doctest::Approx(-0.04).epsilon(1e-15));
    CHECK(scale_var(-0.02, 10) == doctest::Approx(-0.0632456).epsilon(1e-5));
    CHECK_THROWS_AS(scale_var(-0.02, 0), std::invalid_argument);
}

TEST_CASE("rolling estimation: forecast counts") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::IidNormal;
    spec.n = 260;
    spec.seed = 11;
    spec.sigma = 0.01;
    const ReturnSeries r1 = sim::generate_returns(spec);
    REQUIRE(r1.size() == 260);

    RollingConfig cfg;
    cfg.method = Method::HS;
    cfg.mode = Mode::Scaled;
    cfg.window = 250;
    cfg.horizon = 1;
    const auto forecasts = rolling_estimate(r1, r1, cfg);
    CHECK(forecasts.size() == 10);  // 260 - 250, one per daily step

    RollingConfig direct = cfg;
    direct.mode = Mode::Direct;
    CHECK(rolling_estimate(r1, r1, direct).size() == 10);
}

TEST_CASE("rolling estimation: pipeline counts on a 2611-price series") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::GbmPrices;
    spec.n = 2610;
    spec.seed = 2;
    spec.sigma = 0.012;
    const PriceSeries p = sim::generate_prices(spec);
    REQUIRE(p.size() == 2611);
    const ReturnSeries r1 = log_returns(p, 1);
    const ReturnSeries r10 = log_returns(p, 10);
    REQUIRE(r1.size() == 2610);
    REQUIRE(r10.size() == 2601);

    RollingConfig cfg;
    cfg.method = Method::VcNormal;
    cfg.mode = Mode::Direct;
    cfg.confidence = 0.95;
    cfg.horizon = 10;
    cfg.window = 250;
    const auto direct = rolling_estimate(r1, r10, cfg);
    CHECK(direct.size() == 2351);

    const auto pairs = align_for_backtest(direct, r10);
    CHECK(pairs.size() == 2341);
}

TEST_CASE("scaled mode is exactly sqrt(T) times the 1-day estimate") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::IidNormal;
    spec.n = 400;
    spec.seed = 5;
    spec.sigma = 0.01;
    const ReturnSeries r1 = sim::generate_returns(spec);

    RollingConfig scaled;
    scaled.method = Method::VcNormal;
    scaled.mode = Mode::Scaled;
    scaled.horizon = 10;
    scaled.window = 250;
    const auto f10 = rolling_estimate(r1, r1, scaled);

    RollingConfig one_day = scaled;
    one_day.horizon = 1;
    const auto f1 = rolling_estimate(r1, r1, one_day);
    REQUIRE(f1.size() == f10.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        CHECK(f10.entries[i].value == f1.entries[i].value * std::sqrt(10.0));
    }
}

TEST_CASE("99% forecasts are at least as severe as 95% forecasts") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::GarchNormal;
    spec.n = 320;
    spec.seed = 23;
    const ReturnSeries r1 = sim::generate_returns(spec);

    for (Method m : {Method::HS, Method::VcNormal}) {
        RollingConfig cfg;
        cfg.method = m;
        cfg.mode = Mode::Scaled;
        cfg.window = 250;
        cfg.horizon = 10;
        cfg.confidence = 0.95;
        const auto f95 = rolling_estimate(r1, r1, cfg);
        cfg.confidence = 0.99;
        const auto f99 = rolling_estimate(r1, r1, cfg);
        REQUIRE(f95.size() == f99.size());
        for (std::size_t i = 0; i < f95.size(); ++i) {
            CHECK(f99.entries[i].value <= f95.entries[i].value);
        }
    }
}

TEST_CASE("rolling estimation is deterministic") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::GarchT;
    spec.n = 300;
    spec.seed = 71;
    const ReturnSeries r1 = sim::generate_returns(spec);

    RollingConfig cfg;
    cfg.method = Method::VcT;
    cfg.mode = Mode::Scaled;
    cfg.window = 250;
    cfg.horizon = 10;
    const auto a = rolling_estimate(r1, r1, cfg);
    const auto b = rolling_estimate(r1, r1, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.entries[i].value == b.entries[i].value);
        CHECK(a.entries[i].carried_forward == b.entries[i].carried_forward);
    }
}

TEST_CASE("alignment pairs the first fully out-of-sample return") {
    // 30 realized h-day returns on a daily grid, horizon 10; a forecast
    // dated at index j pairs with the value at index j + 10.
    ReturnSeries realized = series_of(std::vector<double>(30, 0.0), 10);
    for (std::size_t i = 0; i < realized.size(); ++i) realized.values[i] = 0.001 * i;

    VarForecastSeries forecasts;
    forecasts.horizon = 10;
    forecasts.entries.push_back({realized.dates[3], -0.05, false});
    forecasts.entries.push_back({realized.dates[25], -0.05, false});  // 25 + 10 > end: dropped
    const auto pairs = align_for_backtest(forecasts, realized);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].realized == doctest::Approx(0.001 * 13));

    VarForecastSeries disjoint;
    disjoint.horizon = 10;
    disjoint.entries.push_back({"1999-01-01", -0.05, false});
    CHECK_THROWS_AS(align_for_backtest(disjoint, realized), DataError);
}

TEST_CASE("forecast serialization round trip") {
    VarForecastSeries series;
    series.method = Method::VcT;
    series.mode = Mode::Scaled;
    series.confidence = 0.99;
    series.horizon = 10;
    series.window = 250;
    series.entries.push_back({"2020-03-02", -0.031415926535, false});
    series.entries.push_back({"2020-03-03", -0.029, true});

    const auto parsed = parse_forecasts(serialize_forecasts(series));
    CHECK(parsed.method == Method::VcT);
    CHECK(parsed.mode == Mode::Scaled);
    CHECK(parsed.confidence == 0.99);
    CHECK(parsed.horizon == 10);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed.entries[0].value == series.entries[0].value);
    CHECK(parsed.entries[1].carried_forward);
}
