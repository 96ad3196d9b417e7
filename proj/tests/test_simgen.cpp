#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "varscale/market_data.hpp"
#include "varscale/simgen.hpp"

using namespace varscale;

namespace {

StatsSummary moments(const std::vector<double>& values) {
    return descriptive_stats(values);
}

}  // namespace

TEST_CASE("generation is bit-identical for a fixed seed") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::GarchT;
    spec.n = 2000;
    spec.seed = 123456;
    spec.dof = 6.0;
    const ReturnSeries a = sim::generate_returns(spec);
    const ReturnSeries b = sim::generate_returns(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.values[i] == b.values[i]);
        CHECK(a.dates[i] == b.dates[i]);
    }

    sim::SimSpec other = spec;
    other.seed = 123457;
    const ReturnSeries c = sim::generate_returns(other);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.values[i] != c.values[i]) ++differing;
    }
    CHECK(differing > 1900);
}

TEST_CASE("iid normal sample moments at n = 1e6") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::IidNormal;
    spec.n = 1000000;
    spec.seed = 9001;
    spec.mu = 0.0005;
    spec.sigma = 0.012;
    const auto r = sim::generate_returns(spec);
    const StatsSummary s = moments(r.values);
    CHECK(s.mean == doctest::Approx(0.0005).epsilon(0.1));
    CHECK(s.sd == doctest::Approx(0.012).epsilon(0.005));
    CHECK(std::fabs(s.skewness) < 0.02);
    CHECK(s.kurtosis == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("iid t sample has the configured scale and heavy tails") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::IidT;
    spec.n = 400000;
    spec.seed = 17;
    spec.dof = 5.0;
    spec.scale = 0.01;
    const auto r = sim::generate_returns(spec);
    const StatsSummary s = moments(r.values);
    // sd of a raw t(5) variate is sqrt(5/3).
    CHECK(s.sd == doctest::Approx(0.01 * std::sqrt(5.0 / 3.0)).epsilon(0.03));
    CHECK(s.kurtosis > 4.0);
}

TEST_CASE("GARCH generator with alpha = beta = 0 is iid with sd sqrt(omega)") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::GarchNormal;
    spec.n = 200000;
    spec.seed = 404;
    spec.omega = 4e-4;
    spec.alpha = 0.0;
    spec.beta = 0.0;
    const auto r = sim::generate_returns(spec);
    const StatsSummary s = moments(r.values);
    CHECK(s.sd == doctest::Approx(0.02).epsilon(0.01));
    CHECK(s.kurtosis == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("GARCH-t paths show excess kurtosis") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::GarchT;
    spec.n = 50000;
    spec.seed = 88;
    spec.dof = 5.0;
    const auto r = sim::generate_returns(spec);
    CHECK(moments(r.values).kurtosis > 3.5);
}

TEST_CASE("price paths and the return bridge") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::GbmPrices;
    spec.n = 500;
    spec.seed = 6;
    spec.sigma = 0.01;
    spec.k0 = 250.0;
    const PriceSeries p = sim::generate_prices(spec);
    REQUIRE(p.size() == 501);  // n returns need n + 1 prices
    CHECK(p.prices[0] == 250.0);
    for (double v : p.prices) CHECK(v > 0.0);

    // to_prices inverts log_returns.
    const ReturnSeries r = log_returns(p, 1);
    const PriceSeries rebuilt = sim::to_prices(r, 250.0);
    REQUIRE(rebuilt.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(rebuilt.prices[i] == doctest::Approx(p.prices[i]).epsilon(1e-10));
    }
}

TEST_CASE("calendar grid is consecutive and sorted") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::IidNormal;
    spec.n = 1000;
    spec.seed = 1;
    const auto r = sim::generate_returns(spec);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r.dates[i - 1] < r.dates[i]);
}

TEST_CASE("invalid specs are rejected") {
    sim::SimSpec spec;
    spec.kind = sim::SimKind::IidNormal;
    spec.n = 0;
    CHECK_THROWS_AS(sim::validate(spec), std::invalid_argument);

    spec.n = 100;
    spec.sigma = -0.01;
    CHECK_THROWS_AS(sim::validate(spec), std::invalid_argument);

    sim::SimSpec garch;
    garch.kind = sim::SimKind::GarchNormal;
    garch.n = 100;
    garch.alpha = 0.6;
    garch.beta = 0.5;  // alpha + beta >= 1
    CHECK_THROWS_AS(sim::validate(garch), std::invalid_argument);

    sim::SimSpec tbad;
    tbad.kind = sim::SimKind::IidT;
    tbad.n = 100;
    tbad.dof = 0.0;
    CHECK_THROWS_AS(sim::validate(tbad), std::invalid_argument);
}

TEST_CASE("kind names round trip") {
    for (sim::SimKind k : {sim::SimKind::IidNormal, sim::SimKind::IidT,
                           sim::SimKind::GarchNormal, sim::SimKind::GarchT,
                           sim::SimKind::GbmPrices}) {
        CHECK(sim::sim_kind_from_string(sim::to_string(k)) == k);
    }
    CHECK_THROWS_AS(sim::sim_kind_from_string("nope"), std::invalid_argument);
}
