#include "varscale/simgen.hpp"

#include <cmath>
#include <stdexcept>

#include "varscale/dates.hpp"
#include "varscale/statfun.hpp"

namespace varscale::sim {

namespace {

constexpr const char* kGridStart = "2010-01-01";

}  // namespace

double Rng::uniform() {
    // 53-bit mantissa, shifted into the open interval (0,1).
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    return stat::normal_quantile(uniform());
}

double Rng::student_t(double dof) {
    return stat::t_quantile(uniform(), dof);
}

std::string to_string(SimKind k) {
    switch (k) {
        case SimKind::IidNormal: return "iid-normal";
        case SimKind::IidT: return "iid-t";
        case SimKind::GarchNormal: return "garch-normal";
        case SimKind::GarchT: return "garch-t";
        case SimKind::GbmPrices: return "gbm-prices";
    }
    throw std::logic_error("unknown sim kind");
}

SimKind sim_kind_from_string(const std::string& s) {
    if (s == "iid-normal") return SimKind::IidNormal;
    if (s == "iid-t") return SimKind::IidT;
    if (s == "garch-normal") return SimKind::GarchNormal;
    if (s == "garch-t") return SimKind::GarchT;
    if (s == "gbm-prices") return SimKind::GbmPrices;
    throw std::invalid_argument("unknown simulation kind '" + s + "'");
}

void validate(const SimSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("sim spec: n must be >= 1");
    switch (spec.kind) {
        case SimKind::IidNormal:
            if (!(spec.sigma > 0.0)) throw std::invalid_argument("sim spec: sigma must be > 0");
            break;
        case SimKind::IidT:
            if (!(spec.dof > 2.0)) throw std::invalid_argument("sim spec: dof must be > 2");
            if (!(spec.scale > 0.0)) throw std::invalid_argument("sim spec: scale must be > 0");
            break;
        case SimKind::GarchNormal:
        case SimKind::GarchT:
            if (!(spec.omega > 0.0)) throw std::invalid_argument("sim spec: omega must be > 0");
            if (spec.alpha < 0.0 || spec.beta < 0.0) {
                throw std::invalid_argument("sim spec: alpha/beta must be >= 0");
            }
            if (!(spec.alpha + spec.beta < 1.0)) {
                throw std::invalid_argument("sim spec: alpha + beta must be < 1");
            }
            if (spec.kind == SimKind::GarchT && !(spec.dof > 2.0)) {
                throw std::invalid_argument("sim spec: dof must be > 2");
            }
            break;
        case SimKind::GbmPrices:
            if (!(spec.sigma > 0.0)) throw std::invalid_argument("sim spec: sigma must be > 0");
            if (!(spec.k0 > 0.0)) throw std::invalid_argument("sim spec: k0 must be > 0");
            break;
    }
}

ReturnSeries generate_returns(const SimSpec& spec) {
    validate(spec);
    if (spec.kind == SimKind::GbmPrices) {
        throw std::invalid_argument("generate_returns: gbm-prices produces a price series");
    }
    Rng rng(spec.seed);
    ReturnSeries out;
    out.horizon = 1;
    out.dates = date_grid(kGridStart, spec.n);
    out.values.reserve(spec.n);

    switch (spec.kind) {
        case SimKind::IidNormal:
            for (std::size_t i = 0; i < spec.n; ++i) {
                out.values.push_back(spec.mu + spec.sigma * rng.normal());
            }
            break;
        case SimKind::IidT:
            for (std::size_t i = 0; i < spec.n; ++i) {
                out.values.push_back(spec.scale * rng.student_t(spec.dof));
            }
            break;
        case SimKind::GarchNormal:
        case SimKind::GarchT: {
            const bool t_innov = spec.kind == SimKind::GarchT;
            const double unit = t_innov ? std::sqrt((spec.dof - 2.0) / spec.dof) : 1.0;
            double var = spec.omega / (1.0 - spec.alpha - spec.beta);
            for (std::size_t i = 0; i < spec.n; ++i) {
                const double z = (t_innov ? rng.student_t(spec.dof) * unit : rng.normal());
                const double r = std::sqrt(var) * z;
                out.values.push_back(r);
                var = spec.omega + spec.alpha * r * r + spec.beta * var;
            }
            break;
        }
        case SimKind::GbmPrices:
            break;  // unreachable
    }
    return out;
}

PriceSeries generate_prices(const SimSpec& spec) {
    validate(spec);
    if (spec.kind != SimKind::GbmPrices) {
        throw std::invalid_argument("generate_prices: spec kind must be gbm-prices");
    }
    Rng rng(spec.seed);
    PriceSeries out;
    out.dates = date_grid(kGridStart, spec.n + 1);
    out.prices.reserve(spec.n + 1);
    double log_price = std::log(spec.k0);
    out.prices.push_back(spec.k0);
    for (std::size_t i = 0; i < spec.n; ++i) {
        log_price += spec.mu + spec.sigma * rng.normal();
        out.prices.push_back(std::exp(log_price));
    }
    return out;
}

PriceSeries to_prices(const ReturnSeries& returns, double k0) {
    if (!(k0 > 0.0)) throw std::invalid_argument("to_prices: k0 must be > 0");
    if (returns.horizon != 1) throw std::invalid_argument("to_prices: needs 1-day returns");
    PriceSeries out;
    out.prices.reserve(returns.size() + 1);
    out.dates.reserve(returns.size() + 1);

    // Prepend one date before the grid for K_0.
    if (returns.dates.empty()) throw std::invalid_argument("to_prices: empty return series");
    {
        const std::string& first = returns.dates.front();
        int y = std::stoi(first.substr(0, 4));
        int m = std::stoi(first.substr(5, 2));
        int d = std::stoi(first.substr(8, 2));
        out.dates.push_back(date_from_days(days_from_civil(y, m, d) - 1));
    }
    out.prices.push_back(k0);
    double log_price = std::log(k0);
    for (std::size_t i = 0; i < returns.size(); ++i) {
        log_price += returns.values[i];
        out.dates.push_back(returns.dates[i]);
        out.prices.push_back(std::exp(log_price));
    }
    return out;
}

}  // namespace varscale::sim
