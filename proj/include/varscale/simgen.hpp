#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "varscale/market_data.hpp"

namespace varscale::sim {

// Deterministic random stream: std::mt19937_64 (algorithm fixed by the C++
// standard) with variates drawn through the inverse-CDF quantiles, so
// independent implementations can reproduce the exact sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();                 // open interval (0,1)
    double normal();                  // standard normal via inverse CDF
    double student_t(double dof);     // raw t variate via inverse CDF

private:
    std::mt19937_64 engine_;
};

enum class SimKind { IidNormal, IidT, GarchNormal, GarchT, GbmPrices };

std::string to_string(SimKind k);
SimKind sim_kind_from_string(const std::string& s);

struct SimSpec {
    SimKind kind = SimKind::IidNormal;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    // iid-normal / gbm-prices
    double mu = 0.0;
    double sigma = 0.01;
    // iid-t
    double dof = 5.0;
    double scale = 0.01;
    // garch-normal / garch-t (standardized innovations, zero mean)
    double omega = 1e-6;
    double alpha = 0.08;
    double beta = 0.90;
    // gbm-prices
    double k0 = 100.0;
};

void validate(const SimSpec& spec);

// Synthetic return series on a consecutive calendar-date grid; deterministic
// given (spec, seed).
ReturnSeries generate_returns(const SimSpec& spec);

// Geometric price path K_t = K_0 exp(sum of normal log returns).
PriceSeries generate_prices(const SimSpec& spec);

// Exponentiate cumulative log returns from k0 so any synthetic return series
// can feed the price-based pipeline. The extra leading date carries K_0.
PriceSeries to_prices(const ReturnSeries& returns, double k0);

}  // namespace varscale::sim
