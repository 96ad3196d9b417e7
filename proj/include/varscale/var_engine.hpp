#pragma once

#include <span>
#include <string>
#include <vector>

#include "varscale/garch.hpp"
#include "varscale/market_data.hpp"
#include "varscale/statfun.hpp"

namespace varscale {

enum class Method { HS, VcNormal, VcT, GarchNormal, GarchT };
enum class Mode { Direct, Scaled };

std::string to_string(Method m);
std::string to_string(Mode m);
Method method_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);

// Signed VaR forecast (negative = loss region). In scaled mode the value is
// exactly sqrt(T) times the underlying 1-day estimate.
struct VarForecast {
    std::string as_of_date;
    double value = 0.0;
    bool carried_forward = false;
};

struct VarForecastSeries {
    Method method = Method::HS;
    Mode mode = Mode::Direct;
    double confidence = 0.95;
    int horizon = 10;
    int window = 250;
    std::vector<VarForecast> entries;

    std::size_t size() const { return entries.size(); }
};

// Historical simulation: sort ascending, strike the floor(n * (1-p)) largest
// losses, take the next return. `interpolate` switches to the linearly
// interpolated empirical quantile instead.
double hs_var(std::span<const double> window, double p, bool interpolate = false);

// VaR = mean * [include_mean] + z_{1-p} * sample sd.
double vc_var_normal(std::span<const double> window, double p, bool include_mean);

// VaR = mean * [include_mean] + t_{1-p,v} * sample sd, with v supplied by the
// caller. `standardized` multiplies the quantile by sqrt((v-2)/v) for v > 2.
double vc_var_t_with_dof(std::span<const double> window, double p, bool include_mean,
                         bool standardized, double dof);

// As above with v from a maximum-likelihood Student-t fit on the window;
// raises EstimationFailure when the fit does not converge.
double vc_var_t(std::span<const double> window, double p, bool include_mean,
                bool standardized = false);

// Square-root-of-time rule.
double scale_var(double var_1d, int horizon);

struct RollingConfig {
    Method method = Method::VcNormal;
    Mode mode = Mode::Direct;
    double confidence = 0.95;
    int horizon = 10;
    int window = 250;
    bool hs_interpolate = false;
    bool t_standardized_vc = false;     // Eq.-style raw t quantile by default
    bool t_standardized_garch = true;   // unit-variance innovations by default
    garch::ArmaOrder arma_order;        // selected once per dataset
};

// Rolling one-day-step estimation. Direct mode walks the h-day (overlapping)
// series with the mean included; scaled mode walks the 1-day series with the
// mean omitted and multiplies by sqrt(T). Estimator failures reuse the
// previous value with carried_forward = true; a failure on the very first
// window aborts the run.
VarForecastSeries rolling_estimate(const ReturnSeries& returns_1d,
                                   const ReturnSeries& returns_hd,
                                   const RollingConfig& config);

struct BacktestPair {
    std::string as_of_date;
    double forecast = 0.0;
    double realized = 0.0;
};

// Pair each forecast dated t with the realized h-day return ending at t + T
// (the first fully out-of-sample return); forecasts without a realized value
// are dropped.
std::vector<BacktestPair> align_for_backtest(const VarForecastSeries& forecasts,
                                             const ReturnSeries& realized_hd);

// `as_of_date,value,method,mode,confidence,horizon,carried_forward` text.
std::string serialize_forecasts(const VarForecastSeries& series);
VarForecastSeries parse_forecasts(const std::string& text);

}  // namespace varscale
