#include "varscale/var_engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "varscale/errors.hpp"
#include "varscale/format.hpp"

namespace varscale {

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd_of(std::span<const double> x) {
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    // Relative floor: cancellation on a constant window leaves a nonzero
    // residue that must still count as degenerate.
    if (ss <= std::max(1e-300, m * m * 1e-24 * static_cast<double>(x.size()))) return 0.0;
    return std::sqrt(ss / (static_cast<double>(x.size()) - 1.0));
}

void require_confidence(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("confidence must be in (0,1)");
    }
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::HS: return "hs";
        case Method::VcNormal: return "vc-normal";
        case Method::VcT: return "vc-t";
        case Method::GarchNormal: return "garch-normal";
        case Method::GarchT: return "garch-t";
    }
    throw std::logic_error("unknown method");
}

std::string to_string(Mode m) {
    return m == Mode::Direct ? "direct" : "scaled";
}

Method method_from_string(const std::string& s) {
    if (s == "hs") return Method::HS;
    if (s == "vc-normal") return Method::VcNormal;
    if (s == "vc-t") return Method::VcT;
    if (s == "garch-normal") return Method::GarchNormal;
    if (s == "garch-t") return Method::GarchT;
    throw std::invalid_argument("unknown method '" + s + "'");
}

Mode mode_from_string(const std::string& s) {
    if (s == "direct") return Mode::Direct;
    if (s == "scaled") return Mode::Scaled;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

double hs_var(std::span<const double> window, double p, bool interpolate) {
    require_confidence(p);
    if (window.size() < 20) throw DataError("hs_var: window too short");
    std::vector<double> sorted(window.begin(), window.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double alpha = 1.0 - p;
    if (interpolate) {
        const double h = (n - 1.0) * alpha;
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        if (lo + 1 >= sorted.size()) return sorted.back();
        return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    }
    // Strike the floor(n * alpha) largest losses; VaR is the next return.
    std::size_t k = static_cast<std::size_t>(std::floor(n * alpha));
    if (k >= sorted.size()) k = sorted.size() - 1;
    return sorted[k];
}

double vc_var_normal(std::span<const double> window, double p, bool include_mean) {
    require_confidence(p);
    if (window.size() < 2) throw DataError("vc_var_normal: window too short");
    const double sd = sd_of(window);
    if (!(sd > 0.0)) throw DataError("vc_var_normal: degenerate window");
    const double mu = include_mean ? mean_of(window) : 0.0;
    return mu + stat::normal_quantile(1.0 - p) * sd;
}

double vc_var_t_with_dof(std::span<const double> window, double p, bool include_mean,
                         bool standardized, double dof) {
    require_confidence(p);
    if (window.size() < 2) throw DataError("vc_var_t: window too short");
    if (!(dof > 0.0)) throw std::invalid_argument("vc_var_t: dof must be positive");
    const double sd = sd_of(window);
    if (!(sd > 0.0)) throw DataError("vc_var_t: degenerate window");
    double quantile = stat::t_quantile(1.0 - p, dof);
    if (standardized && dof > 2.0) quantile *= std::sqrt((dof - 2.0) / dof);
    const double mu = include_mean ? mean_of(window) : 0.0;
    return mu + quantile * sd;
}

double vc_var_t(std::span<const double> window, double p, bool include_mean,
                bool standardized) {
    const auto fit = stat::fit_t_mle(window);
    if (!fit.converged) {
        throw EstimationFailure("vc_var_t: t-df maximum likelihood did not converge");
    }
    return vc_var_t_with_dof(window, p, include_mean, standardized, fit.dof);
}

double scale_var(double var_1d, int horizon) {
    if (horizon < 1) throw std::invalid_argument("scale_var: horizon must be >= 1");
    return var_1d * std::sqrt(static_cast<double>(horizon));
}

namespace {

double estimate_window(std::span<const double> window, const RollingConfig& cfg,
                       bool include_mean) {
    switch (cfg.method) {
        case Method::HS:
            return hs_var(window, cfg.confidence, cfg.hs_interpolate);
        case Method::VcNormal:
            return vc_var_normal(window, cfg.confidence, include_mean);
        case Method::VcT:
            return vc_var_t(window, cfg.confidence, include_mean, cfg.t_standardized_vc);
        case Method::GarchNormal:
        case Method::GarchT: {
            const auto innov = cfg.method == Method::GarchT
                                   ? garch::Innovations::StudentT
                                   : garch::Innovations::Normal;
            auto fit = garch::fit_arma_garch(window, cfg.arma_order, innov);
            if (!fit.converged) {
                throw EstimationFailure("garch fit did not converge");
            }
            auto [mu, sigma] = garch::forecast_one_step(fit, window);
            const double mu_used = include_mean ? mu : 0.0;
            return garch::garch_var(mu_used, sigma, cfg.confidence, innov,
                                    fit.params.dof, cfg.t_standardized_garch);
        }
    }
    throw std::logic_error("unknown method");
}

}  // namespace

VarForecastSeries rolling_estimate(const ReturnSeries& returns_1d,
                                   const ReturnSeries& returns_hd,
                                   const RollingConfig& cfg) {
    require_confidence(cfg.confidence);
    if (cfg.window < 20) throw std::invalid_argument("rolling_estimate: window must be >= 20");
    if (cfg.horizon < 1) throw std::invalid_argument("rolling_estimate: horizon must be >= 1");

    const bool scaled = cfg.mode == Mode::Scaled;
    const ReturnSeries& base = scaled ? returns_1d : returns_hd;
    const std::size_t w = static_cast<std::size_t>(cfg.window);
    if (base.size() <= w) {
        throw DataError("rolling_estimate: not enough observations for one window");
    }
    const std::size_t count = base.size() - w;
    const bool include_mean = !scaled;  // scaled mode drops the mean

    VarForecastSeries out;
    out.method = cfg.method;
    out.mode = cfg.mode;
    out.confidence = cfg.confidence;
    out.horizon = cfg.horizon;
    out.window = cfg.window;
    out.entries.resize(count);

    // Per-window estimates are independent; carry-forward is a sequential
    // post-pass over the results.
    std::vector<double> raw(count);
    std::vector<char> failed(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        std::span<const double> window(base.values.data() + i, w);
        try {
            raw[i] = estimate_window(window, cfg, include_mean);
        } catch (const EstimationFailure&) {
            failed[i] = 1;
        }
    }
    if (failed[0]) {
        throw EstimationFailure("rolling_estimate: estimator failed on the first window (" +
                                to_string(cfg.method) + "/" + to_string(cfg.mode) +
                                "), nothing to carry forward");
    }

    double last = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        VarForecast& f = out.entries[i];
        f.as_of_date = base.dates[i + w];  // first date past the estimation window
        if (failed[i]) {
            f.value = last;
            f.carried_forward = true;
        } else {
            f.value = scaled ? scale_var(raw[i], cfg.horizon) : raw[i];
            f.carried_forward = false;
        }
        last = f.value;
    }
    return out;
}

std::vector<BacktestPair> align_for_backtest(const VarForecastSeries& forecasts,
                                             const ReturnSeries& realized_hd) {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(realized_hd.size());
    for (std::size_t i = 0; i < realized_hd.size(); ++i) index.emplace(realized_hd.dates[i], i);

    const std::size_t T = static_cast<std::size_t>(forecasts.horizon);
    std::vector<BacktestPair> pairs;
    pairs.reserve(forecasts.size());
    for (const auto& f : forecasts.entries) {
        const auto it = index.find(f.as_of_date);
        if (it == index.end()) continue;
        const std::size_t target = it->second + T;
        if (target >= realized_hd.size()) continue;  // beyond the data end
        pairs.push_back({f.as_of_date, f.value, realized_hd.values[target]});
    }
    if (pairs.empty()) {
        throw DataError("align_for_backtest: no overlap between forecasts and realized returns");
    }
    return pairs;
}

std::string serialize_forecasts(const VarForecastSeries& series) {
    std::string out = "as_of_date,value,method,mode,confidence,horizon,carried_forward\n";
    const std::string method = to_string(series.method);
    const std::string mode = to_string(series.mode);
    const std::string confidence = fmt_shortest(series.confidence);
    const std::string horizon = std::to_string(series.horizon);
    for (const auto& f : series.entries) {
        out += f.as_of_date;
        out += ',';
        out += fmt_shortest(f.value);
        out += ',';
        out += method;
        out += ',';
        out += mode;
        out += ',';
        out += confidence;
        out += ',';
        out += horizon;
        out += ',';
        out += f.carried_forward ? '1' : '0';
        out += '\n';
    }
    return out;
}

VarForecastSeries parse_forecasts(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "as_of_date,value,method,mode,confidence,horizon,carried_forward") {
        throw DataError("forecast file: bad header");
    }
    VarForecastSeries series;
    bool first = true;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 7) {
            throw DataError("forecast file line " + std::to_string(lineno) + ": expected 7 fields");
        }
        VarForecast f;
        f.as_of_date = fields[0];
        f.value = std::stod(fields[1]);
        f.carried_forward = fields[6] == "1";
        if (first) {
            series.method = method_from_string(fields[2]);
            series.mode = mode_from_string(fields[3]);
            series.confidence = std::stod(fields[4]);
            series.horizon = std::stoi(fields[5]);
            first = false;
        }
        series.entries.push_back(std::move(f));
    }
    if (first) throw DataError("forecast file: no entries");
    return series;
}

}  // namespace varscale
