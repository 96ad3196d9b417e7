#include "varscale/garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "varscale/errors.hpp"
#include "varscale/nelder_mead.hpp"
#include "varscale/statfun.hpp"

namespace varscale::garch {

namespace {

constexpr double kLn2Pi = 1.8378770664093454836;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size());
}

// ARMA(p,q) residuals; pre-sample returns are the sample mean, pre-sample
// residuals zero.
void arma_residuals(std::span<const double> r, const GarchParams& params,
                    std::vector<double>& eps) {
    const std::size_t n = r.size();
    const double presample = mean_of(r);
    eps.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double mu = params.intercept;
        for (std::size_t i = 0; i < params.ar.size(); ++i) {
            const double past = (t >= i + 1) ? r[t - i - 1] : presample;
            mu += params.ar[i] * past;
        }
        for (std::size_t j = 0; j < params.ma.size(); ++j) {
            const double past = (t >= j + 1) ? eps[t - j - 1] : 0.0;
            mu += params.ma[j] * past;
        }
        eps[t] = r[t] - mu;
    }
}

// Conditional sum-of-squares objective for the constant-variance ARMA fits
// used by order selection.
double arma_rss(std::span<const double> r, const GarchParams& params,
                std::vector<double>& scratch) {
    arma_residuals(r, params, scratch);
    double rss = 0.0;
    for (double e : scratch) rss += e * e;
    return rss;
}

GarchParams unpack(std::span<const double> x, ArmaOrder order, Innovations innov) {
    GarchParams p;
    std::size_t k = 0;
    p.intercept = x[k++];
    p.ar.assign(x.begin() + k, x.begin() + k + order.p);
    k += order.p;
    p.ma.assign(x.begin() + k, x.begin() + k + order.q);
    k += order.q;
    p.omega = std::exp(x[k++]);
    const double persistence = logistic(x[k++]);
    const double split = logistic(x[k++]);
    p.alpha = persistence * split;
    p.beta = persistence * (1.0 - split);
    if (innov == Innovations::StudentT) p.dof = 2.0 + std::exp(x[k++]);
    return p;
}

}  // namespace

void filter(std::span<const double> returns, const GarchParams& params,
            std::vector<double>& residuals, std::vector<double>& cond_var) {
    arma_residuals(returns, params, residuals);
    const std::size_t n = returns.size();
    cond_var.resize(n);
    const double var0 = variance_of(residuals);
    cond_var[0] = var0 > 0.0 ? var0 : params.omega;
    for (std::size_t t = 1; t < n; ++t) {
        cond_var[t] = params.omega + params.alpha * residuals[t - 1] * residuals[t - 1] +
                      params.beta * cond_var[t - 1];
    }
}

double arma_garch_loglik(std::span<const double> returns, const GarchParams& params,
                         Innovations innovations) {
    static thread_local std::vector<double> eps, var;
    filter(returns, params, eps, var);
    const std::size_t n = returns.size();
    double ll = 0.0;
    if (innovations == Innovations::Normal) {
        for (std::size_t t = 0; t < n; ++t) {
            if (!(var[t] > 0.0)) return -std::numeric_limits<double>::infinity();
            ll += -0.5 * (kLn2Pi + std::log(var[t]) + eps[t] * eps[t] / var[t]);
        }
    } else {
        const double v = params.dof;
        if (!(v > 2.0)) return -std::numeric_limits<double>::infinity();
        const double c = std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) -
                         0.5 * std::log(M_PI * (v - 2.0));
        for (std::size_t t = 0; t < n; ++t) {
            if (!(var[t] > 0.0)) return -std::numeric_limits<double>::infinity();
            ll += c - 0.5 * std::log(var[t]) -
                  0.5 * (v + 1.0) * std::log1p(eps[t] * eps[t] / ((v - 2.0) * var[t]));
        }
    }
    return ll;
}

ArmaOrder select_arma_order(std::span<const double> returns, int max_p, int max_q) {
    if (returns.size() < 100) throw DataError("select_arma_order: need at least 100 observations");
    if (max_p < 0 || max_q < 0) throw std::invalid_argument("select_arma_order: negative grid bound");
    const double n = static_cast<double>(returns.size());
    const double sd = std::sqrt(variance_of(returns));

    ArmaOrder best;
    double best_aic = std::numeric_limits<double>::infinity();
    bool any = false;
    std::vector<double> scratch;

    for (int p = 0; p <= max_p; ++p) {
        for (int q = 0; q <= max_q; ++q) {
            const ArmaOrder order{p, q};
            double rss;
            if (p == 0 && q == 0) {
                GarchParams params;
                params.intercept = mean_of(returns);
                rss = arma_rss(returns, params, scratch);
            } else {
                auto objective = [&](std::span<const double> x) {
                    GarchParams params;
                    params.intercept = x[0];
                    params.ar.assign(x.begin() + 1, x.begin() + 1 + p);
                    params.ma.assign(x.begin() + 1 + p, x.begin() + 1 + p + q);
                    return arma_rss(returns, params, scratch);
                };
                std::vector<double> start(1 + p + q, 0.0);
                start[0] = mean_of(returns);
                std::vector<double> steps(1 + p + q, 0.1);
                steps[0] = std::max(0.1 * sd, 1e-8);
                opt::SimplexOptions options;
                options.tolerance = 1e-10;
                options.max_iterations = 2000;
                auto res = opt::nelder_mead(objective, start, steps, options);
                if (!std::isfinite(res.value)) continue;
                rss = res.value;
            }
            if (!(rss > 0.0) || !std::isfinite(rss)) continue;
            const double loglik = -0.5 * n * (kLn2Pi + std::log(rss / n) + 1.0);
            const int k = p + q + 2;  // intercept + variance
            const double aic = -2.0 * loglik + 2.0 * k;
            const bool better =
                aic < best_aic - 1e-12 ||
                (std::fabs(aic - best_aic) <= 1e-12 &&
                 (p + q < best.p + best.q || (p + q == best.p + best.q && p < best.p)));
            if (!any || better) {
                best = order;
                best_aic = aic;
                any = true;
            }
        }
    }
    if (!any) throw EstimationFailure("select_arma_order: all candidate fits failed");
    return best;
}

GarchFit fit_arma_garch(std::span<const double> returns, ArmaOrder order,
                        Innovations innovations) {
    if (returns.size() < 100) throw DataError("fit_arma_garch: need at least 100 observations");
    const double var = variance_of(returns);
    if (!(var > 0.0)) throw DataError("fit_arma_garch: degenerate (constant) input");
    const double sd = std::sqrt(var);

    auto objective = [&](std::span<const double> x) {
        return -arma_garch_loglik(returns, unpack(x, order, innovations), innovations);
    };

    // Start: mean-only ARMA, alpha = 0.05, beta = 0.85, omega matching the
    // unconditional variance, v = 8 for Student-t.
    std::vector<double> start;
    start.push_back(mean_of(returns));
    start.insert(start.end(), order.p + order.q, 0.0);
    start.push_back(std::log(0.10 * var));
    start.push_back(logit(0.90));          // persistence alpha + beta
    start.push_back(logit(0.05 / 0.90));   // share of alpha
    if (innovations == Innovations::StudentT) start.push_back(std::log(8.0 - 2.0));

    std::vector<double> steps(start.size(), 0.5);
    steps[0] = std::max(0.1 * sd, 1e-8);
    for (int i = 0; i < order.p + order.q; ++i) steps[1 + i] = 0.1;

    opt::SimplexOptions options;
    options.tolerance = 1e-8;
    options.max_iterations = 3000;
    auto res = opt::nelder_mead(objective, start, steps, options);
    if (!res.converged) {
        // Retry from a low-persistence start before giving up.
        std::vector<double> alt = start;
        const std::size_t base = 1 + static_cast<std::size_t>(order.p + order.q);
        alt[base] = std::log(0.5 * var);
        alt[base + 1] = logit(0.50);
        alt[base + 2] = logit(0.20);
        if (innovations == Innovations::StudentT) alt[base + 3] = std::log(5.0 - 2.0);
        auto retry = opt::nelder_mead(objective, alt, steps, options);
        if (retry.converged || retry.value < res.value) res = retry;
    }
    // Polish from the incumbent with a tighter simplex.
    std::vector<double> fine_steps(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) fine_steps[i] = 0.05 * steps[i];
    opt::SimplexOptions polish = options;
    polish.max_iterations = 1000;
    auto res2 = opt::nelder_mead(objective, res.x, fine_steps, polish);
    if (res2.value <= res.value) {
        res2.converged = res2.converged || res.converged;
        res = res2;
    }

    GarchFit fit;
    fit.order = order;
    fit.innovations = innovations;
    fit.params = unpack(res.x, order, innovations);
    fit.loglik = -res.value;
    filter(returns, fit.params, fit.residuals, fit.cond_var);
    fit.converged = res.converged && std::isfinite(fit.loglik);
    return fit;
}

std::pair<double, double> forecast_one_step(const GarchFit& fit,
                                            std::span<const double> returns) {
    const std::size_t n = returns.size();
    if (n == 0 || fit.residuals.size() != n || fit.cond_var.size() != n) {
        throw std::invalid_argument("forecast_one_step: fit does not cover the supplied returns");
    }
    const GarchParams& p = fit.params;
    double mu = p.intercept;
    const double presample = mean_of(returns);
    for (std::size_t i = 0; i < p.ar.size(); ++i) {
        mu += p.ar[i] * (n >= i + 1 ? returns[n - 1 - i] : presample);
    }
    for (std::size_t j = 0; j < p.ma.size(); ++j) {
        mu += p.ma[j] * (n >= j + 1 ? fit.residuals[n - 1 - j] : 0.0);
    }
    const double eps_last = fit.residuals[n - 1];
    const double var_next = p.omega + p.alpha * eps_last * eps_last + p.beta * fit.cond_var[n - 1];
    return {mu, std::sqrt(var_next)};
}

double garch_var(double mu_next, double sigma_next, double p,
                 Innovations innovations, double dof, bool standardized) {
    if (!(sigma_next > 0.0)) throw std::invalid_argument("garch_var: sigma must be positive");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("garch_var: confidence must be in (0,1)");
    double quantile;
    if (innovations == Innovations::Normal) {
        quantile = stat::normal_quantile(1.0 - p);
    } else {
        if (!(dof > 2.0)) throw std::invalid_argument("garch_var: t innovations need dof > 2");
        quantile = stat::t_quantile(1.0 - p, dof);
        if (standardized) quantile *= std::sqrt((dof - 2.0) / dof);
    }
    return mu_next + quantile * sigma_next;
}

}  // namespace varscale::garch
