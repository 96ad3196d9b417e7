#pragma once

#include <span>
#include <utility>
#include <vector>

namespace varscale::garch {

struct ArmaOrder {
    int p = 0;  // AR order
    int q = 0;  // MA order
};

enum class Innovations { Normal, StudentT };

struct GarchParams {
    double intercept = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double dof = 0.0;  // only meaningful under StudentT (> 2)
};

struct GarchFit {
    ArmaOrder order;
    Innovations innovations = Innovations::Normal;
    GarchParams params;
    std::vector<double> residuals;  // mean-equation residuals eps_t
    std::vector<double> cond_var;   // filtered sigma^2_t, all > 0
    double loglik = 0.0;
    bool converged = false;
};

// Mean-equation residuals and the GARCH(1,1) variance path for the given
// parameters. Pre-sample returns are replaced by the sample mean, pre-sample
// residuals by zero; sigma^2_0 is the sample variance of the residuals.
void filter(std::span<const double> returns, const GarchParams& params,
            std::vector<double>& residuals, std::vector<double>& cond_var);

// Joint ARMA-GARCH log-likelihood under the stated innovation family
// (Student-t innovations are standardized to unit variance, dof > 2).
double arma_garch_loglik(std::span<const double> returns, const GarchParams& params,
                         Innovations innovations);

// AIC grid search over p in [0, max_p], q in [0, max_q], each candidate
// fitted by Gaussian ML with constant variance; ties break toward smaller
// p+q, then smaller p.
ArmaOrder select_arma_order(std::span<const double> returns, int max_p = 2,
                            int max_q = 2);

// Maximum likelihood over transformed parameters enforcing omega > 0,
// alpha, beta >= 0 and alpha + beta < 1. Non-convergence returns the best
// point found with converged = false.
GarchFit fit_arma_garch(std::span<const double> returns, ArmaOrder order,
                        Innovations innovations);

// One-step-ahead conditional mean and volatility (mu_next, sigma_next).
std::pair<double, double> forecast_one_step(const GarchFit& fit,
                                            std::span<const double> returns);

// Conditional VaR from the one-step moments. Under Student-t the quantile is
// standardized by sqrt((v-2)/v) by default (unit-variance innovations); pass
// standardized = false for the raw t quantile.
double garch_var(double mu_next, double sigma_next, double p,
                 Innovations innovations, double dof, bool standardized = true);

}  // namespace varscale::garch
