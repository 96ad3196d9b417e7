#pragma once

#include <span>

namespace varscale::stat {

// Standard normal distribution.
double normal_pdf(double x);
double normal_cdf(double x);
// Inverse of the standard normal CDF, absolute accuracy better than 1e-9.
double normal_quantile(double q);

// Student-t with v > 0 (real-valued) degrees of freedom.
double t_pdf(double x, double v);
double t_cdf(double x, double v);
double t_quantile(double q, double v);

// Chi-square with df > 0.
double chisq_cdf(double x, double df);
double chisq_sf(double x, double df);  // upper tail probability
double chisq_quantile(double q, double df);

// Regularized incomplete beta I_x(a, b) and lower incomplete gamma P(a, x);
// building blocks for the distributions above.
double reg_inc_beta(double a, double b, double x);
double reg_inc_gamma_lower(double a, double x);

// Location-scale Student-t fitted by maximum likelihood.
struct TLocScaleFit {
    double location = 0.0;
    double scale = 0.0;
    double dof = 0.0;
    double loglik = 0.0;
    bool converged = false;
};

// Log-likelihood of a location-scale Student-t sample; used by the fitter
// and available to callers that want to compare candidate parameters.
double t_loc_scale_loglik(std::span<const double> x, double location,
                          double scale, double dof);

// Maximum-likelihood fit over (location, scale, dof). Derivative-free
// simplex over (m, log s, log(v - 0.5)); start at the moment estimates with
// v = 8. On non-convergence the best point found is returned with
// converged = false so callers can carry the previous estimate forward.
TLocScaleFit fit_t_mle(std::span<const double> x);

}  // namespace varscale::stat
