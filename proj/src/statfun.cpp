#include "varscale/statfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "varscale/errors.hpp"
#include "varscale/nelder_mead.hpp"

namespace varscale::stat {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLnPi = 1.1447298858494001741;

void require_prob(double q, const char* who) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument(std::string(who) + ": probability must be in (0,1)");
    }
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr double eps = 1e-15, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

// Lower incomplete gamma by series, valid for x < a + 1.
double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by continued fraction, valid for x >= a + 1.
double gamma_cf(double a, double x) {
    constexpr double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Acklam's rational approximation to the inverse normal CDF; refined below.
double norm_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double q) {
    require_prob(q, "normal_quantile");
    if (q == 0.5) return 0.0;
    double x = norm_quantile_approx(q);
    // Two Halley refinements against the erfc-based CDF.
    for (int i = 0; i < 2; ++i) {
        const double e = normal_cdf(x) - q;
        const double u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double t_pdf(double x, double v) {
    const double lp = std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) -
                      0.5 * (std::log(v) + kLnPi) -
                      0.5 * (v + 1.0) * std::log1p(x * x / v);
    return std::exp(lp);
}

double t_cdf(double x, double v) {
    if (v <= 0.0) throw std::invalid_argument("t_cdf: dof must be positive");
    if (x == 0.0) return 0.5;
    const double z = v / (v + x * x);
    const double tail = 0.5 * reg_inc_beta(0.5 * v, 0.5, z);
    return x > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double q, double v) {
    require_prob(q, "t_quantile");
    if (v <= 0.0) throw std::invalid_argument("t_quantile: dof must be positive");
    if (q == 0.5) return 0.0;
    if (q < 0.5) return -t_quantile(1.0 - q, v);

    // Bracket in (0, hi), then safeguarded Newton.
    double lo = 0.0;
    double hi = std::max(2.0, 2.0 * std::fabs(normal_quantile(q)));
    while (t_cdf(hi, v) < q) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) break;
    }
    double x = std::min(hi, std::max(lo, static_cast<double>(normal_quantile(q))));
    for (int i = 0; i < 100; ++i) {
        const double e = t_cdf(x, v) - q;
        if (e > 0.0) hi = x; else lo = x;
        const double dx = e / std::max(t_pdf(x, v), 1e-300);
        double xn = x - dx;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-12 * (1.0 + std::fabs(xn))) {
            x = xn;
            break;
        }
        x = xn;
    }
    return x;
}

double chisq_cdf(double x, double df) {
    if (df <= 0.0) throw std::invalid_argument("chisq_cdf: df must be positive");
    if (x <= 0.0) return 0.0;
    return reg_inc_gamma_lower(0.5 * df, 0.5 * x);
}

double chisq_sf(double x, double df) {
    if (df <= 0.0) throw std::invalid_argument("chisq_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * df, xs = 0.5 * x;
    return xs < a + 1.0 ? 1.0 - gamma_series(a, xs) : gamma_cf(a, xs);
}

double chisq_quantile(double q, double df) {
    require_prob(q, "chisq_quantile");
    if (df <= 0.0) throw std::invalid_argument("chisq_quantile: df must be positive");

    // Wilson-Hilferty start, then safeguarded Newton on the CDF.
    const double z = normal_quantile(q);
    const double f = 2.0 / (9.0 * df);
    double x = df * std::pow(1.0 - f + z * std::sqrt(f), 3.0);
    if (!(x > 0.0)) x = 0.5 * df;
    double lo = 0.0, hi = std::max(4.0 * x, 8.0 * df);
    while (chisq_cdf(hi, df) < q) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double e = chisq_cdf(x, df) - q;
        if (e > 0.0) hi = x; else lo = x;
        const double pdf = std::exp((0.5 * df - 1.0) * std::log(x) - 0.5 * x -
                                    std::lgamma(0.5 * df) - 0.5 * df * std::log(2.0));
        double xn = x - e / std::max(pdf, 1e-300);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-12 * (1.0 + std::fabs(xn))) {
            x = xn;
            break;
        }
        x = xn;
    }
    return x;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double reg_inc_gamma_lower(double a, double x) {
    if (x <= 0.0) return 0.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double t_loc_scale_loglik(std::span<const double> x, double location,
                          double scale, double dof) {
    if (scale <= 0.0 || dof <= 0.0) return -std::numeric_limits<double>::infinity();
    const double c = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                     0.5 * (std::log(dof) + kLnPi) - std::log(scale);
    double ll = 0.0;
    for (double xi : x) {
        const double z = (xi - location) / scale;
        ll += c - 0.5 * (dof + 1.0) * std::log1p(z * z / dof);
    }
    return ll;
}

TLocScaleFit fit_t_mle(std::span<const double> x) {
    constexpr double kDofFloor = 0.5;
    if (x.size() < 20) throw std::invalid_argument("fit_t_mle: need at least 20 observations");
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double xi : x) ss += (xi - mean) * (xi - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DataError("fit_t_mle: degenerate (constant) sample");

    auto negll = [&](std::span<const double> p) {
        const double m = p[0];
        const double s = std::exp(p[1]);
        const double v = kDofFloor + std::exp(p[2]);
        return -t_loc_scale_loglik(x, m, s, v);
    };
    const double start[] = {mean, std::log(sd), std::log(8.0 - kDofFloor)};
    const double steps[] = {0.25 * sd, 0.25, 0.5};
    opt::SimplexOptions options;
    options.tolerance = 1e-8;
    options.max_iterations = 2000;
    auto res = opt::nelder_mead(negll, start, steps, options);

    TLocScaleFit fit;
    fit.location = res.x[0];
    fit.scale = std::exp(res.x[1]);
    fit.dof = kDofFloor + std::exp(res.x[2]);
    fit.loglik = -res.value;
    fit.converged = res.converged && std::isfinite(fit.loglik);
    return fit;
}

}  // namespace varscale::stat
