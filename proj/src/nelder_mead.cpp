#include "varscale/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace varscale::opt {

namespace {

double guarded(const std::function<double(std::span<const double>)>& f,
               std::span<const double> x) {
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> start,
                          std::span<const double> steps,
                          const SimplexOptions& options) {
    const std::size_t n = start.size();
    if (n == 0 || steps.size() != n) {
        throw std::invalid_argument("nelder_mead: bad start/steps dimensions");
    }
    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

    std::vector<std::vector<double>> vx(n + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < n; ++i) vx[i + 1][i] += steps[i];
    std::vector<double> fv(n + 1);
    for (std::size_t j = 0; j <= n; ++j) fv[j] = guarded(f, vx[j]);
    if (!std::isfinite(fv[0])) {
        throw std::invalid_argument("nelder_mead: objective not finite at start");
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    SimplexResult result;
    int iter = 0;
    bool converged = false;
    for (; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        const double spread = std::fabs(fv[worst] - fv[best]);
        if (spread <= options.tolerance * (std::fabs(fv[best]) + options.tolerance)) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t j = 0; j <= n; ++j) {
            if (j == worst) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += vx[j][i];
        }
        for (std::size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);

        for (std::size_t i = 0; i < n; ++i) {
            xr[i] = centroid[i] + kReflect * (centroid[i] - vx[worst][i]);
        }
        const double fr = guarded(f, xr);

        if (fr < fv[best]) {
            for (std::size_t i = 0; i < n; ++i) {
                xe[i] = centroid[i] + kExpand * (xr[i] - centroid[i]);
            }
            const double fe = guarded(f, xe);
            if (fe < fr) {
                vx[worst] = xe;
                fv[worst] = fe;
            } else {
                vx[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            vx[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const auto& anchor = outside ? xr : vx[worst];
            for (std::size_t i = 0; i < n; ++i) {
                xc[i] = centroid[i] + kContract * (anchor[i] - centroid[i]);
            }
            const double fc = guarded(f, xc);
            if (fc < (outside ? fr : fv[worst])) {
                vx[worst] = xc;
                fv[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t j = 0; j <= n; ++j) {
                    if (j == best) continue;
                    for (std::size_t i = 0; i < n; ++i) {
                        vx[j][i] = vx[best][i] + kShrink * (vx[j][i] - vx[best][i]);
                    }
                    fv[j] = guarded(f, vx[j]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        if (fv[j] < fv[best]) best = j;
    }
    result.x = vx[best];
    result.value = fv[best];
    result.iterations = iter;
    result.converged = converged;
    return result;
}

}  // namespace varscale::opt
