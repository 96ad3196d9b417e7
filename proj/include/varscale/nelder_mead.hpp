#pragma once

#include <functional>
#include <span>
#include <vector>

namespace varscale::opt {

struct SimplexOptions {
    double tolerance = 1e-8;  // relative spread of function values
    int max_iterations = 2000;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex minimization. `steps` gives the initial
// per-dimension simplex displacement. The objective may return +inf (or NaN,
// treated as +inf) to veto a point; the start point must be finite.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> start,
                          std::span<const double> steps,
                          const SimplexOptions& options = {});

}  // namespace varscale::opt
