#pragma once

#include <functional>
#include <span>

namespace fspde {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;  // accumulated error estimate
};

// Adaptive Gauss-Kronrod 7-15 on [a, b]. Bisects panels until the local
// error estimate meets abs_tol + rel_tol * |integral|.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol = 1e-12, double rel_tol = 1e-10,
                              int max_depth = 30);

// Same, with interior breakpoints (peaks, switch points) listed in `points`;
// endpoints included by the caller.
QuadResult integrate_adaptive(const std::function<double(double)>& f, std::span<const double> points,
                              double abs_tol = 1e-12, double rel_tol = 1e-10,
                              int max_depth = 30);

}  // namespace fspde
