#pragma once

#include <functional>
#include <vector>

namespace gkbm {

/// Adaptive Simpson integration of f over [a, b] to an absolute tolerance.
/// Interior breakpoints force subdivision boundaries there, so integrands
/// with kinks at known points (piecewise kernels, support edges) keep the
/// Richardson error estimate honest. Throws std::runtime_error if the
/// recursion depth limit is reached before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol,
                 const std::vector<double>& interior_breakpoints = {});

}  // namespace gkbm
