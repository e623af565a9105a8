#pragma once

#include <functional>

namespace tswlad {

/// Adaptive Simpson integration of f over [a, b] to the given absolute
/// tolerance. Throws NumericalError when the recursion depth limit is hit
/// before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int max_depth = 60);

} // namespace tswlad
