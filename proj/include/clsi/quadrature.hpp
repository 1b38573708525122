#pragma once

#include <functional>

namespace clsi {

using RealFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod integral over a finite interval.
double integrate(const RealFn& f, double a, double b, double rel_tol = 1e-10);

// Integral of f over the open half line (from, +inf) or (-inf, to).
// Accumulates doubling windows and stops once increments are negligible;
// throws DivergenceError when the increments fail to decay.
double integrate_tail_upper(const RealFn& f, double from, double scale, double rel_tol = 1e-10);
double integrate_tail_lower(const RealFn& f, double to, double scale, double rel_tol = 1e-10);

}  // namespace clsi
