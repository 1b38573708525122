#include "clsi/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "clsi/report.hpp"

namespace clsi {

double integrate(const RealFn& f, double a, double b, double rel_tol) {
    if (!(a < b)) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double error = 0.0;
    double v = GK::integrate(f, a, b, 12, rel_tol, &error);
    return v;
}

namespace {

double tail_accumulate(const RealFn& f, double start, double scale, double rel_tol, int dir) {
    // Windows [start, start+w], [start+w, start+3w], ... with doubling width.
    double w = std::max(scale, 1e-6);
    double acc = 0.0;
    double pos = start;
    double prev_inc = 0.0;
    int growth_streak = 0;
    int small_streak = 0;
    for (int k = 0; k < 120; ++k) {
        double a = pos, b = pos + w;
        double inc = (dir > 0) ? integrate(f, a, b, rel_tol)
                               : integrate([&](double u) { return f(-u); }, a, b, rel_tol);
        acc += inc;
        if (!std::isfinite(acc)) throw DivergenceError("tail integral overflow");
        double mag = std::abs(inc);
        if (k > 0 && mag > std::abs(prev_inc) && mag > 1e-300) {
            if (++growth_streak >= 6) throw DivergenceError("tail integrand fails to decay");
        } else {
            growth_streak = 0;
        }
        if (mag <= rel_tol * std::max(std::abs(acc), 1e-300) || mag == 0.0) {
            if (++small_streak >= 2) return acc;
        } else {
            small_streak = 0;
        }
        prev_inc = inc;
        pos = b;
        w *= 2.0;
    }
    throw DivergenceError("tail integral did not converge");
}

}  // namespace

double integrate_tail_upper(const RealFn& f, double from, double scale, double rel_tol) {
    return tail_accumulate(f, from, scale, rel_tol, +1);
}

double integrate_tail_lower(const RealFn& f, double to, double scale, double rel_tol) {
    // Reflect: integral over (-inf, to) of f(u) du = integral over (-to, inf) of f(-u) du.
    return tail_accumulate(f, -to, scale, rel_tol, -1);
}

}  // namespace clsi
