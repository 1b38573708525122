#pragma once

#include <functional>
#include <span>
#include <vector>

#include "clsi/costs.hpp"
#include "clsi/measures.hpp"
#include "clsi/report.hpp"

namespace clsi {

// The unique left-continuous nondecreasing map transporting the symmetric
// exponential measure onto the target.
class TransportMap {
public:
    explicit TransportMap(Measure1D target);

    double operator()(double x) const;
    bool atomic() const { return atomic_; }
    const Measure1D& target() const { return target_; }

    // sup over x in [xlo, xhi] of U(x+h) - U(x); exact for atomic targets,
    // otherwise a coarse-to-fine grid supremum
    struct Increment {
        double value;
        double witness_x;
        bool exact;
    };
    Increment sup_increment(double h) const;
    Increment sup_increment_constrained(double h, double xlo, double xhi) const;

    // limit of the modulus as h -> 0+ (max single jump for atoms, 0 for
    // continuous targets)
    double zero_limit() const;

private:
    Measure1D target_;
    bool atomic_ = false;
    std::vector<double> jumps_;   // z_1..z_{n-1}: U = v_i on (z_{i-1}, z_i]
    std::vector<double> values_;  // v_1..v_n
};

double u_mu(const Measure1D& mu, double x);

struct ModulusCurve {
    std::vector<double> h;
    std::vector<double> delta;
    std::vector<double> witness_x;
    bool exact = false;
};

std::pair<double, double> delta_mu(const Measure1D& mu, double h);  // (value, witness x)
ModulusCurve delta_curve(const Measure1D& mu, std::span<const double> h_grid);

struct CriterionParams {
    double h_min = 1e-3;
    double h_max = 50.0;
    int h_points = 300;
    int refine_points = 80;
    double b_min = 1e-6;
};

struct CriterionResult {
    Report report;
    ModulusCurve curve;          // on the coarse grid
    std::vector<double> ratios;  // theta^{-1}(t0^2 + h) / delta(h)
    double b_best = 0.0;
    double h_at_best = 0.0;
};

// b_best = inf over h of theta^{-1}(t0^2 + h) / Delta(h), including the
// h -> 0+ boundary ratio; pass requires b_best >= b_min and a ratio that is
// not strictly decreasing over the last decade of the grid.
CriterionResult criterion_check(const Measure1D& mu, const CostFunction& theta, double t0,
                                CriterionParams params = {});

// Tail-shift decay: mu([x + g(h), inf)) <= e^{-h} mu([x, inf)) for x >= 0,
// with g(h) = theta^{-1}(t0^2 + h) / b.
Report tail_decay_check(const Measure1D& mu, const CostFunction& theta, double t0, double b,
                        CriterionParams params = {});

// Orlicz-type two-sided tail condition with ratio bound K.
Report orlicz_condition(const Measure1D& mu, const std::function<double(double)>& beta, double k,
                        double K);

// sup over x in [m, t_mu) of the normalized upper-tail integral of
// theta(a (u - x)), and the mirrored lower-tail quantity.
Report tail_cost_bound(const Measure1D& mu, const CostFunction& theta, double a);

// U(x+h) - U(x) <= 4/a + h/(a log 2), sharpened to 2/a on a shared sign.
Report linear_growth_bound(const Measure1D& mu, double a, CriterionParams params = {});

}  // namespace clsi
