#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "clsi/grid_function.hpp"
#include "clsi/report.hpp"

namespace clsi {

enum class CostRole { H, Theta, ThetaD };

struct ScalingInfo {
    double A;      // >= 1
    double alpha;  // in (1, 2]
};

// A symmetric convex cost with value 0 at 0. Role H costs are quadratic
// x^2/4 on [-2 t0, 2 t0]; role theta costs are t^2 on [0, t0]; theta_D is
// the quadratic cost with a finiteness radius. Values may be +inf.
class CostFunction {
public:
    enum class Kind { QuadH, QuadTheta, Hp, HpConj, ThetaD, ThetaDConj, Table };

    CostFunction() = default;  // the quadratic H cost x^2/4 with t0 = 1

    double operator()(double x) const;
    double derivative(double x) const;  // right derivative

    Kind kind() const { return kind_; }
    CostRole role() const { return role_; }
    double t0() const { return t0_; }
    double prescale() const { return scale_; }

    std::optional<ScalingInfo> scaling() const { return scaling_; }
    CostFunction with_scaling(double A, double alpha) const;

    bool has_closed_conjugate() const;
    CostFunction closed_conjugate() const;

    // q such that cost(u) = q u^2 for |u| <= finite_radius() (+inf beyond a
    // finite radius); nullopt when the cost is not globally of that shape.
    std::optional<double> quadratic_coeff() const;
    double finite_radius() const;  // +inf unless theta_D-like

    std::string describe() const;

    // underlying sample table, present only for table costs
    const GridFunction* table() const { return table_.get(); }

    friend CostFunction make_quadratic_cost(double t0, CostRole role);
    friend CostFunction make_hp_cost(double p);
    friend CostFunction make_theta_d(double D);
    friend CostFunction make_table_cost(GridFunction table, CostRole role, double t0);
    friend CostFunction scaled_cost(const CostFunction& c, double a);

private:
    Kind kind_ = Kind::QuadH;
    CostRole role_ = CostRole::H;
    double param_ = 0.0;  // p for Hp families, D for theta_D
    double t0_ = 1.0;
    double scale_ = 1.0;  // evaluator is base(scale * x)
    std::optional<ScalingInfo> scaling_;
    std::shared_ptr<const GridFunction> table_;
};

CostFunction make_quadratic_cost(double t0, CostRole role);  // H: x^2/4, theta: t^2
CostFunction make_hp_cost(double p);                         // role H, t0 = 1
CostFunction make_theta_d(double D);
CostFunction make_table_cost(GridFunction table, CostRole role, double t0 = 1.0);
CostFunction scaled_cost(const CostFunction& c, double a);  // x -> c(a x)

struct ConjugatePair {
    CostFunction primal;
    CostFunction dual;
    GridFunction dual_table;          // dual sampled on the requested grid
    double biconjugation_defect = 0;  // max |primal - primal**| on the grid
};

// Fenchel-Legendre transform of c on the requested dual grid. Closed forms
// are used when the family provides them; tables go through the linear-time
// sorted-slope sweep.
ConjugatePair legendre(const CostFunction& c, std::span<const double> dual_grid);

// Generalized inverse inf{t >= 0 : theta(t) >= v} for nondecreasing theta
// on [0, inf); closed form in the quadratic case, monotone bisection else.
double theta_inverse(const CostFunction& theta, double v);

// Verifies H(s x) <= A s^alpha H(x) on the grid product. With declared
// scaling metadata it checks those constants; otherwise it fits the largest
// feasible alpha in (1, 2] and the smallest A >= 1 and reports them.
Report scaling_check(const CostFunction& c, std::span<const double> s_grid,
                     std::span<const double> x_grid);

// Checks H(x) >= A^{-1} t0^{2-alpha} x^alpha for x >= t0 on a log grid,
// substituting the declared constants verbatim.
Report power_lower_bound(const CostFunction& c);

// C_theta = integral over (0, inf) of theta(2 + t/log 2) e^{-t} dt.
double c_theta(const CostFunction& theta, double rel_tol = 1e-10);

std::vector<double> log_grid(double lo, double hi, int n);
std::vector<double> linear_grid(double lo, double hi, int n);

}  // namespace clsi
