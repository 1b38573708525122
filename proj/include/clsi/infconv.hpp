#pragma once

#include <span>
#include <vector>

#include "clsi/costs.hpp"
#include "clsi/grid_function.hpp"
#include "clsi/measures.hpp"
#include "clsi/report.hpp"

namespace clsi {

// Q_t f(x) = inf_y { f(y) + t theta(|x-y|/t) }.
//
// Engines:
//   Exhaustive          minimum over the input nodes, any cost, O(nm)
//   FastQuadratic       lower envelope of translated parabolas, quadratic
//                       costs only, O(n+m); agrees with Exhaustive
//   ExactPiecewiseLinear  continuous minimization over the piecewise-linear
//                       interpolant, for costs of the form q u^2 with an
//                       optional finiteness radius; exact
enum class InfConvEngine { Exhaustive, FastQuadratic, ExactPiecewiseLinear, Auto };

GridFunction inf_convolution(const GridFunction& f, const CostFunction& theta, double t,
                             std::span<const double> out_nodes,
                             InfConvEngine engine = InfConvEngine::Auto);

// Scalar evaluation (Auto resolves to the exact engine for quadratic costs).
double inf_convolution_at(const GridFunction& f, const CostFunction& theta, double t, double x,
                          InfConvEngine engine = InfConvEngine::Auto);

// R^lambda f(x) = inf_y { f(y) + lambda H*(a (x-y)) }.
double r_lambda(const GridFunction& f, const CostFunction& Hstar, double a, double lambda,
                double x);

// Verifies f(x) - R^lambda f(x) <= lambda H(f'(x)/(a lambda)) at the grid
// nodes of f (right-derivative convention).
Report r_lambda_gap_check(const GridFunction& f, const CostFunction& H, const CostFunction& Hstar,
                          double a, double lambda);

struct ResidualTable {
    std::vector<double> ts;              // interior t values
    std::vector<double> xs;              // interior x values
    std::vector<std::vector<double>> r;  // residual[t][x]; NaN where excluded
    double max_abs = 0.0;                // over non-excluded cells
    double mean_abs = 0.0;
    double max_abs_all = 0.0;            // including kink neighborhoods
};

// Centered-difference residual of dQ/dt + H(dQ/dx) for Q_t f with cost
// t H*(|.|/t). Kink images of f are excluded from max_abs/mean_abs.
ResidualTable hopf_lax_residual(const GridFunction& f, const CostFunction& H,
                                std::span<const double> t_grid, std::span<const double> x_grid,
                                double exclusion_margin = 0.0);

// Maurey envelope from the bounded-support argument.
double maurey_k(double u);

// With phi normalized so that its infimum over supp(mu) is 0, checks
// Q_1^{theta_D} phi <= k(phi) on the support and e^{k(u)} <= 2 - e^{-u}.
Report maurey_bound_check(const GridFunction& phi, double D, const Measure1D& mu);

}  // namespace clsi
