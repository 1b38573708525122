#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "clsi/costs.hpp"
#include "clsi/grid_function.hpp"
#include "clsi/measures.hpp"
#include "clsi/report.hpp"

namespace clsi {

// Ent_mu(e^phi) = int phi e^phi dmu - (int e^phi dmu) log(int e^phi dmu).
// Returns +inf when a defining integral diverges.
double entropy(const Measure1D& mu, const GridFunction& phi);

// Kullback-Leibler divergence between atomic measures; +inf when nu charges
// a point outside supp mu.
double relative_entropy(const Measure1D& nu, const Measure1D& mu);

// Seed-deterministic family of convex piecewise-linear test functions with
// slopes in [-L, L], plus deterministic specials.
struct TestFunctionFamily {
    uint64_t seed = 1;
    int count = 200;
    double lipschitz = 1.0;
    int max_breakpoints = 12;
    bool include_specials = true;
    double hull_lo = -1.0;
    double hull_hi = 1.0;
    std::vector<double> avoid;  // breakpoints stay away from these points
};

TestFunctionFamily family_for(const Measure1D& mu, uint64_t seed = 1, int count = 200,
                              double lipschitz = 1.0, double pad = 8.0);

struct LabeledFunction {
    GridFunction fn;
    std::string label;
};

std::vector<LabeledFunction> generate_tests(const TestFunctionFamily& family);

// Ent_mu(e^phi) <= int H(c phi') e^phi dmu over the family.
InequalityReport lsi_test(const Measure1D& mu, const CostFunction& H, double c,
                          std::span<const LabeledFunction> family, Tolerance tol = {});

// Var_mu(f) <= 1/(2 a^2) int |f'|^2 dmu; also reports a_max, the largest a
// passing on this family.
InequalityReport convex_poincare_test(const Measure1D& mu, double a,
                                      std::span<const LabeledFunction> family, Tolerance tol = {});

enum class DualIcMode { Minus, Plus, TwoSided };

// Dual infimum-convolution inequalities, reported as the product form <= 1.
InequalityReport dual_ic_test(const Measure1D& mu, const CostFunction& theta, double t,
                              DualIcMode mode, std::span<const LabeledFunction> family,
                              Tolerance tol = {});

// Forward: bounded support of diameter <= D implies the two-sided inequality
// with cost theta_D. Adversarial: a diameter violation admits a witness
// function making the product exceed 1.
Report bounded_support_ic_test(const Measure1D& mu, double D, bool adversarial,
                               uint64_t seed = 1);

// Explicit constant chains between the equivalent conditions.
double chain_b_to_c(const CostFunction& theta, double t0, double b);
double chain_delta_bound(double c, double h);        // 16 c (2/3 + sqrt(h/2))
double chain_delta_bound_sharp(double c, double h);  // 8 c (2/3 + sqrt(h/2) + 2 (2h/9)^{1/4})
double chain_c_to_a(double c, double A, double alpha);
double chain_a_to_b_from_t0(const CostFunction& theta, double t0, double a);  // kappa_1 a
double chain_a_to_b_with_ctheta(const CostFunction& theta, double t0, double a);

// Classical one-dimensional transport cost by quantile coupling; exact for
// atomic inputs.
double classical_ot_1d(const Measure1D& mu, const Measure1D& nu, const CostFunction& theta);

}  // namespace clsi
