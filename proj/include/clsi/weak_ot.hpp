#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clsi/costs.hpp"
#include "clsi/measures.hpp"
#include "clsi/report.hpp"

namespace clsi {

// Row-stochastic kernel between two atom sets with prescribed marginals:
// p[i][j] >= 0, sum_j p[i][j] = 1, sum_i mu_i p[i][j] = nu_j.
struct Coupling {
    std::vector<double> source_x, source_w;  // mu_1 (rows)
    std::vector<double> target_x, target_w;  // mu_2 (columns)
    std::vector<double> p;                   // row-major kernel, n x m

    size_t rows() const { return source_x.size(); }
    size_t cols() const { return target_x.size(); }
    double at(size_t i, size_t j) const { return p[i * cols() + j]; }

    std::vector<double> barycenters() const;       // m_i = sum_j y_j p[i][j]
    double max_marginal_violation() const;         // over rows and columns
    static Coupling product(const Measure1D& source, const Measure1D& target);
};

// sum_i mu_i theta(|x_i - m_i|) for the kernel's row barycenters.
double weak_cost_eval(const Coupling& c, const CostFunction& theta, double tol = 1e-9);

struct WeakOtResult {
    double value = 0.0;
    Coupling kernel;
    std::vector<double> barycenters;
    int iterations = 0;
    double gap = 0.0;  // conditional-gradient optimality gap at termination
};

struct WeakOtParams {
    double gap_tol = 1e-7;
    int max_iters = 200000;
    int max_atoms = 64;
};

// T-bar_theta(target | source): minimizes the barycentric cost over kernels
// from the source marginal to the target marginal by pairwise conditional
// gradient steps; the linear oracle is an exact (rank-one cost)
// transportation problem.
WeakOtResult weak_ot_solve(const Measure1D& target, const Measure1D& source,
                           const CostFunction& theta, WeakOtParams params = {});

enum class WeakDirection { Minus, Plus };

struct WeakVerifySample {
    double weak_cost = 0.0;
    double rel_entropy = 0.0;
    double classical_cost = 0.0;
    double weak_same_order = 0.0;  // T-bar(nu | mu) for the Jensen check
    std::string label;
};

struct WeakVerifyResult {
    Report report;
    std::vector<WeakVerifySample> samples;
};

// Checks the weak transport-entropy inequality over sampled reweightings nu
// of mu's atoms (exponential tilts and random simplex reweightings), and the
// Jensen domination T-bar_theta(nu|mu) <= T_theta(mu, nu) per sample.
WeakVerifyResult weak_transport_verify(const Measure1D& mu, WeakDirection direction,
                                       const CostFunction& theta, double a, int n_samples,
                                       uint64_t seed = 1, WeakOtParams params = {});

// Reweightings of mu used by the verifier (exposed for tests and the CLI).
std::vector<Measure1D> tilt_samples(const Measure1D& mu, int n_samples, uint64_t seed);

}  // namespace clsi
