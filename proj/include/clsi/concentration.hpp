#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clsi/measures.hpp"
#include "clsi/report.hpp"

namespace clsi {

// Zoo of certified 1-Lipschitz convex (or concave) functions of
// independent coordinates.
enum class ZooFunction {
    FirstCoordinate,  // x_1 (affine, unit coefficient)
    ScaledSum,        // sum x_i / sqrt(N)
    EuclideanNorm,    // |x|_2, convex 1-Lipschitz
    MaxCoordinate,    // max_i x_i, max of unit affines
    NegativeNorm,     // -|x|_2, concave 1-Lipschitz
    Constant
};

std::string zoo_name(ZooFunction f);
ZooFunction zoo_from_name(const std::string& name);

struct ExperimentConfig {
    Measure1D base = Measure1D::gaussian(0.0, 1.0);
    int dim = 1;
    int samples = 100000;  // >= 1e4 for tails down to 1e-3
    std::vector<double> t_grid;
    uint64_t seed = 1;  // mandatory: sampling is seed-derived per replica
    double chained_constant = 0.0;  // optional, recorded alongside the fit
};

struct TailTable {
    std::vector<double> t;
    std::vector<double> two_sided;  // P(|phi - med| >= t)
    std::vector<double> lower;      // P(med - phi >= t)
    std::vector<double> upper;      // P(phi - med >= t)
    std::vector<double> half_width;
    double median = 0.0;
    int samples = 0;
};

struct TailFit {
    double A = 0.0;  // tail <= B exp(-t^2 / A)
    double B = 0.0;
    double residual = 0.0;
    bool degenerate = false;
    bool envelope_ok = false;
    int points_used = 0;
};

TailTable simulate_tails(const ExperimentConfig& cfg, ZooFunction zoo);

// Builds the empirical table from raw sample values (used by the synthetic
// recovery path as well as simulate_tails).
TailTable tails_from_values(std::vector<double> values, const std::vector<double>& t_grid);

TailFit fit_subgaussian(const TailTable& tails);

std::vector<double> default_t_grid(int points = 28, double t_max = 4.0);

}  // namespace clsi
