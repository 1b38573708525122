#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "clsi/quadrature.hpp"

namespace clsi {

enum class Side { Upper, Lower };

// A probability measure on the real line under one of three
// representations: a sorted atom list, a gridded (piecewise-linear) CDF,
// or a closed-form family. All queries are pure; sampling takes an
// explicit generator.
class Measure1D {
public:
    enum class Kind { Atoms, GridCdf, SymExp, Gaussian, Uniform };

    static Measure1D atoms(std::vector<double> xs, std::vector<double> ws);
    static Measure1D grid_cdf(std::vector<double> xs, std::vector<double> cdf);
    static Measure1D symmetric_exponential();
    static Measure1D gaussian(double mean, double sigma);
    static Measure1D uniform(double a, double b);
    // Closed-form two-point family; backed by the exact atom representation.
    static Measure1D two_point(double x0, double x1, double w0 = 0.5);

    Kind kind() const { return kind_; }
    bool is_atomic() const { return kind_ == Kind::Atoms; }
    bool has_density() const { return kind_ != Kind::Atoms; }

    // F(x) = mu((-inf, x]), right-continuous.
    double cdf(double x) const;
    // Generalized inverse inf{y : F(y) >= t}; +-inf only at t in {0,1}.
    double quantile(double t) const;
    // Upper-tail quantile inf{y : 1 - F(y) <= q}, evaluated without the
    // cancellation of forming 1 - q (needed deep in the upper tail).
    double quantile_complement(double q) const;
    double density(double x) const;  // throws for atomic measures

    double median() const { return quantile(0.5); }
    double support_lo() const;  // may be -inf
    double support_hi() const;  // may be +inf

    // mu over open/closed half lines.
    double tail_mass(double x, Side side) const;  // mu((x,inf)) or mu((-inf,x))
    double mass_ge(double x) const;               // mu([x,inf))
    double mass_le(double x) const;               // mu((-inf,x])

    // integral of e^{s|x|}; +inf signals divergence. s > 0 required.
    double exp_moment(double s) const;
    bool exp_moment_finite(double s) const;  // analytic, no overflow issues

    // Atoms at quantile((i-1/2)/n), weight 1/n, duplicates merged.
    Measure1D discretize(int n) const;

    // Integral of g over the *open* tail (x, inf) or (-inf, x).
    double tail_integral(double x, const RealFn& g, Side side, double rel_tol = 1e-10) const;

    // Integral of g against the whole measure. knots lists points where g
    // changes analytic form (kinks); used to split the quadrature.
    double integrate(const RealFn& g, std::span<const double> knots = {},
                     double rel_tol = 1e-10) const;

    double mean() const;
    double variance() const;

    double sample(std::mt19937_64& rng) const;

    // Push-forward under x -> lambda x, lambda > 0. Not available for the
    // symmetric exponential family (the image leaves the family).
    Measure1D scaled(double lambda) const;

    std::string describe() const;

    // Atom accessors (valid only for atomic measures).
    std::span<const double> positions() const;
    std::span<const double> weights() const;

private:
    Measure1D() = default;

    Kind kind_ = Kind::Atoms;
    std::vector<double> xs_, ws_;  // atoms: positions/weights; gridcdf: nodes/F values
    std::vector<double> cum_;      // atoms: cumulative weights
    std::vector<double> ccum_;     // atoms: complementary (suffix) weights
    double p0_ = 0.0, p1_ = 0.0;   // family parameters
};

// Standard normal CDF/quantile helpers shared across the library.
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace clsi
