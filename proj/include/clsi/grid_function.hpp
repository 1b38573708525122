#pragma once

#include <functional>
#include <span>
#include <vector>

namespace clsi {

enum class Extension { Linear, PlusInfinity };

// A real function sampled on a sorted node set, interpreted as its
// piecewise-linear interpolant plus an extension rule beyond the hull.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::vector<double> nodes, std::vector<double> values,
                 Extension ext = Extension::Linear);

    static GridFunction from_samples(const std::function<double(double)>& f, double lo,
                                     double hi, int n, Extension ext = Extension::Linear);

    double operator()(double x) const;

    size_t size() const { return xs_.size(); }
    std::span<const double> nodes() const { return xs_; }
    std::span<const double> values() const { return ys_; }
    Extension extension() const { return ext_; }

    double segment_slope(size_t i) const;  // slope of [x_i, x_{i+1}]
    double left_slope(double x) const;
    double right_slope(double x) const;
    // a.e. derivative with the right-derivative convention at nodes
    double derivative(double x) const { return right_slope(x); }

    bool check_convex(double tol = 1e-12) const;
    double max_abs_slope() const;  // includes extension slopes for Linear
    double min_value() const;      // -inf when unbounded below under Linear extension
    bool bounded_below() const;

    GridFunction resample(std::span<const double> new_nodes) const;
    GridFunction shifted(double c) const;  // x -> f(x - c)
    // interior nodes where the slope jump exceeds tol, with (left, right) slopes
    struct Kink {
        double x;
        double slope_left;
        double slope_right;
    };
    std::vector<Kink> kinks(double tol = 1e-12) const;

private:
    std::vector<double> xs_, ys_;
    Extension ext_ = Extension::Linear;
};

// Convenience builders used across tests and checkers.
GridFunction make_constant(double c, double lo, double hi);
GridFunction make_abs(double q, double lo, double hi);       // |x - q|
GridFunction make_hinge(double q, double lo, double hi);     // max(x - q, 0)
GridFunction make_max_affine(std::span<const double> slopes, std::span<const double> intercepts,
                             double lo, double hi);

}  // namespace clsi
