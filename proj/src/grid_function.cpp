#include "clsi/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "clsi/report.hpp"

namespace clsi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GridFunction::GridFunction(std::vector<double> nodes, std::vector<double> values, Extension ext)
    : xs_(std::move(nodes)), ys_(std::move(values)), ext_(ext) {
    if (xs_.size() < 2 || xs_.size() != ys_.size())
        throw ConfigError("grid function: need at least two (node, value) pairs");
    for (size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i] > xs_[i - 1])) throw ConfigError("grid function: nodes must be strictly increasing");
}

GridFunction GridFunction::from_samples(const std::function<double(double)>& f, double lo,
                                        double hi, int n, Extension ext) {
    if (n < 2) throw ConfigError("from_samples: need n >= 2");
    std::vector<double> xs(static_cast<size_t>(n)), ys(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
        ys[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);
    }
    return GridFunction(std::move(xs), std::move(ys), ext);
}

double GridFunction::operator()(double x) const {
    if (x < xs_.front()) {
        if (ext_ == Extension::PlusInfinity) return kInf;
        return ys_.front() + segment_slope(0) * (x - xs_.front());
    }
    if (x > xs_.back()) {
        if (ext_ == Extension::PlusInfinity) return kInf;
        return ys_.back() + segment_slope(xs_.size() - 2) * (x - xs_.back());
    }
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    if (it == xs_.end()) return ys_.back();
    size_t i = static_cast<size_t>(it - xs_.begin());
    if (i == 0) return ys_.front();
    double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
}

double GridFunction::segment_slope(size_t i) const {
    return (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
}

double GridFunction::right_slope(double x) const {
    if (x >= xs_.back()) return segment_slope(xs_.size() - 2);
    if (x < xs_.front()) return segment_slope(0);
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    size_t i = static_cast<size_t>(it - xs_.begin());
    return segment_slope(std::min(i == 0 ? 0 : i - 1, xs_.size() - 2));
}

double GridFunction::left_slope(double x) const {
    if (x <= xs_.front()) return segment_slope(0);
    if (x > xs_.back()) return segment_slope(xs_.size() - 2);
    auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    size_t i = static_cast<size_t>(it - xs_.begin());
    if (i == 0) return segment_slope(0);
    return segment_slope(i - 1);
}

bool GridFunction::check_convex(double tol) const {
    for (size_t i = 0; i + 2 < xs_.size(); ++i)
        if (segment_slope(i + 1) < segment_slope(i) - tol) return false;
    return true;
}

double GridFunction::max_abs_slope() const {
    double m = 0.0;
    for (size_t i = 0; i + 1 < xs_.size(); ++i) m = std::max(m, std::abs(segment_slope(i)));
    return m;
}

bool GridFunction::bounded_below() const {
    if (ext_ == Extension::PlusInfinity) return true;
    return segment_slope(0) <= 0.0 && segment_slope(xs_.size() - 2) >= 0.0;
}

double GridFunction::min_value() const {
    if (!bounded_below()) return -kInf;
    double m = ys_.front();
    for (double y : ys_) m = std::min(m, y);
    return m;
}

GridFunction GridFunction::resample(std::span<const double> new_nodes) const {
    // keep the original kinks so the interpolant is unchanged where possible
    std::set<double> merged(new_nodes.begin(), new_nodes.end());
    double lo = *merged.begin(), hi = *merged.rbegin();
    for (double x : xs_)
        if (x >= lo && x <= hi) merged.insert(x);
    std::vector<double> xs(merged.begin(), merged.end());
    std::vector<double> ys(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) ys[i] = (*this)(xs[i]);
    return GridFunction(std::move(xs), std::move(ys), ext_);
}

GridFunction GridFunction::shifted(double c) const {
    std::vector<double> xs(xs_);
    for (double& x : xs) x += c;
    return GridFunction(std::move(xs), ys_, ext_);
}

std::vector<GridFunction::Kink> GridFunction::kinks(double tol) const {
    std::vector<Kink> out;
    for (size_t i = 1; i + 1 < xs_.size(); ++i) {
        double sl = segment_slope(i - 1), sr = segment_slope(i);
        if (std::abs(sr - sl) > tol) out.push_back({xs_[i], sl, sr});
    }
    return out;
}

GridFunction make_constant(double c, double lo, double hi) {
    return GridFunction({lo, hi}, {c, c});
}

GridFunction make_abs(double q, double lo, double hi) {
    std::vector<double> xs{lo, hi}, ys;
    if (q > lo && q < hi) xs = {lo, q, hi};
    ys.resize(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) ys[i] = std::abs(xs[i] - q);
    return GridFunction(std::move(xs), std::move(ys));
}

GridFunction make_hinge(double q, double lo, double hi) {
    std::vector<double> xs{lo, hi};
    if (q > lo && q < hi) xs = {lo, q, hi};
    std::vector<double> ys(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) ys[i] = std::max(xs[i] - q, 0.0);
    return GridFunction(std::move(xs), std::move(ys));
}

GridFunction make_max_affine(std::span<const double> slopes, std::span<const double> intercepts,
                             double lo, double hi) {
    if (slopes.empty() || slopes.size() != intercepts.size())
        throw ConfigError("max_affine: slope/intercept mismatch");
    auto f = [&](double x) {
        double m = -kInf;
        for (size_t i = 0; i < slopes.size(); ++i) m = std::max(m, slopes[i] * x + intercepts[i]);
        return m;
    };
    // breakpoints at pairwise intersections inside (lo, hi)
    std::set<double> xs{lo, hi};
    for (size_t i = 0; i < slopes.size(); ++i)
        for (size_t j = i + 1; j < slopes.size(); ++j) {
            if (slopes[i] == slopes[j]) continue;
            double x = (intercepts[j] - intercepts[i]) / (slopes[i] - slopes[j]);
            if (x > lo && x < hi) xs.insert(x);
        }
    std::vector<double> nodes(xs.begin(), xs.end());
    std::vector<double> ys(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) ys[i] = f(nodes[i]);
    return GridFunction(std::move(nodes), std::move(ys));
}

}  // namespace clsi
