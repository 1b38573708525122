#include "clsi/measures.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "clsi/report.hpp"

namespace clsi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

const boost::math::normal_distribution<double>& std_normal() {
    static const boost::math::normal_distribution<double> n(0.0, 1.0);
    return n;
}
}  // namespace

double normal_cdf(double z) { return boost::math::cdf(std_normal(), z); }

double normal_quantile(double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    return boost::math::quantile(std_normal(), p);
}

Measure1D Measure1D::atoms(std::vector<double> xs, std::vector<double> ws) {
    if (xs.empty() || xs.size() != ws.size())
        throw ConfigError("atoms: positions and weights must be nonempty and equal length");
    std::vector<size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });

    Measure1D m;
    m.kind_ = Kind::Atoms;
    for (size_t k : idx) {
        if (!(ws[k] > 0.0)) throw ConfigError("atoms: weights must be strictly positive");
        if (!std::isfinite(xs[k])) throw ConfigError("atoms: positions must be finite");
        if (!m.xs_.empty() && xs[k] == m.xs_.back()) {
            m.ws_.back() += ws[k];  // merge exact duplicates
        } else {
            m.xs_.push_back(xs[k]);
            m.ws_.push_back(ws[k]);
        }
    }
    double total = std::accumulate(m.ws_.begin(), m.ws_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("atoms: weights must sum to 1 (got " + format_double(total) + ")");
    for (double& w : m.ws_) w /= total;
    m.cum_.resize(m.ws_.size());
    std::partial_sum(m.ws_.begin(), m.ws_.end(), m.cum_.begin());
    m.cum_.back() = 1.0;
    // suffix sums, exact in the upper tail: ccum_[i] = sum of weights > i
    m.ccum_.resize(m.ws_.size());
    double tail = 0.0;
    for (size_t i = m.ws_.size(); i-- > 0;) {
        m.ccum_[i] = tail;
        tail += m.ws_[i];
    }
    return m;
}

Measure1D Measure1D::grid_cdf(std::vector<double> xs, std::vector<double> cdf) {
    if (xs.size() < 2 || xs.size() != cdf.size())
        throw ConfigError("gridcdf: need at least two (node, value) pairs");
    for (size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw ConfigError("gridcdf: nodes must be strictly increasing");
        if (cdf[i] < cdf[i - 1] - 1e-12) throw ConfigError("gridcdf: values must be nondecreasing");
    }
    if (std::abs(cdf.front()) > 1e-9 || std::abs(cdf.back() - 1.0) > 1e-9)
        throw ConfigError("gridcdf: values must start at 0 and end at 1");
    cdf.front() = 0.0;
    cdf.back() = 1.0;
    for (double& v : cdf) v = std::clamp(v, 0.0, 1.0);
    Measure1D m;
    m.kind_ = Kind::GridCdf;
    m.xs_ = std::move(xs);
    m.ws_ = std::move(cdf);
    return m;
}

Measure1D Measure1D::symmetric_exponential() {
    Measure1D m;
    m.kind_ = Kind::SymExp;
    return m;
}

Measure1D Measure1D::gaussian(double mean, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("gaussian: sigma must be positive");
    Measure1D m;
    m.kind_ = Kind::Gaussian;
    m.p0_ = mean;
    m.p1_ = sigma;
    return m;
}

Measure1D Measure1D::uniform(double a, double b) {
    if (!(a < b)) throw ConfigError("uniform: need a < b");
    Measure1D m;
    m.kind_ = Kind::Uniform;
    m.p0_ = a;
    m.p1_ = b;
    return m;
}

Measure1D Measure1D::two_point(double x0, double x1, double w0) {
    if (!(w0 > 0.0 && w0 < 1.0)) throw ConfigError("two-point: weight must lie in (0,1)");
    if (x0 == x1) throw ConfigError("two-point: positions must differ");
    return atoms({x0, x1}, {w0, 1.0 - w0});
}

double Measure1D::cdf(double x) const {
    switch (kind_) {
        case Kind::Atoms: {
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            if (it == xs_.begin()) return 0.0;
            return cum_[static_cast<size_t>(it - xs_.begin()) - 1];
        }
        case Kind::GridCdf: {
            if (x <= xs_.front()) return x < xs_.front() ? 0.0 : ws_.front();
            if (x >= xs_.back()) return 1.0;
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            size_t i = static_cast<size_t>(it - xs_.begin());
            double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
            return ws_[i - 1] + t * (ws_[i] - ws_[i - 1]);
        }
        case Kind::SymExp:
            return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
        case Kind::Gaussian:
            return normal_cdf((x - p0_) / p1_);
        case Kind::Uniform:
            return std::clamp((x - p0_) / (p1_ - p0_), 0.0, 1.0);
    }
    return 0.0;
}

double Measure1D::quantile(double t) const {
    if (t < 0.0 || t > 1.0) throw ConfigError("quantile: argument outside [0,1]");
    if (t == 0.0) return -kInf;
    switch (kind_) {
        case Kind::Atoms: {
            auto it = std::lower_bound(cum_.begin(), cum_.end(), t);
            return xs_[static_cast<size_t>(it - cum_.begin())];
        }
        case Kind::GridCdf: {
            // first index with F_i >= t; the previous cell has positive slope
            auto it = std::lower_bound(ws_.begin(), ws_.end(), t);
            size_t i = static_cast<size_t>(it - ws_.begin());
            if (i == 0) return xs_.front();
            double span = ws_[i] - ws_[i - 1];
            double u = (t - ws_[i - 1]) / span;
            return xs_[i - 1] + u * (xs_[i] - xs_[i - 1]);
        }
        case Kind::SymExp:
            if (t == 1.0) return kInf;
            return t < 0.5 ? std::log(2.0 * t) : -std::log(2.0 * (1.0 - t));
        case Kind::Gaussian:
            if (t == 1.0) return kInf;
            return p0_ + p1_ * normal_quantile(t);
        case Kind::Uniform:
            return p0_ + t * (p1_ - p0_);
    }
    return 0.0;
}

double Measure1D::quantile_complement(double q) const {
    if (q < 0.0 || q > 1.0) throw ConfigError("quantile_complement: argument outside [0,1]");
    if (q == 1.0) return -kInf;
    switch (kind_) {
        case Kind::Atoms: {
            // smallest index with suffix mass <= q (ccum_ is nonincreasing)
            size_t lo = 0, hi = ccum_.size() - 1;
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                if (ccum_[mid] <= q) hi = mid; else lo = mid + 1;
            }
            return xs_[lo];
        }
        case Kind::GridCdf:
            return quantile(1.0 - q);
        case Kind::SymExp:
            if (q == 0.0) return kInf;
            return q <= 0.5 ? -std::log(2.0 * q) : std::log(2.0 * (1.0 - q));
        case Kind::Gaussian: {
            if (q == 0.0) return kInf;
            static const boost::math::normal_distribution<double> n01(0.0, 1.0);
            return p0_ + p1_ * boost::math::quantile(boost::math::complement(n01, q));
        }
        case Kind::Uniform:
            return p1_ - q * (p1_ - p0_);
    }
    return 0.0;
}

double Measure1D::density(double x) const {
    switch (kind_) {
        case Kind::Atoms:
            throw ConfigError("density: atomic measure has no density");
        case Kind::GridCdf: {
            if (x < xs_.front() || x >= xs_.back()) return 0.0;
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            size_t i = std::min(static_cast<size_t>(it - xs_.begin()), xs_.size() - 1);
            return (ws_[i] - ws_[i - 1]) / (xs_[i] - xs_[i - 1]);
        }
        case Kind::SymExp:
            return 0.5 * std::exp(-std::abs(x));
        case Kind::Gaussian: {
            double z = (x - p0_) / p1_;
            return std::exp(-0.5 * z * z) / (p1_ * std::sqrt(2.0 * M_PI));
        }
        case Kind::Uniform:
            return (x >= p0_ && x <= p1_) ? 1.0 / (p1_ - p0_) : 0.0;
    }
    return 0.0;
}

double Measure1D::support_lo() const {
    switch (kind_) {
        case Kind::Atoms: return xs_.front();
        case Kind::GridCdf: {
            for (size_t i = 1; i < ws_.size(); ++i)
                if (ws_[i] > 0.0) return xs_[i - 1];
            return xs_.front();
        }
        case Kind::SymExp: return -kInf;
        case Kind::Gaussian: return -kInf;
        case Kind::Uniform: return p0_;
    }
    return -kInf;
}

double Measure1D::support_hi() const {
    switch (kind_) {
        case Kind::Atoms: return xs_.back();
        case Kind::GridCdf: {
            for (size_t i = ws_.size(); i-- > 1;)
                if (ws_[i - 1] < 1.0) return xs_[i];
            return xs_.back();
        }
        case Kind::SymExp: return kInf;
        case Kind::Gaussian: return kInf;
        case Kind::Uniform: return p1_;
    }
    return kInf;
}

double Measure1D::tail_mass(double x, Side side) const {
    if (kind_ == Kind::Atoms) {
        double s = 0.0;
        if (side == Side::Upper) {
            for (size_t i = xs_.size(); i-- > 0 && xs_[i] > x;) s += ws_[i];
        } else {
            for (size_t i = 0; i < xs_.size() && xs_[i] < x; ++i) s += ws_[i];
        }
        return s;
    }
    // continuous representations: open vs closed irrelevant
    return side == Side::Upper ? 1.0 - cdf(x) : cdf(x);
}

double Measure1D::mass_ge(double x) const {
    if (kind_ == Kind::Atoms) {
        double s = 0.0;
        for (size_t i = xs_.size(); i-- > 0 && xs_[i] >= x;) s += ws_[i];
        return s;
    }
    return 1.0 - cdf(x);
}

double Measure1D::mass_le(double x) const { return cdf(x); }

bool Measure1D::exp_moment_finite(double s) const {
    if (!(s > 0.0)) throw ConfigError("exp_moment: s must be positive");
    switch (kind_) {
        case Kind::Atoms:
        case Kind::GridCdf:
        case Kind::Uniform:
        case Kind::Gaussian:
            return true;
        case Kind::SymExp:
            return s < 1.0;
    }
    return true;
}

double Measure1D::exp_moment(double s) const {
    if (!(s > 0.0)) throw ConfigError("exp_moment: s must be positive");
    auto g = [s](double x) { return std::exp(s * std::abs(x)); };
    switch (kind_) {
        case Kind::Atoms: {
            double acc = 0.0;
            for (size_t i = 0; i < xs_.size(); ++i) acc += ws_[i] * g(xs_[i]);
            return acc;
        }
        case Kind::GridCdf: {
            // piecewise-constant density; closed form per cell
            double acc = 0.0;
            for (size_t i = 1; i < xs_.size(); ++i) {
                double rho = (ws_[i] - ws_[i - 1]) / (xs_[i] - xs_[i - 1]);
                if (rho == 0.0) continue;
                auto piece = [&](double a, double b, double sign) {
                    // integral of e^{sign*s*u} du on [a,b]
                    return (std::exp(sign * s * b) - std::exp(sign * s * a)) / (sign * s);
                };
                double a = xs_[i - 1], b = xs_[i];
                if (b <= 0.0) acc += rho * piece(a, b, -1.0);
                else if (a >= 0.0) acc += rho * piece(a, b, 1.0);
                else acc += rho * (piece(a, 0.0, -1.0) + piece(0.0, b, 1.0));
            }
            return acc;
        }
        case Kind::SymExp:
            if (s >= 1.0) return kInf;
            return 1.0 / (1.0 - s);
        case Kind::Gaussian: {
            double m = p0_, sg = p1_;
            double a = std::exp(s * m + 0.5 * s * s * sg * sg) * normal_cdf(m / sg + s * sg);
            double b = std::exp(-s * m + 0.5 * s * s * sg * sg) * normal_cdf(-m / sg + s * sg);
            return a + b;
        }
        case Kind::Uniform: {
            double a = p0_, b = p1_, len = b - a;
            auto piece = [&](double lo, double hi, double sign) {
                return (std::exp(sign * s * hi) - std::exp(sign * s * lo)) / (sign * s);
            };
            double acc;
            if (b <= 0.0) acc = piece(a, b, -1.0);
            else if (a >= 0.0) acc = piece(a, b, 1.0);
            else acc = piece(a, 0.0, -1.0) + piece(0.0, b, 1.0);
            return acc / len;
        }
    }
    return kInf;
}

Measure1D Measure1D::discretize(int n) const {
    if (n < 1) throw ConfigError("discretize: n must be >= 1");
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
        double q = quantile((i - 0.5) / n);
        if (!std::isfinite(q)) throw ConfigError("discretize: interior quantile not finite");
        xs[static_cast<size_t>(i - 1)] = q;
    }
    std::vector<double> ws(xs.size(), 1.0 / n);
    return atoms(std::move(xs), std::move(ws));  // merges duplicates
}

double Measure1D::tail_integral(double x, const RealFn& g, Side side, double rel_tol) const {
    switch (kind_) {
        case Kind::Atoms: {
            double acc = 0.0;
            if (side == Side::Upper) {
                for (size_t i = xs_.size(); i-- > 0 && xs_[i] > x;) acc += ws_[i] * g(xs_[i]);
            } else {
                for (size_t i = 0; i < xs_.size() && xs_[i] < x; ++i) acc += ws_[i] * g(xs_[i]);
            }
            return acc;
        }
        case Kind::GridCdf:
        case Kind::Uniform: {
            double lo = support_lo(), hi = support_hi();
            auto h = [&](double u) { return g(u) * density(u); };
            if (side == Side::Upper) {
                if (x >= hi) return 0.0;
                return clsi::integrate(h, std::max(x, lo), hi, rel_tol);
            }
            if (x <= lo) return 0.0;
            return clsi::integrate(h, lo, std::min(x, hi), rel_tol);
        }
        case Kind::SymExp:
        case Kind::Gaussian: {
            auto h = [&](double u) { return g(u) * density(u); };
            double scale = kind_ == Kind::Gaussian ? p1_ : 1.0;
            if (side == Side::Upper) return integrate_tail_upper(h, x, scale, rel_tol);
            return integrate_tail_lower(h, x, scale, rel_tol);
        }
    }
    return 0.0;
}

double Measure1D::integrate(const RealFn& g, std::span<const double> knots, double rel_tol) const {
    if (kind_ == Kind::Atoms) {
        double acc = 0.0;
        for (size_t i = 0; i < xs_.size(); ++i) acc += ws_[i] * g(xs_[i]);
        return acc;
    }
    double lo = support_lo(), hi = support_hi();
    std::vector<double> cuts(knots.begin(), knots.end());
    if (kind_ == Kind::GridCdf) cuts.insert(cuts.end(), xs_.begin(), xs_.end());
    std::sort(cuts.begin(), cuts.end());
    double flo = std::isfinite(lo) ? lo : quantile(1e-14);
    double fhi = std::isfinite(hi) ? hi : quantile(1.0 - 1e-14);
    auto h = [&](double u) { return g(u) * density(u); };
    double acc = 0.0;
    double pos = flo;
    for (double c : cuts) {
        if (c <= pos || c >= fhi) continue;
        acc += clsi::integrate(h, pos, c, rel_tol);
        pos = c;
    }
    acc += clsi::integrate(h, pos, fhi, rel_tol);
    if (!std::isfinite(lo)) acc += integrate_tail_lower(h, flo, kind_ == Kind::Gaussian ? p1_ : 1.0, rel_tol);
    if (!std::isfinite(hi)) acc += integrate_tail_upper(h, fhi, kind_ == Kind::Gaussian ? p1_ : 1.0, rel_tol);
    return acc;
}

double Measure1D::mean() const {
    switch (kind_) {
        case Kind::Atoms: {
            double acc = 0.0;
            for (size_t i = 0; i < xs_.size(); ++i) acc += ws_[i] * xs_[i];
            return acc;
        }
        case Kind::SymExp: return 0.0;
        case Kind::Gaussian: return p0_;
        case Kind::Uniform: return 0.5 * (p0_ + p1_);
        case Kind::GridCdf: return integrate([](double u) { return u; });
    }
    return 0.0;
}

double Measure1D::variance() const {
    double m = mean();
    switch (kind_) {
        case Kind::Atoms: {
            double acc = 0.0;
            for (size_t i = 0; i < xs_.size(); ++i) acc += ws_[i] * (xs_[i] - m) * (xs_[i] - m);
            return acc;
        }
        case Kind::SymExp: return 2.0;
        case Kind::Gaussian: return p1_ * p1_;
        case Kind::Uniform: return (p1_ - p0_) * (p1_ - p0_) / 12.0;
        case Kind::GridCdf: return integrate([m](double u) { return (u - m) * (u - m); });
    }
    return 0.0;
}

double Measure1D::sample(std::mt19937_64& rng) const {
    // inverse transform from a deterministic 53-bit uniform in (0,1)
    double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return quantile(u);
}

Measure1D Measure1D::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw ConfigError("scaled: lambda must be positive");
    switch (kind_) {
        case Kind::Atoms: {
            std::vector<double> xs(xs_);
            for (double& x : xs) x *= lambda;
            return atoms(std::move(xs), ws_);
        }
        case Kind::GridCdf: {
            std::vector<double> xs(xs_);
            for (double& x : xs) x *= lambda;
            return grid_cdf(std::move(xs), ws_);
        }
        case Kind::Gaussian: return gaussian(lambda * p0_, lambda * p1_);
        case Kind::Uniform: return uniform(lambda * p0_, lambda * p1_);
        case Kind::SymExp:
            throw ConfigError("scaled: symmetric exponential family is not closed under scaling");
    }
    throw ConfigError("scaled: unsupported representation");
}

std::string Measure1D::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Atoms:
            os << "atoms(" << xs_.size() << ")";
            break;
        case Kind::GridCdf:
            os << "gridcdf(" << xs_.size() << " nodes)";
            break;
        case Kind::SymExp:
            os << "family symmetric-exponential";
            break;
        case Kind::Gaussian:
            os << "family gaussian " << format_double(p0_) << " " << format_double(p1_);
            break;
        case Kind::Uniform:
            os << "family uniform " << format_double(p0_) << " " << format_double(p1_);
            break;
    }
    return os.str();
}

std::span<const double> Measure1D::positions() const {
    if (kind_ != Kind::Atoms) throw ConfigError("positions: not an atomic measure");
    return xs_;
}

std::span<const double> Measure1D::weights() const {
    if (kind_ != Kind::Atoms) throw ConfigError("weights: not an atomic measure");
    return ws_;
}

}  // namespace clsi
