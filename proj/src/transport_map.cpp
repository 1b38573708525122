#include "clsi/transport_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace clsi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double tau_cdf(double x) { return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); }
}  // namespace

double u_mu(const Measure1D& mu, double x) {
    // evaluate through whichever tail of F_tau is representable exactly
    if (x < 0.0) return mu.quantile(0.5 * std::exp(x));
    return mu.quantile_complement(0.5 * std::exp(-x));
}

TransportMap::TransportMap(Measure1D target) : target_(std::move(target)) {
    atomic_ = target_.is_atomic();
    if (atomic_) {
        auto pos = target_.positions();
        auto w = target_.weights();
        values_.assign(pos.begin(), pos.end());
        size_t n = values_.size();
        jumps_.resize(n - 1);
        // z_i = F_tau^{-1}(cum_i), evaluated through whichever tail sum is
        // exact (prefix below the median, suffix above)
        std::vector<double> cums(n - 1), ccums(n - 1);
        double cum = 0.0;
        for (size_t i = 0; i + 1 < n; ++i) {
            cum += w[i];
            cums[i] = cum;
        }
        double ccum = 0.0;
        for (size_t i = n; i-- > 1;) {
            ccum += w[i];
            ccums[i - 1] = ccum;
        }
        for (size_t i = 0; i + 1 < n; ++i)
            jumps_[i] = cums[i] <= 0.5 ? std::log(2.0 * cums[i]) : -std::log(2.0 * ccums[i]);
    }
}

double TransportMap::operator()(double x) const {
    if (!atomic_) return u_mu(target_, x);
    // U = v_i on (z_{i-1}, z_i]
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), x);
    return values_[static_cast<size_t>(it - jumps_.begin())];
}

double TransportMap::zero_limit() const {
    if (atomic_) {
        double m = 0.0;
        for (size_t i = 0; i + 1 < values_.size(); ++i)
            m = std::max(m, values_[i + 1] - values_[i]);
        return m;
    }
    return sup_increment(1e-9).value;
}

TransportMap::Increment TransportMap::sup_increment(double h) const {
    return sup_increment_constrained(h, -kInf, kInf);
}

TransportMap::Increment TransportMap::sup_increment_constrained(double h, double xlo,
                                                                double xhi) const {
    if (!(h > 0.0)) throw ConfigError("sup_increment: h must be positive");
    if (atomic_) {
        // U(x) = v_i on (z_{i-1}, z_i]; for the pair (i, j) the feasible x
        // window is (max(z_{i-1}, z_{j-1}-h, xlo), min(z_i, z_j-h, xhi)]
        size_t n = values_.size();
        auto z = [&](size_t i) {  // z_0 = -inf, z_n = +inf
            if (i == 0) return -kInf;
            if (i >= n) return kInf;
            return jumps_[i - 1];
        };
        double best = 0.0;
        double best_x = std::isfinite(xlo) ? xlo : 0.0;
        bool found = false;
        size_t i = 1;
        for (size_t j = 1; j <= n; ++j) {
            double lo = std::max(z(j - 1) - h, xlo);
            double hi = std::min(z(j) - h, xhi);
            if (!(lo < hi)) continue;
            // smallest i with z_i > lo; advances monotonically in j
            if (i > 1 && z(i - 1) > lo) i = 1;  // xlo can move the window back only once
            while (i < n && z(i) <= lo) ++i;
            // the window for U(x) = v_i is (z(i-1), z(i)] with z(i-1) <= lo
            double x_hi = std::min(z(i), hi);
            if (!(lo < x_hi)) continue;
            double inc = values_[j - 1] - values_[i - 1];
            if (!found || inc > best) {
                best = inc;
                best_x = x_hi;  // a realizing point: U(x_hi) = v_i, U(x_hi + h) = v_j
                found = true;
            }
        }
        return {found ? std::max(best, 0.0) : 0.0, best_x, true};
    }

    // grid supremum with one refinement pass; the span stays inside the
    // range where F_tau is numerically injective (so U stays finite)
    const double kSpan = 34.0;
    double span_lo = std::max(xlo, -kSpan);
    double span_hi = std::min(xhi, kSpan - h);
    if (!(span_lo < span_hi)) return {0.0, span_lo, false};
    auto U = [&](double x) { return (*this)(x); };
    const int kCoarse = 2001;
    double best = -kInf, best_x = span_lo;
    double step = (span_hi - span_lo) / (kCoarse - 1);
    for (int i = 0; i < kCoarse; ++i) {
        double x = span_lo + step * i;
        double inc = U(x + h) - U(x);
        if (inc > best) {
            best = inc;
            best_x = x;
        }
    }
    double rlo = std::max(span_lo, best_x - step), rhi = std::min(span_hi, best_x + step);
    const int kFine = 241;
    for (int i = 0; i < kFine; ++i) {
        double x = rlo + (rhi - rlo) * i / (kFine - 1);
        double inc = U(x + h) - U(x);
        if (inc > best) {
            best = inc;
            best_x = x;
        }
    }
    return {std::max(best, 0.0), best_x, false};
}

std::pair<double, double> delta_mu(const Measure1D& mu, double h) {
    TransportMap U(mu);
    auto inc = U.sup_increment(h);
    return {inc.value, inc.witness_x};
}

ModulusCurve delta_curve(const Measure1D& mu, std::span<const double> h_grid) {
    TransportMap U(mu);
    ModulusCurve curve;
    curve.exact = U.atomic();
    for (double h : h_grid) {
        auto inc = U.sup_increment(h);
        curve.h.push_back(h);
        curve.delta.push_back(inc.value);
        curve.witness_x.push_back(inc.witness_x);
    }
    return curve;
}

CriterionResult criterion_check(const Measure1D& mu, const CostFunction& theta, double t0,
                                CriterionParams params) {
    // theta must be a theta-role cost with a matching quadratic zone
    double probe = std::min(t0, theta.t0());
    if (std::abs(theta(probe) - probe * probe) > 1e-9 * std::max(1.0, probe * probe))
        throw ConfigError("criterion_check: cost is not t^2 on [0, t0]");

    TransportMap U(mu);
    CriterionResult res;
    res.report.check = "delta-modulus-criterion";
    res.report.put("measure", mu.describe());
    res.report.put("cost", theta.describe());
    res.report.put("t0", t0);
    if (!mu.exp_moment_finite(1.0) || !mu.exp_moment_finite(8.0)) {
        res.report.put("exp_moment_class", "incomplete: some exponential moments diverge");
    }

    auto h_grid = log_grid(params.h_min, params.h_max, params.h_points);
    auto ratio_at = [&](double h, double* delta_out, double* witness) {
        auto inc = U.sup_increment(h);
        if (delta_out) *delta_out = inc.value;
        if (witness) *witness = inc.witness_x;
        double num = theta_inverse(theta, t0 * t0 + h);
        return inc.value > 0.0 ? num / inc.value : kInf;
    };

    res.curve.exact = U.atomic();
    double b_best = kInf, h_best = 0.0;
    for (double h : h_grid) {
        double d = 0.0, w = 0.0;
        double r = ratio_at(h, &d, &w);
        res.curve.h.push_back(h);
        res.curve.delta.push_back(d);
        res.curve.witness_x.push_back(w);
        res.ratios.push_back(r);
        if (r < b_best) {
            b_best = r;
            h_best = h;
        }
    }

    // h -> 0+ boundary: inf over h > 0 includes the limit ratio t0 / Delta(0+)
    double d0 = U.zero_limit();
    if (d0 > 0.0) {
        double r0 = theta_inverse(theta, t0 * t0) / d0;
        if (r0 < b_best) {
            b_best = r0;
            h_best = 0.0;
        }
    }

    // one refinement pass around the coarse minimizer
    if (h_best > 0.0 && params.refine_points > 1) {
        auto it = std::lower_bound(h_grid.begin(), h_grid.end(), h_best);
        size_t idx = static_cast<size_t>(it - h_grid.begin());
        double lo = idx > 0 ? h_grid[idx - 1] : h_grid.front();
        double hi = idx + 1 < h_grid.size() ? h_grid[idx + 1] : h_grid.back();
        for (int i = 0; i < params.refine_points; ++i) {
            double h = lo + (hi - lo) * i / (params.refine_points - 1);
            if (!(h > 0.0)) continue;
            double r = ratio_at(h, nullptr, nullptr);
            if (r < b_best) {
                b_best = r;
                h_best = h;
            }
        }
    }

    res.b_best = b_best;
    res.h_at_best = h_best;
    res.report.extremal = b_best;
    res.report.put("b_best", b_best);
    res.report.put("h_at_best", h_best);
    res.report.put("delta_exact", res.curve.exact ? "step-formula" : "grid-sup");

    // truncation guard: strictly decreasing ratios over the last decade mean
    // the infimum may continue to fall beyond the grid
    bool decreasing_tail = true;
    double cutoff = params.h_max / 10.0;
    double prev = kInf;
    bool seen = false;
    for (size_t i = 0; i < res.curve.h.size(); ++i) {
        if (res.curve.h[i] < cutoff) continue;
        if (seen && !(res.ratios[i] < prev * (1.0 - 1e-12))) decreasing_tail = false;
        prev = res.ratios[i];
        seen = true;
    }
    if (!seen) decreasing_tail = false;

    if (!(b_best >= params.b_min)) {
        res.report.verdict = Verdict::Fail;
    } else if (decreasing_tail) {
        res.report.verdict = Verdict::Inconclusive;
        res.report.note = "inconclusive: truncation (ratio strictly decreasing over the last decade)";
    } else {
        res.report.verdict = Verdict::Pass;
    }
    return res;
}

Report tail_decay_check(const Measure1D& mu, const CostFunction& theta, double t0, double b,
                        CriterionParams params) {
    if (!(b > 0.0)) throw ConfigError("tail_decay_check: b must be positive");
    Report rep;
    rep.check = "tail-shift-decay";
    rep.put("measure", mu.describe());
    rep.put("b", b);
    rep.put("t0", t0);

    std::vector<double> xs{0.0};
    if (mu.is_atomic()) {
        for (double x : mu.positions())
            if (x >= 0.0) {
                xs.push_back(x);
                xs.push_back(std::nextafter(x, kInf));
                xs.push_back(std::max(0.0, std::nextafter(x, -kInf)));
            }
    } else {
        double hi = std::isfinite(mu.support_hi()) ? mu.support_hi() : mu.quantile(1.0 - 1e-12);
        for (double x : linear_grid(0.0, std::max(hi, 1e-6), 200)) xs.push_back(x);
    }

    auto h_grid = log_grid(params.h_min, params.h_max, 100);
    double worst = -kInf, worst_x = 0.0, worst_h = 0.0;
    for (double h : h_grid) {
        double g = theta_inverse(theta, t0 * t0 + h) / b;
        double decay = std::exp(-h);
        for (double x : xs) {
            double lhs = mu.mass_ge(x + g);
            double rhs = decay * mu.mass_ge(x);
            double excess = lhs - rhs;
            if (excess > worst) {
                worst = excess;
                worst_x = x;
                worst_h = h;
            }
        }
    }
    rep.extremal = worst;
    std::ostringstream os;
    os << "x=" << format_double(worst_x) << " h=" << format_double(worst_h);
    rep.witness = os.str();
    rep.verdict = worst <= 1e-12 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

namespace {

// normalized one-sided tail functional sup_x integral g(u-x) d mu / tail mass
struct TailSweep {
    double worst = -kInf;
    double worst_x = 0.0;
    bool divergent = false;
};

TailSweep sweep_tail_ratio(const Measure1D& mu, const std::function<double(double)>& g,
                           Side side) {
    TailSweep out;
    double m = mu.median();
    std::vector<double> xs{m};
    if (mu.is_atomic()) {
        auto pos = mu.positions();
        for (double x : pos) {
            if (side == Side::Upper && x >= m && x < mu.support_hi()) xs.push_back(x);
            if (side == Side::Lower && x <= m && x > mu.support_lo()) xs.push_back(x);
        }
    } else {
        if (side == Side::Upper) {
            double hi = std::isfinite(mu.support_hi()) ? mu.support_hi() : mu.quantile(1.0 - 1e-10);
            for (double x : linear_grid(m, hi, 201)) xs.push_back(x);
            xs.pop_back();  // x stays strictly below t_mu
        } else {
            double lo = std::isfinite(mu.support_lo()) ? mu.support_lo() : mu.quantile(1e-10);
            auto grid = linear_grid(lo, m, 201);
            xs.assign(grid.begin() + 1, grid.end());
        }
    }
    for (double x : xs) {
        double mass = mu.tail_mass(x, side);
        if (!(mass > 0.0)) continue;
        double integral;
        try {
            integral = mu.tail_integral(
                x, [&](double u) { return g(side == Side::Upper ? u - x : x - u); }, side);
        } catch (const DivergenceError&) {
            out.divergent = true;
            out.worst = kInf;
            out.worst_x = x;
            return out;
        }
        double ratio = integral / mass;
        if (ratio > out.worst) {
            out.worst = ratio;
            out.worst_x = x;
        }
    }
    return out;
}

}  // namespace

Report orlicz_condition(const Measure1D& mu, const std::function<double(double)>& beta, double k,
                        double K) {
    if (!(k > 0.0) || !(K >= 1.0)) throw ConfigError("orlicz_condition: need k > 0 and K >= 1");
    Report rep;
    rep.check = "orlicz-tail-condition";
    rep.put("k", k);
    rep.put("K", K);
    auto g = [&](double d) { return std::exp(beta(k * d)); };
    TailSweep up = sweep_tail_ratio(mu, g, Side::Upper);
    TailSweep down = sweep_tail_ratio(mu, g, Side::Lower);
    rep.put("upper_ratio", up.worst);
    rep.put("lower_ratio", down.worst);
    double worst = std::max(up.worst, down.worst);
    rep.extremal = worst;
    rep.witness = "x=" + format_double(up.worst >= down.worst ? up.worst_x : down.worst_x);
    if (up.divergent || down.divergent) {
        rep.verdict = Verdict::Fail;
        rep.note = "orlicz integral divergent on an unbounded tail";
    } else {
        rep.verdict = worst <= K * (1.0 + 1e-9) ? Verdict::Pass : Verdict::Fail;
    }
    return rep;
}

Report tail_cost_bound(const Measure1D& mu, const CostFunction& theta, double a) {
    if (!(a > 0.0)) throw ConfigError("tail_cost_bound: a must be positive");
    Report rep;
    rep.check = "tail-cost-bound";
    rep.put("a", a);
    auto g = [&](double d) { return theta(a * d); };
    TailSweep up = sweep_tail_ratio(mu, g, Side::Upper);
    TailSweep down = sweep_tail_ratio(mu, g, Side::Lower);
    if (up.divergent || down.divergent) throw DivergenceError("tail_cost_bound: integral divergent");
    double worst = std::max(up.worst, down.worst);
    rep.extremal = worst;
    rep.witness = "x=" + format_double(up.worst >= down.worst ? up.worst_x : down.worst_x);
    double bound;
    if (theta.quadratic_coeff() && theta.prescale() == 1.0 &&
        theta.kind() == CostFunction::Kind::QuadTheta) {
        bound = 1.0;  // quadratic costs admit the sharper constant
        rep.put("bound", "1 (quadratic)");
    } else {
        bound = c_theta(theta);
        rep.put("bound", bound);
    }
    rep.put("upper_ratio", up.worst);
    rep.put("lower_ratio", down.worst);
    rep.verdict = worst <= bound * (1.0 + 1e-9) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

Report linear_growth_bound(const Measure1D& mu, double a, CriterionParams params) {
    if (!(a > 0.0)) throw ConfigError("linear_growth_bound: a must be positive");
    TransportMap U(mu);
    Report rep;
    rep.check = "linear-growth-bound";
    rep.put("a", a);
    const double log2 = std::log(2.0);
    auto h_grid = log_grid(params.h_min, params.h_max, 100);
    double worst_all = -kInf, worst_same = -kInf;
    double wh_all = 0.0, wh_same = 0.0;
    for (double h : h_grid) {
        double cap_all = 4.0 / a + h / (a * log2);
        double cap_same = 2.0 / a + h / (a * log2);
        double inc_all = U.sup_increment(h).value;
        double inc_pos = U.sup_increment_constrained(h, 0.0, kInf).value;
        double inc_neg = U.sup_increment_constrained(h, -kInf, -h).value;
        double e_all = inc_all - cap_all;
        double e_same = std::max(inc_pos, inc_neg) - cap_same;
        if (e_all > worst_all) {
            worst_all = e_all;
            wh_all = h;
        }
        if (e_same > worst_same) {
            worst_same = e_same;
            wh_same = h;
        }
    }
    rep.put("excess_any_sign", worst_all);
    rep.put("excess_same_sign", worst_same);
    rep.put("h_worst_any_sign", wh_all);
    rep.put("h_worst_same_sign", wh_same);
    rep.extremal = std::max(worst_all, worst_same);
    rep.verdict = rep.extremal <= 1e-9 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

}  // namespace clsi
