#include "clsi/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "clsi/quadrature.hpp"

namespace clsi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double hp_eval(double p, double ax) {
    // ax = |argument|
    if (ax <= 2.0) return 0.25 * ax * ax;
    return (2.0 / p) * (std::pow(0.5 * ax, p) - 1.0) + 1.0;
}

double hp_conj_eval(double p, double ay) {
    if (ay <= 1.0) return ay * ay;
    double q = p / (p - 1.0);
    return (2.0 * (p - 1.0) / p) * std::pow(ay, q) + (2.0 - p) / p;
}
}  // namespace

double CostFunction::operator()(double x) const {
    double ax = std::abs(scale_ * x);
    switch (kind_) {
        case Kind::QuadH: return 0.25 * ax * ax;
        case Kind::QuadTheta: return ax * ax;
        case Kind::Hp: return hp_eval(param_, ax);
        case Kind::HpConj: return hp_conj_eval(param_, ax);
        case Kind::ThetaD: {
            double D = param_;
            return ax <= D ? ax * ax / (4.0 * D * D) : kInf;
        }
        case Kind::ThetaDConj: {
            double D = param_;
            return ax <= 0.5 / D ? D * D * ax * ax : D * ax - 0.25;
        }
        case Kind::Table: return (*table_)(ax);
    }
    return 0.0;
}

double CostFunction::derivative(double x) const {
    double u = scale_ * x;
    double au = std::abs(u);
    double sgn = u >= 0.0 ? 1.0 : -1.0;
    double d;
    switch (kind_) {
        case Kind::QuadH: d = 0.5 * au; break;
        case Kind::QuadTheta: d = 2.0 * au; break;
        case Kind::Hp: d = au <= 2.0 ? 0.5 * au : std::pow(0.5 * au, param_ - 1.0); break;
        case Kind::HpConj: {
            double q = param_ / (param_ - 1.0);
            d = au <= 1.0 ? 2.0 * au : 2.0 * std::pow(au, q - 1.0);
            break;
        }
        case Kind::ThetaD: {
            double D = param_;
            d = au < D ? au / (2.0 * D * D) : kInf;
            break;
        }
        case Kind::ThetaDConj: {
            double D = param_;
            d = au <= 0.5 / D ? 2.0 * D * D * au : D;
            break;
        }
        case Kind::Table: d = table_->right_slope(au); break;
        default: d = 0.0;
    }
    return sgn * scale_ * d;
}

CostFunction CostFunction::with_scaling(double A, double alpha) const {
    if (!(A >= 1.0)) throw ConfigError("scaling: A must be >= 1");
    if (!(alpha > 1.0 && alpha <= 2.0)) throw ConfigError("scaling: alpha must lie in (1,2]");
    CostFunction c(*this);
    c.scaling_ = ScalingInfo{A, alpha};
    return c;
}

bool CostFunction::has_closed_conjugate() const { return kind_ != Kind::Table; }

CostFunction CostFunction::closed_conjugate() const {
    if (!has_closed_conjugate()) throw ConfigError("no closed-form conjugate for table costs");
    CostFunction c;
    c.scale_ = 1.0 / scale_;
    c.param_ = param_;
    c.t0_ = t0_;
    switch (kind_) {
        case Kind::QuadH: c.kind_ = Kind::QuadTheta; c.role_ = CostRole::Theta; break;
        case Kind::QuadTheta: c.kind_ = Kind::QuadH; c.role_ = CostRole::H; break;
        case Kind::Hp: c.kind_ = Kind::HpConj; c.role_ = CostRole::Theta; break;
        case Kind::HpConj: c.kind_ = Kind::Hp; c.role_ = CostRole::H; break;
        case Kind::ThetaD: c.kind_ = Kind::ThetaDConj; c.role_ = CostRole::H; break;
        case Kind::ThetaDConj: c.kind_ = Kind::ThetaD; c.role_ = CostRole::ThetaD; break;
        case Kind::Table: break;
    }
    return c;
}

std::optional<double> CostFunction::quadratic_coeff() const {
    double s2 = scale_ * scale_;
    switch (kind_) {
        case Kind::QuadH: return 0.25 * s2;
        case Kind::QuadTheta: return s2;
        case Kind::ThetaD: return s2 / (4.0 * param_ * param_);
        default: return std::nullopt;
    }
}

double CostFunction::finite_radius() const {
    if (kind_ == Kind::ThetaD) return param_ / scale_;
    return kInf;
}

std::string CostFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::QuadH: os << "quadratic-H t0=" << format_double(t0_); break;
        case Kind::QuadTheta: os << "quadratic-theta t0=" << format_double(t0_); break;
        case Kind::Hp: os << "hp p=" << format_double(param_); break;
        case Kind::HpConj: os << "hp-conjugate p=" << format_double(param_); break;
        case Kind::ThetaD: os << "thetaD D=" << format_double(param_); break;
        case Kind::ThetaDConj: os << "thetaD-conjugate D=" << format_double(param_); break;
        case Kind::Table: os << "table(" << table_->size() << ")"; break;
    }
    if (scale_ != 1.0) os << " prescale=" << format_double(scale_);
    return os.str();
}

CostFunction make_quadratic_cost(double t0, CostRole role) {
    if (!(t0 > 0.0)) throw ConfigError("quadratic cost: t0 must be positive");
    CostFunction c;
    c.kind_ = role == CostRole::H ? CostFunction::Kind::QuadH : CostFunction::Kind::QuadTheta;
    c.role_ = role;
    c.t0_ = t0;
    c.scaling_ = ScalingInfo{1.0, 2.0};
    return c;
}

CostFunction make_hp_cost(double p) {
    if (!(p > 1.0)) throw ConfigError("hp cost: p must exceed 1");
    CostFunction c;
    c.kind_ = CostFunction::Kind::Hp;
    c.role_ = CostRole::H;
    c.param_ = p;
    c.t0_ = 1.0;
    return c;
}

CostFunction make_theta_d(double D) {
    if (!(D > 0.0)) throw ConfigError("thetaD cost: D must be positive");
    CostFunction c;
    c.kind_ = CostFunction::Kind::ThetaD;
    c.role_ = CostRole::ThetaD;
    c.param_ = D;
    c.t0_ = D;  // quadratic up to the radius
    return c;
}

CostFunction make_table_cost(GridFunction table, CostRole role, double t0) {
    // canonicalize to |x|: fold a symmetric table onto [0, hi]
    auto nodes = table.nodes();
    if (nodes.front() < 0.0) {
        std::vector<double> xs, ys;
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i] < 0.0) {
                double mirrored = table(-nodes[i]);
                if (std::abs(mirrored - table.values()[i]) >
                    1e-9 * (1.0 + std::abs(mirrored)))
                    throw ConfigError("table cost: values are not symmetric");
                continue;
            }
            xs.push_back(nodes[i]);
            ys.push_back(table.values()[i]);
        }
        if (xs.empty() || xs.front() != 0.0) {
            xs.insert(xs.begin(), 0.0);
            ys.insert(ys.begin(), table(0.0));
        }
        table = GridFunction(std::move(xs), std::move(ys), table.extension());
    }
    if (table.nodes().front() != 0.0) throw ConfigError("table cost: grid must start at 0");
    if (std::abs(table.values().front()) > 1e-12) throw ConfigError("table cost: value at 0 must be 0");
    if (!table.check_convex(1e-9)) throw ConfigError("table cost: values are not convex");
    if (table.segment_slope(0) < -1e-12) throw ConfigError("table cost: must be nondecreasing on [0,inf)");
    CostFunction c;
    c.kind_ = CostFunction::Kind::Table;
    c.role_ = role;
    c.t0_ = t0;
    c.table_ = std::make_shared<const GridFunction>(std::move(table));
    return c;
}

CostFunction scaled_cost(const CostFunction& c, double a) {
    if (!(a > 0.0)) throw ConfigError("scaled cost: factor must be positive");
    CostFunction out(c);
    out.scale_ = c.prescale() * a;
    return out;
}

namespace {

// conjugate of a sampled convex function by the monotone-argmax sweep
std::vector<double> sweep_conjugate(std::span<const double> xs, std::span<const double> ys,
                                    std::span<const double> queries_sorted) {
    std::vector<double> out(queries_sorted.size());
    size_t j = 0;
    for (size_t k = 0; k < queries_sorted.size(); ++k) {
        double y = queries_sorted[k];
        if (k > 0 && queries_sorted[k] < queries_sorted[k - 1]) j = 0;  // not sorted; restart
        auto val = [&](size_t i) { return xs[i] * y - ys[i]; };
        while (j + 1 < xs.size() && val(j + 1) >= val(j)) ++j;
        // argmax can only move forward for nondecreasing y; verify local max
        out[k] = val(j);
    }
    return out;
}

}  // namespace

ConjugatePair legendre(const CostFunction& c, std::span<const double> dual_grid) {
    // symmetrize the requested grid (conjugates of even functions are even)
    std::vector<double> mags;
    mags.reserve(dual_grid.size() + 1);
    mags.push_back(0.0);
    for (double g : dual_grid) mags.push_back(std::abs(g));
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());
    std::vector<double> grid;
    grid.reserve(2 * mags.size());
    for (size_t i = mags.size(); i-- > 1;) grid.push_back(-mags[i]);
    grid.insert(grid.end(), mags.begin(), mags.end());
    if (grid.size() < 2) throw ConfigError("legendre: need at least two dual grid points");

    ConjugatePair pair;
    pair.primal = c;

    if (c.has_closed_conjugate()) {
        CostFunction dual = c.closed_conjugate();
        std::vector<double> vals(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) vals[i] = dual(grid[i]);
        pair.dual = dual;
        pair.dual_table = GridFunction(grid, std::move(vals));
        pair.biconjugation_defect = 0.0;  // closed-form pairs are exact by construction
        return pair;
    }

    const GridFunction* tab = c.table();
    if (!tab) throw ConfigError("legendre: cost has neither closed conjugate nor table");

    // symmetric node list (the table is stored on [0, hi] of |x|)
    double s = c.prescale();
    std::vector<double> xs, ys;
    auto tn = tab->nodes();
    auto tv = tab->values();
    for (size_t i = tn.size(); i-- > 1;) {
        xs.push_back(-tn[i] / s);
        ys.push_back(tv[i]);
    }
    for (size_t i = 0; i < tn.size(); ++i) {
        xs.push_back(tn[i] / s);
        ys.push_back(tv[i]);
    }

    double end_slope = tab->segment_slope(tab->size() - 2) * s;
    if (tab->extension() == Extension::Linear) {
        // linear growth brackets the dual domain at the end slope
        for (double y : grid)
            if (std::abs(y) > end_slope + 1e-12)
                throw ConfigError(
                    "legendre: dual argument beyond the slope range bracketed by the grid");
    }

    std::vector<double> dual_vals = sweep_conjugate(xs, ys, grid);
    GridFunction dual_tab(grid, dual_vals);
    pair.dual = make_table_cost(dual_tab, c.role() == CostRole::H ? CostRole::Theta : CostRole::H,
                                c.t0());
    pair.dual_table = std::move(dual_tab);

    // biconjugation defect, measured away from the bracketing edges
    std::vector<double> biconj = sweep_conjugate(grid, dual_vals, xs);
    double defect = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (4 * std::abs(xs[i]) > 3 * std::abs(xs.front())) continue;  // skip outer quarter
        defect = std::max(defect, std::abs(biconj[i] - ys[i]));
    }
    pair.biconjugation_defect = defect;
    return pair;
}

double theta_inverse(const CostFunction& theta, double v) {
    if (v < 0.0) throw ConfigError("theta_inverse: value below theta(0) = 0");
    if (v == 0.0) return 0.0;
    if (auto q = theta.quadratic_coeff()) {
        double t = std::sqrt(v / *q);
        return std::min(t, theta.finite_radius());
    }
    // bracket by doubling, then bisect
    double hi = 1.0;
    for (int i = 0; i < 200 && theta(hi) < v; ++i) hi *= 2.0;
    if (theta(hi) < v) throw ConfigError("theta_inverse: could not bracket value");
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (theta(mid) >= v) hi = mid; else lo = mid;
    }
    return hi;
}

namespace {

struct ScalingScan {
    double worst_ratio = 0.0;  // max H(sx) / (s^alpha H(x))
    double worst_s = 0.0, worst_x = 0.0;
};

ScalingScan scan_ratios(const CostFunction& c, double alpha, std::span<const double> s_grid,
                        std::span<const double> x_grid, double s_min) {
    ScalingScan res;
    for (double s : s_grid) {
        if (s < s_min || s <= 0.0 || s > 1.0) continue;
        for (double x : x_grid) {
            double hx = c(x);
            if (!(hx > 0.0) || !std::isfinite(hx)) continue;
            double hsx = c(s * x);
            if (!std::isfinite(hsx)) continue;
            double ratio = hsx / (std::pow(s, alpha) * hx);
            if (ratio > res.worst_ratio) {
                res.worst_ratio = ratio;
                res.worst_s = s;
                res.worst_x = x;
            }
        }
    }
    return res;
}

bool alpha_feasible(const CostFunction& c, double alpha, std::span<const double> s_grid,
                    std::span<const double> x_grid, double* A_out) {
    // A must stabilize as the s grid extends toward 0
    ScalingScan full = scan_ratios(c, alpha, s_grid, x_grid, 0.0);
    ScalingScan restricted = scan_ratios(c, alpha, s_grid, x_grid, 1e-2);
    if (full.worst_ratio <= 0.0) return false;
    if (A_out) *A_out = std::max(full.worst_ratio, 1.0);
    return full.worst_ratio <= restricted.worst_ratio * 1.05 + 1e-12;
}

}  // namespace

Report scaling_check(const CostFunction& c, std::span<const double> s_grid,
                     std::span<const double> x_grid) {
    if (s_grid.empty() || x_grid.empty()) throw ConfigError("scaling_check: empty grid");
    std::vector<double> ss(s_grid.begin(), s_grid.end());
    if (std::find(ss.begin(), ss.end(), 0.0) == ss.end()) ss.push_back(0.0);
    if (std::find(ss.begin(), ss.end(), 1.0) == ss.end()) ss.push_back(1.0);
    std::sort(ss.begin(), ss.end());

    Report rep;
    rep.check = "cost-scaling";
    if (auto sc = c.scaling()) {
        ScalingScan scan = scan_ratios(c, sc->alpha, ss, x_grid, 0.0);
        rep.put("declared_A", sc->A);
        rep.put("declared_alpha", sc->alpha);
        rep.extremal = scan.worst_ratio;  // smallest feasible A on this grid
        rep.verdict = scan.worst_ratio <= sc->A * (1.0 + 1e-9) ? Verdict::Pass : Verdict::Fail;
        if (rep.verdict == Verdict::Fail) {
            std::ostringstream os;
            os << "s=" << format_double(scan.worst_s) << " x=" << format_double(scan.worst_x);
            rep.witness = os.str();
        }
        return rep;
    }

    // fit mode: largest feasible alpha in (1,2], then the smallest A
    double alpha_best = 0.0, A_best = kInf;
    double step = 0.02;
    for (double alpha = 2.0; alpha > 1.0 + 1e-9; alpha -= step) {
        double A = kInf;
        if (alpha_feasible(c, alpha, ss, x_grid, &A)) {
            alpha_best = alpha;
            A_best = A;
            break;
        }
    }
    if (alpha_best == 0.0) {
        rep.verdict = Verdict::Fail;
        rep.note = "no feasible alpha in (1,2]; ratio grows as s approaches 0";
        ScalingScan scan = scan_ratios(c, 1.0 + 1e-6, ss, x_grid, 0.0);
        std::ostringstream os;
        os << "s=" << format_double(scan.worst_s) << " x=" << format_double(scan.worst_x);
        rep.witness = os.str();
        return rep;
    }
    if (alpha_best < 2.0) {
        // refine toward the largest feasible alpha
        double lo = alpha_best, hi = std::min(2.0, alpha_best + step);
        for (int i = 0; i < 25; ++i) {
            double mid = 0.5 * (lo + hi);
            double A = kInf;
            if (alpha_feasible(c, mid, ss, x_grid, &A)) {
                lo = mid;
                A_best = A;
            } else {
                hi = mid;
            }
        }
        alpha_best = lo;
    }
    rep.put("fitted_A", A_best);
    rep.put("fitted_alpha", alpha_best);
    rep.extremal = A_best;
    rep.verdict = Verdict::Pass;
    return rep;
}

Report power_lower_bound(const CostFunction& c) {
    auto sc = c.scaling();
    if (!sc) throw ConfigError("power_lower_bound: scaling metadata (A, alpha) required");
    double t0 = c.t0();
    Report rep;
    rep.check = "power-lower-bound";
    rep.put("A", sc->A);
    rep.put("alpha", sc->alpha);
    rep.put("t0", t0);

    auto xs = log_grid(t0, 1e3 * t0, 200);
    double worst_margin = kInf, worst_x = t0;
    double worst_margin_adj = kInf;
    double h_t0 = c(t0);
    for (double x : xs) {
        double hx = c(x);
        double bound = std::pow(t0, 2.0 - sc->alpha) * std::pow(x, sc->alpha) / sc->A;
        double margin = hx - bound;
        if (margin < worst_margin) {
            worst_margin = margin;
            worst_x = x;
        }
        // zone-adjusted variant uses the actual value H(t0) in place of t0^2
        double bound_adj = std::isfinite(h_t0)
                               ? std::pow(x / t0, sc->alpha) * h_t0 / sc->A
                               : kInf;
        worst_margin_adj = std::min(worst_margin_adj, hx - bound_adj);
    }
    rep.extremal = worst_margin;
    rep.witness = "x=" + format_double(worst_x);
    rep.verdict = worst_margin >= -1e-9 * std::max(1.0, std::abs(c(worst_x)))
                      ? Verdict::Pass
                      : Verdict::Fail;
    rep.put("zone_adjusted_margin", worst_margin_adj);
    rep.note =
        "bound substitutes declared constants verbatim; the quadratic zone gives "
        "H(t0) = t0^2/4, so the literal bound needs A >= 4 there (zone-adjusted "
        "margin uses H(t0) in place of t0^2)";
    return rep;
}

double c_theta(const CostFunction& theta, double rel_tol) {
    if (std::isfinite(theta.finite_radius()))
        throw DivergenceError("c_theta: cost is infinite beyond a finite radius");
    const double log2 = std::log(2.0);
    return integrate_tail_upper(
        [&](double t) { return theta(2.0 + t / log2) * std::exp(-t); }, 0.0, 1.0, rel_tol);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ConfigError("log_grid: bad parameters");
    std::vector<double> out(static_cast<size_t>(n));
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    if (!(hi > lo) || n < 2) throw ConfigError("linear_grid: bad parameters");
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace clsi
