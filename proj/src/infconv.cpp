#include "clsi/infconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace clsi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadCost {
    double lambda;  // cost contribution lambda * (x-y)^2
    double radius;  // |x-y| <= radius, else +inf
};

// t * theta(|x-y|/t) for theta(u) = q u^2 within radius R
QuadCost quad_cost(const CostFunction& theta, double t, double q) {
    return {q / t, theta.finite_radius() * t};
}

double exhaustive_min(const GridFunction& f, const CostFunction& theta, double t, double x,
                      size_t* argmin) {
    auto xs = f.nodes();
    auto ys = f.values();
    double best = kInf;
    size_t bi = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double v = ys[i] + t * theta(std::abs(x - xs[i]) / t);
        if (v < best) {
            best = v;
            bi = i;
        }
    }
    if (argmin) *argmin = bi;
    return best;
}

// lower envelope of parabolas lambda (x - y_i)^2 + f_i over sorted queries
std::vector<double> parabola_envelope(std::span<const double> ys, std::span<const double> fs,
                                      double lambda, std::span<const double> queries,
                                      std::vector<size_t>* argmins) {
    size_t n = ys.size();
    std::vector<size_t> v(n);
    std::vector<double> z(n + 1);
    size_t k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    auto intersect = [&](size_t i, size_t j) {
        return ((fs[j] - fs[i]) / lambda + ys[j] * ys[j] - ys[i] * ys[i]) /
               (2.0 * (ys[j] - ys[i]));
    };
    for (size_t j = 1; j < n; ++j) {
        double s = intersect(v[k], j);
        while (k > 0 && s <= z[k]) {
            --k;
            s = intersect(v[k], j);
        }
        ++k;
        v[k] = j;
        z[k] = s;
        z[k + 1] = kInf;
    }
    std::vector<double> out(queries.size());
    if (argmins) argmins->resize(queries.size());
    size_t i = 0;
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        double x = queries[qi];
        while (z[i + 1] < x) ++i;
        double d = x - ys[v[i]];
        out[qi] = fs[v[i]] + lambda * d * d;
        if (argmins) (*argmins)[qi] = v[i];
    }
    return out;
}

// continuous minimization over the piecewise-linear interpolant for
// quadratic costs with an optional radius
double exact_pl_min(const GridFunction& f, double lambda, double radius, double x) {
    auto xs = f.nodes();
    auto ys = f.values();
    double ylo = x - radius, yhi = x + radius;
    double best = kInf;
    auto consider = [&](double a, double b, double fa, double slope) {
        // f = fa + slope (y - a) on [a, b] (a may be -inf via extension rays)
        double lo = std::max(a, ylo), hi = std::min(b, yhi);
        if (!(lo <= hi)) return;
        double y = x - slope / (2.0 * lambda);  // unconstrained vertex
        y = std::clamp(y, lo, hi);
        double fy = fa + slope * (y - a);
        double d = x - y;
        best = std::min(best, fy + lambda * d * d);
    };
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        consider(xs[i], xs[i + 1], ys[i], f.segment_slope(i));
    if (f.extension() == Extension::Linear) {
        double s0 = f.segment_slope(0);
        double sl = f.segment_slope(xs.size() - 2);
        // left ray: f = y_front + s0 (y - x_front) for y <= x_front
        {
            double lo = std::max(-kInf, ylo), hi = std::min(xs.front(), yhi);
            if (lo <= hi) {
                double y = std::clamp(x - s0 / (2.0 * lambda), lo, hi);
                if (std::isfinite(y)) {
                    double fy = ys.front() + s0 * (y - xs.front());
                    best = std::min(best, fy + lambda * (x - y) * (x - y));
                }
            }
        }
        {
            double lo = std::max(xs.back(), ylo), hi = std::min(kInf, yhi);
            if (lo <= hi) {
                double y = std::clamp(x - sl / (2.0 * lambda), lo, hi);
                if (std::isfinite(y)) {
                    double fy = ys.back() + sl * (y - xs.back());
                    best = std::min(best, fy + lambda * (x - y) * (x - y));
                }
            }
        }
    }
    return best;
}

InfConvEngine resolve_engine(const GridFunction& f, const CostFunction& theta,
                             InfConvEngine engine) {
    if (engine != InfConvEngine::Auto) return engine;
    if (theta.quadratic_coeff()) return InfConvEngine::ExactPiecewiseLinear;
    return InfConvEngine::Exhaustive;
}

}  // namespace

double inf_convolution_at(const GridFunction& f, const CostFunction& theta, double t, double x,
                          InfConvEngine engine) {
    if (!(t > 0.0)) throw ConfigError("inf_convolution: t must be positive");
    engine = resolve_engine(f, theta, engine);
    switch (engine) {
        case InfConvEngine::Exhaustive:
            return exhaustive_min(f, theta, t, x, nullptr);
        case InfConvEngine::FastQuadratic: {
            auto q = theta.quadratic_coeff();
            if (!q || std::isfinite(theta.finite_radius()))
                throw ConfigError("fast engine requires a globally quadratic cost");
            double lam = *q / t;
            std::vector<double> query{x};
            return parabola_envelope(f.nodes(), f.values(), lam, query, nullptr)[0];
        }
        case InfConvEngine::ExactPiecewiseLinear: {
            auto q = theta.quadratic_coeff();
            if (!q) throw ConfigError("exact engine requires a quadratic cost");
            QuadCost qc = quad_cost(theta, t, *q);
            return exact_pl_min(f, qc.lambda, qc.radius, x);
        }
        case InfConvEngine::Auto: break;
    }
    throw ConfigError("inf_convolution: unresolved engine");
}

GridFunction inf_convolution(const GridFunction& f, const CostFunction& theta, double t,
                             std::span<const double> out_nodes, InfConvEngine engine) {
    if (!(t > 0.0)) throw ConfigError("inf_convolution: t must be positive");
    if (out_nodes.size() < 2) throw ConfigError("inf_convolution: need at least two output nodes");
    if (!f.bounded_below()) throw ConfigError("inf_convolution: input not bounded below");
    engine = resolve_engine(f, theta, engine);

    std::vector<double> outs(out_nodes.begin(), out_nodes.end());
    std::sort(outs.begin(), outs.end());
    std::vector<double> vals(outs.size());
    bool edge = false;
    double edge_x = 0.0;

    if (engine == InfConvEngine::FastQuadratic) {
        auto q = theta.quadratic_coeff();
        if (!q || std::isfinite(theta.finite_radius()))
            throw ConfigError("fast engine requires a globally quadratic cost");
        std::vector<size_t> argmins;
        vals = parabola_envelope(f.nodes(), f.values(), *q / t, outs, &argmins);
        if (f.extension() == Extension::Linear) {
            for (size_t i = 0; i < argmins.size(); ++i) {
                if (argmins[i] == 0 || argmins[i] == f.size() - 1) {
                    edge = true;
                    edge_x = outs[i];
                    break;
                }
            }
        }
    } else if (engine == InfConvEngine::Exhaustive) {
        for (size_t i = 0; i < outs.size(); ++i) {
            size_t am = 0;
            vals[i] = exhaustive_min(f, theta, t, outs[i], &am);
            if (f.extension() == Extension::Linear && (am == 0 || am == f.size() - 1)) {
                // an edge argmin under linear extension means the infimum may
                // continue beyond the sampled hull
                edge = true;
                edge_x = outs[i];
            }
        }
    } else {
        for (size_t i = 0; i < outs.size(); ++i)
            vals[i] = inf_convolution_at(f, theta, t, outs[i], engine);
    }

    if (edge) {
        std::ostringstream os;
        os << "inf_convolution: infimum attained at the grid edge near x=" << format_double(edge_x)
           << "; enlarge the input hull padding";
        throw EdgeAttainedError(os.str());
    }
    return GridFunction(std::move(outs), std::move(vals), Extension::Linear);
}

double r_lambda(const GridFunction& f, const CostFunction& Hstar, double a, double lambda,
                double x) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("r_lambda: lambda must lie in (0,1)");
    if (!f.check_convex(1e-9)) throw ConfigError("r_lambda: input must be convex");
    if (auto q = Hstar.quadratic_coeff()) {
        // cost lambda * q * a^2 * (x-y)^2
        double radius = Hstar.finite_radius() / a;
        return exact_pl_min(f, lambda * (*q) * a * a, radius, x);
    }
    // general convex cost: ternary search over a padded hull
    double L = f.max_abs_slope();
    double pad = 1.0;
    for (int i = 0; i < 200; ++i) {
        double marginal = lambda * a * std::abs(Hstar.derivative(a * pad));
        if (marginal >= L || !std::isfinite(marginal)) break;
        pad *= 2.0;
    }
    double lo = f.nodes().front() - pad, hi = f.nodes().back() + pad;
    if (f.extension() == Extension::PlusInfinity) {
        lo = f.nodes().front();
        hi = f.nodes().back();
    }
    auto obj = [&](double y) { return f(y) + lambda * Hstar(a * (x - y)); };
    for (int i = 0; i < 300; ++i) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (obj(m1) <= obj(m2)) hi = m2; else lo = m1;
    }
    return obj(0.5 * (lo + hi));
}

Report r_lambda_gap_check(const GridFunction& f, const CostFunction& H, const CostFunction& Hstar,
                          double a, double lambda) {
    Report rep;
    rep.check = "r-lambda-convexity-gap";
    rep.put("a", a);
    rep.put("lambda", lambda);
    double worst = -kInf;
    double worst_x = 0.0;
    for (double x : f.nodes()) {
        double gap = f(x) - r_lambda(f, Hstar, a, lambda, x);
        double bound = lambda * H(f.right_slope(x) / (a * lambda));
        double excess = gap - bound;
        if (excess > worst) {
            worst = excess;
            worst_x = x;
        }
    }
    rep.extremal = worst;
    rep.witness = "x=" + format_double(worst_x);
    rep.verdict = worst <= 1e-9 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

ResidualTable hopf_lax_residual(const GridFunction& f, const CostFunction& H,
                                std::span<const double> t_grid, std::span<const double> x_grid,
                                double exclusion_margin) {
    if (t_grid.size() < 3 || x_grid.size() < 3)
        throw ConfigError("hopf_lax_residual: grids too coarse to form centered differences");
    if (!H.has_closed_conjugate())
        throw ConfigError("hopf_lax_residual: cost must provide its conjugate");
    CostFunction Hstar = H.closed_conjugate();

    std::vector<double> ts(t_grid.begin(), t_grid.end());
    std::vector<double> xs(x_grid.begin(), x_grid.end());
    std::sort(ts.begin(), ts.end());
    std::sort(xs.begin(), xs.end());

    InfConvEngine engine = Hstar.quadratic_coeff() && !std::isfinite(Hstar.finite_radius())
                               ? InfConvEngine::FastQuadratic
                               : InfConvEngine::Exhaustive;
    std::vector<std::vector<double>> Q(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        auto vals = inf_convolution(f, Hstar, ts[i], xs, engine).values();
        Q[i].assign(vals.begin(), vals.end());
    }

    double dx = xs[1] - xs[0], dt = ts[1] - ts[0];
    auto kinks = f.kinks(1e-12);
    double max_slope_img = 0.0;
    for (const auto& k : kinks)
        max_slope_img = std::max({max_slope_img, std::abs(H.derivative(k.slope_left)),
                                  std::abs(H.derivative(k.slope_right))});
    double margin = exclusion_margin > 0.0 ? exclusion_margin : 3.0 * (dx + dt * max_slope_img);

    ResidualTable table;
    table.ts.assign(ts.begin() + 1, ts.end() - 1);
    table.xs.assign(xs.begin() + 1, xs.end() - 1);
    double sum = 0.0;
    size_t count = 0;
    for (size_t i = 1; i + 1 < ts.size(); ++i) {
        std::vector<double> row;
        row.reserve(xs.size() - 2);
        double tlo = ts[i - 1], thi = ts[i + 1];
        for (size_t j = 1; j + 1 < xs.size(); ++j) {
            double dQdt = (Q[i + 1][j] - Q[i - 1][j]) / (ts[i + 1] - ts[i - 1]);
            double dQdx = (Q[i][j + 1] - Q[i][j - 1]) / (xs[j + 1] - xs[j - 1]);
            double res = dQdt + H(dQdx);
            table.max_abs_all = std::max(table.max_abs_all, std::abs(res));
            bool excluded = false;
            for (const auto& k : kinks) {
                double lo = k.x + std::min(tlo * H.derivative(k.slope_left),
                                           thi * H.derivative(k.slope_left)) -
                            margin;
                double hi = k.x + std::max(tlo * H.derivative(k.slope_right),
                                           thi * H.derivative(k.slope_right)) +
                            margin;
                if (xs[j] >= lo && xs[j] <= hi) {
                    excluded = true;
                    break;
                }
            }
            if (excluded) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                row.push_back(res);
                table.max_abs = std::max(table.max_abs, std::abs(res));
                sum += std::abs(res);
                ++count;
            }
        }
        table.r.push_back(std::move(row));
    }
    table.mean_abs = count ? sum / static_cast<double>(count) : 0.0;
    return table;
}

double maurey_k(double u) {
    if (u < 0.0) throw ConfigError("maurey_k: argument must be nonnegative");
    return u < 0.5 ? u - u * u : 0.25;
}

Report maurey_bound_check(const GridFunction& phi, double D, const Measure1D& mu) {
    Report rep;
    rep.check = "maurey-envelope";
    rep.put("D", D);
    double lo = mu.support_lo(), hi = mu.support_hi();
    if (!(std::isfinite(lo) && std::isfinite(hi)))
        throw ConfigError("maurey_bound_check: measure must have bounded support");
    if (hi - lo > D * (1.0 + 1e-12))
        throw ConfigError("maurey_bound_check: support diameter exceeds D");
    if (!phi.check_convex(1e-9)) throw ConfigError("maurey_bound_check: phi must be convex");

    // normalize so that the infimum of phi over the support is 0
    double v0 = std::min(phi(lo), phi(hi));
    for (double x : phi.nodes())
        if (x > lo && x < hi) v0 = std::min(v0, phi(x));

    CostFunction thetaD = make_theta_d(D);
    std::vector<double> probe;
    if (mu.is_atomic()) {
        auto pos = mu.positions();
        probe.assign(pos.begin(), pos.end());
    } else {
        probe = linear_grid(lo, hi, 2001);
    }
    double worst = -kInf;
    double worst_x = 0.0;
    for (double x : probe) {
        double q = inf_convolution_at(phi, thetaD, 1.0, x, InfConvEngine::ExactPiecewiseLinear) - v0;
        double excess = q - maurey_k(std::max(phi(x) - v0, 0.0));
        if (excess > worst) {
            worst = excess;
            worst_x = x;
        }
    }
    rep.put("envelope_excess", worst);
    rep.witness = "x=" + format_double(worst_x);

    // e^{k(u)} <= 2 - e^{-u}
    double worst_exp = -kInf;
    for (double u : linear_grid(0.0, 5.0, 10000)) {
        double gap = std::exp(maurey_k(u)) - (2.0 - std::exp(-u));
        worst_exp = std::max(worst_exp, gap);
    }
    rep.put("exp_chain_excess", worst_exp);
    rep.extremal = std::max(worst, worst_exp);
    rep.verdict = (worst <= 1e-9 && worst_exp <= 1e-12) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

}  // namespace clsi
