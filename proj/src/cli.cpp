#include "clsi/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "clsi/concentration.hpp"
#include "clsi/config.hpp"
#include "clsi/infconv.hpp"
#include "clsi/inequalities.hpp"
#include "clsi/transport_map.hpp"
#include "clsi/weak_ot.hpp"

namespace clsi {

namespace {

struct Parsed {
    std::string subcommand;
    std::map<std::string, std::string> flags;
    std::optional<Measure1D> measure;
    std::optional<Measure1D> source;
    std::optional<Measure1D> target;
    std::optional<CostSpec> cost;
};

bool is_measure_keyword(const std::string& t) {
    return t == "family" || t == "atom" || t == "gridcdf" || t == "measure";
}

Parsed parse_args(const std::vector<std::string>& args) {
    if (args.empty()) throw ConfigError("usage: clsi <subcommand> [args]");
    Parsed p;
    p.subcommand = args[0];
    std::vector<std::string> tokens(args.begin() + 1, args.end());
    size_t pos = 0;
    while (pos < tokens.size()) {
        const std::string& t = tokens[pos];
        if (t.rfind("--", 0) == 0) {
            std::string key = t.substr(2);
            if (key == "cost") {
                // flag form: --cost <kind> [param]; the kind's parameter may
                // come from the dedicated flags (e.g. --t0) for quadratic
                if (pos + 1 >= tokens.size()) throw ConfigError("--cost needs a kind");
                CostSpec spec;
                std::string kind = tokens[pos + 1];
                pos += 2;
                if (kind == "quadratic") {
                    spec.kind = CostSpec::Kind::Quadratic;
                } else if (kind == "hp" || kind == "thetaD") {
                    if (pos >= tokens.size()) throw ConfigError("--cost " + kind + " needs a parameter");
                    spec.kind = kind == "hp" ? CostSpec::Kind::Hp : CostSpec::Kind::ThetaD;
                    spec.param = std::stod(tokens[pos]);
                    ++pos;
                } else if (kind == "table") {
                    if (pos >= tokens.size()) throw ConfigError("--cost table needs a path");
                    spec.kind = CostSpec::Kind::Table;
                    spec.table_path = tokens[pos];
                    ++pos;
                } else {
                    throw ConfigError("unknown cost kind: " + kind);
                }
                p.cost = spec;
                continue;
            }
            if (pos + 1 >= tokens.size()) throw ConfigError("flag --" + key + " needs a value");
            p.flags[key] = tokens[pos + 1];
            pos += 2;
        } else if (t == "cost") {
            p.cost = parse_cost_tokens(tokens, pos);
        } else if (t == "source") {
            ++pos;
            p.source = parse_measure_tokens(tokens, pos);
        } else if (t == "target") {
            ++pos;
            p.target = parse_measure_tokens(tokens, pos);
        } else if (is_measure_keyword(t)) {
            p.measure = parse_measure_tokens(tokens, pos);
        } else if (p.subcommand == "chain" && p.flags.find("direction") == p.flags.end()) {
            p.flags["direction"] = t;
            ++pos;
        } else {
            throw ConfigError("unexpected token: " + t);
        }
    }
    return p;
}

double flag_num(const Parsed& p, const std::string& key, double fallback) {
    auto it = p.flags.find(key);
    if (it == p.flags.end()) return fallback;
    return std::stod(it->second);
}

uint64_t flag_u64(const Parsed& p, const std::string& key, uint64_t fallback) {
    auto it = p.flags.find(key);
    if (it == p.flags.end()) return fallback;
    return std::stoull(it->second);
}

std::string flag_str(const Parsed& p, const std::string& key, const std::string& fallback) {
    auto it = p.flags.find(key);
    return it == p.flags.end() ? fallback : it->second;
}

bool has_flag(const Parsed& p, const std::string& key) { return p.flags.count(key) > 0; }

struct Emitter {
    std::ostream& out;
    std::string out_dir;

    void block(const std::string& text) {
        out << text;
        if (!out_dir.empty()) {
            std::ofstream f(out_dir + "/report.txt", std::ios::app);
            f << text;
        }
    }
    void table(const std::string& name, const std::string& csv) {
        out << csv;
        if (!out_dir.empty()) {
            std::ofstream f(out_dir + "/" + name + ".csv");
            f << csv;
        }
    }
};

const Measure1D& require_measure(const Parsed& p) {
    if (!p.measure) throw ConfigError(p.subcommand + ": a measure spec is required");
    return *p.measure;
}

const CostSpec& require_cost(const Parsed& p) {
    if (!p.cost) throw ConfigError(p.subcommand + ": a cost spec is required");
    return *p.cost;
}

Tolerance tolerance_from(const Parsed& p) {
    Tolerance tol;
    tol.rel = flag_num(p, "tol", tol.rel);
    return tol;
}

int verdict_exit(Verdict v) { return v == Verdict::Pass ? 0 : 1; }

int cmd_check_criterion(const Parsed& p, Emitter& em) {
    const Measure1D& mu = require_measure(p);
    CostFunction theta = require_cost(p).as_theta();
    double t0 = flag_num(p, "t0", theta.t0());
    CriterionParams params;
    params.h_min = flag_num(p, "h-min", params.h_min);
    params.h_max = flag_num(p, "h-max", params.h_max);
    params.h_points = static_cast<int>(flag_num(p, "h-points", params.h_points));
    params.b_min = flag_num(p, "b-min", params.b_min);
    CriterionResult res = criterion_check(mu, theta, t0, params);

    std::ostringstream csv;
    csv << "h,delta,ratio\n";
    for (size_t i = 0; i < res.curve.h.size(); ++i)
        csv << format_double(res.curve.h[i]) << "," << format_double(res.curve.delta[i]) << ","
            << format_double(res.ratios[i]) << "\n";
    em.table("criterion", csv.str());
    em.block(res.report.to_text());
    return verdict_exit(res.report.verdict);
}

int cmd_lsi_test(const Parsed& p, Emitter& em) {
    const Measure1D& mu = require_measure(p);
    CostFunction H = require_cost(p).as_h();
    double c = flag_num(p, "c", 1.0);
    auto fam = family_for(mu, flag_u64(p, "seed", 1),
                          static_cast<int>(flag_num(p, "family-size", 200)),
                          flag_num(p, "lipschitz", 1.0));
    auto fns = generate_tests(fam);
    InequalityReport rep = lsi_test(mu, H, c, fns, tolerance_from(p));
    em.table("lsi-ratios", rep.ratio_table_csv());
    em.block(rep.to_text());
    return verdict_exit(rep.verdict);
}

int cmd_dual_ic(const Parsed& p, Emitter& em) {
    const Measure1D& mu = require_measure(p);
    CostFunction theta = require_cost(p).as_theta();
    double a = flag_num(p, "a", 1.0);
    if (a != 1.0) theta = scaled_cost(theta, a);
    std::string mode_s = flag_str(p, "mode", "minus");
    DualIcMode mode = mode_s == "minus"  ? DualIcMode::Minus
                      : mode_s == "plus" ? DualIcMode::Plus
                                         : DualIcMode::TwoSided;
    double t = flag_num(p, "t", 1.0);
    auto fam = family_for(mu, flag_u64(p, "seed", 1),
                          static_cast<int>(flag_num(p, "family-size", 200)),
                          flag_num(p, "lipschitz", 1.0));
    auto fns = generate_tests(fam);
    InequalityReport rep = dual_ic_test(mu, theta, t, mode, fns, tolerance_from(p));
    em.table("dual-ic-ratios", rep.ratio_table_csv());
    em.block(rep.to_text());
    return verdict_exit(rep.verdict);
}

int cmd_poincare(const Parsed& p, Emitter& em) {
    const Measure1D& mu = require_measure(p);
    double a = flag_num(p, "a", 1.0);
    auto fam = family_for(mu, flag_u64(p, "seed", 1),
                          static_cast<int>(flag_num(p, "family-size", 200)),
                          flag_num(p, "lipschitz", 1.0));
    auto fns = generate_tests(fam);
    InequalityReport rep = convex_poincare_test(mu, a, fns, tolerance_from(p));
    em.table("poincare-ratios", rep.ratio_table_csv());
    em.block(rep.to_text());
    return verdict_exit(rep.verdict);
}

int cmd_infconv(const Parsed& p, Emitter& em) {
    std::string func = flag_str(p, "func", "");
    if (func.empty()) throw ConfigError("infconv: --func <table path> is required");
    GridFunction f = parse_function_table(func);
    CostFunction theta = require_cost(p).as_theta();
    double t = flag_num(p, "t", 1.0);
    double pad = flag_num(p, "pad", 0.0);
    auto nodes = f.nodes();
    std::vector<double> out_nodes =
        linear_grid(nodes.front() - pad, nodes.back() + pad,
                    static_cast<int>(flag_num(p, "points", static_cast<double>(nodes.size()))));
    GridFunction q = inf_convolution(f, theta, t, out_nodes);
    std::ostringstream csv;
    csv << "x,qtf\n";
    for (size_t i = 0; i < q.size(); ++i)
        csv << format_double(q.nodes()[i]) << "," << format_double(q.values()[i]) << "\n";
    em.table("infconv", csv.str());

    if (has_flag(p, "residual")) {
        CostFunction H = require_cost(p).as_h();
        double dt = 1e-3;
        std::vector<double> ts{t - dt, t, t + dt};
        ResidualTable res = hopf_lax_residual(f, H, ts, out_nodes);
        Report rep;
        rep.check = "hopf-lax-residual";
        rep.put("t", t);
        rep.put("max_abs", res.max_abs);
        rep.put("mean_abs", res.mean_abs);
        rep.put("max_abs_with_kinks", res.max_abs_all);
        rep.verdict = Verdict::Pass;
        em.block(rep.to_text());
    }
    return 0;
}

int cmd_weak_ot(const Parsed& p, Emitter& em) {
    if (!p.source || !p.target)
        throw ConfigError("weak-ot: 'source <measure>' and 'target <measure>' are required");
    CostFunction theta = require_cost(p).as_theta();
    double a = flag_num(p, "a", 1.0);
    if (a != 1.0) theta = scaled_cost(theta, a);
    WeakOtResult res = weak_ot_solve(*p.target, *p.source, theta);

    std::ostringstream csv;
    for (size_t i = 0; i < res.kernel.rows(); ++i) {
        for (size_t j = 0; j < res.kernel.cols(); ++j) {
            if (j) csv << ",";
            csv << format_double(res.kernel.at(i, j));
        }
        csv << "\n";
    }
    em.table("kernel", csv.str());

    Report rep;
    rep.check = "weak-barycentric-transport";
    rep.put("source", p.source->describe());
    rep.put("target", p.target->describe());
    rep.put("cost", theta.describe());
    rep.put("value", res.value);
    rep.put("iterations", static_cast<double>(res.iterations));
    rep.put("gap", res.gap);
    rep.put("marginal_violation", res.kernel.max_marginal_violation());
    double classical = classical_ot_1d(*p.source, *p.target, theta);
    rep.put("classical_cost", classical);
    rep.put("jensen_excess", res.value - classical);
    rep.verdict = res.value <= classical + 1e-7 ? Verdict::Pass : Verdict::Fail;
    em.block(rep.to_text());
    return verdict_exit(rep.verdict);
}

int cmd_concentration(const Parsed& p, Emitter& em) {
    ExperimentConfig cfg;
    if (p.measure) cfg.base = *p.measure;
    cfg.dim = static_cast<int>(flag_num(p, "dim", 4));
    cfg.samples = static_cast<int>(flag_num(p, "samples", 100000));
    cfg.seed = flag_u64(p, "seed", 0);
    if (!has_flag(p, "seed")) throw ConfigError("concentration: --seed is required");
    cfg.t_grid = default_t_grid(static_cast<int>(flag_num(p, "t-points", 28)),
                                flag_num(p, "t-max", 4.0));
    ZooFunction zoo = zoo_from_name(flag_str(p, "zoo", "norm"));

    TailTable tails = simulate_tails(cfg, zoo);
    TailFit fit = fit_subgaussian(tails);

    std::ostringstream csv;
    csv << "t,lower,upper,half_width\n";
    for (size_t i = 0; i < tails.t.size(); ++i)
        csv << format_double(tails.t[i]) << "," << format_double(tails.lower[i]) << ","
            << format_double(tails.upper[i]) << "," << format_double(tails.half_width[i]) << "\n";
    em.table("tails", csv.str());

    Report rep;
    rep.check = "two-sided-concentration";
    rep.put("base", cfg.base.describe());
    rep.put("dim", static_cast<double>(cfg.dim));
    rep.put("samples", static_cast<double>(cfg.samples));
    rep.put("zoo", zoo_name(zoo));
    rep.put("median", tails.median);
    rep.put("fitted_A", fit.A);
    rep.put("fitted_B", fit.B);
    rep.put("fit_residual", fit.residual);
    rep.put("points_used", static_cast<double>(fit.points_used));
    if (cfg.chained_constant > 0.0) rep.put("chained_constant", cfg.chained_constant);
    rep.put("degenerate", fit.degenerate ? "yes" : "no");
    rep.put("envelope_ok", fit.envelope_ok ? "yes" : "no");
    rep.verdict = (!fit.degenerate && fit.envelope_ok) ? Verdict::Pass : Verdict::Fail;
    em.block(rep.to_text());
    return verdict_exit(rep.verdict);
}

int cmd_chain(const Parsed& p, Emitter& em) {
    std::string dir = flag_str(p, "direction", "");
    if (dir.empty()) throw ConfigError("chain: direction (b_to_c|c_to_delta|c_to_a|a_to_b) required");
    CostSpec spec = p.cost ? *p.cost : CostSpec{};
    double t0 = flag_num(p, "t0", 1.0);
    if (spec.kind == CostSpec::Kind::Quadratic) spec.param = t0;
    CostFunction theta = spec.as_theta();

    Report rep;
    rep.check = "constant-chain(" + dir + ")";
    rep.put("cost", theta.describe());
    rep.put("t0", t0);
    if (dir == "b_to_c") {
        double b = flag_num(p, "b", 1.0);
        double c = chain_b_to_c(theta, t0, b);
        rep.put("b", b);
        rep.put("c", c);
        rep.extremal = c;
    } else if (dir == "c_to_delta") {
        double c = flag_num(p, "c", 1.0);
        double h = flag_num(p, "h", 1.0);
        rep.put("c", c);
        rep.put("h", h);
        rep.put("delta_bound", chain_delta_bound(c, h));
        rep.put("delta_bound_sharp", chain_delta_bound_sharp(c, h));
    } else if (dir == "c_to_a") {
        double c = flag_num(p, "c", 1.0);
        double A = flag_num(p, "A", 1.0);
        double alpha = flag_num(p, "alpha", 2.0);
        double a = chain_c_to_a(c, A, alpha);
        rep.put("c", c);
        rep.put("A", A);
        rep.put("alpha", alpha);
        rep.put("a", a);
        rep.extremal = a;
    } else if (dir == "a_to_b") {
        double a = flag_num(p, "a", 1.0);
        rep.put("a", a);
        rep.put("b_from_t0", chain_a_to_b_from_t0(theta, t0, a));
        rep.put("b_with_ctheta", chain_a_to_b_with_ctheta(theta, t0, a));
    } else {
        throw ConfigError("chain: unknown direction " + dir);
    }
    rep.verdict = Verdict::Pass;
    em.block(rep.to_text());
    return 0;
}

}  // namespace

bool run_selftest(std::ostream& out, uint64_t seed) {
    using Clock = std::chrono::steady_clock;
    auto t_start = Clock::now();
    bool all_ok = true;
    auto item = [&](const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "[ok]  " : "[FAIL] ") << name << ": " << detail << "\n";
        all_ok = all_ok && ok;
    };

    CostFunction theta = make_quadratic_cost(1.0, CostRole::Theta);
    CostFunction H = make_quadratic_cost(1.0, CostRole::H);

    // end-to-end chain on the discretized standard gaussian
    Measure1D gauss = Measure1D::gaussian(0.0, 1.0);
    Measure1D gauss_fine = gauss.discretize(10000);
    CriterionResult crit = criterion_check(gauss_fine, theta, 1.0);
    item("criterion(gaussian n=1e4)", crit.report.verdict == Verdict::Pass,
         "b_best=" + format_double(crit.b_best));

    double c = chain_b_to_c(theta, 1.0, crit.b_best);
    auto fns = generate_tests(family_for(gauss_fine, seed, 200, 1.0));
    InequalityReport lsi = lsi_test(gauss_fine, H, c, fns);
    item("lsi(chained c)", lsi.passed(),
         "c=" + format_double(c) + " worst_ratio=" + format_double(lsi.worst_ratio));

    double a = chain_c_to_a(c, 1.0, 2.0);
    InequalityReport dic = dual_ic_test(gauss_fine, scaled_cost(theta, a), 1.0, DualIcMode::Minus, fns);
    item("dual-ic(minus, chained a)", dic.passed(),
         "a=" + format_double(a) + " worst_product=" + format_double(dic.worst_ratio));

    InequalityReport poin = convex_poincare_test(gauss_fine, a, fns);
    item("poincare(chained a)", poin.passed(), "worst_ratio=" + format_double(poin.worst_ratio));

    Measure1D gauss32 = gauss.discretize(32);
    WeakVerifyResult wv =
        weak_transport_verify(gauss32, WeakDirection::Minus, theta, a, 100, seed);
    item("weak-transport(minus, 100 tilts)", wv.report.passed(),
         "worst_excess=" + format_double(wv.report.extremal));

    // co-failure on the symmetric exponential measure
    Measure1D tau = Measure1D::symmetric_exponential();
    CriterionResult crit_tau = criterion_check(tau, theta, 1.0);
    item("criterion(tau) expected-nonpass", crit_tau.report.verdict != Verdict::Pass,
         "verdict=" + to_string(crit_tau.report.verdict));
    Measure1D tau_disc = tau.discretize(2000);
    auto fns_tau = generate_tests(family_for(tau_disc, seed, 60, 1.0));
    InequalityReport lsi_tau = lsi_test(tau_disc, H, 1.0, fns_tau);
    item("lsi(tau) expected-fail", !lsi_tau.passed(),
         "worst_ratio=" + format_double(lsi_tau.worst_ratio));

    // quick invariants
    double cth = c_theta(theta);
    double log2 = std::log(2.0);
    double cth_closed = 4.0 + 4.0 / log2 + 2.0 / (log2 * log2);
    item("c_theta(quadratic)", std::abs(cth - cth_closed) <= 1e-6 * cth_closed,
         format_double(cth));

    GridFunction phi = make_abs(0.5, -1.0, 2.0);
    Report maurey = maurey_bound_check(phi, 1.0, Measure1D::uniform(0.0, 1.0));
    item("maurey-envelope", maurey.passed(), "excess=" + format_double(maurey.extremal));

    double secs = std::chrono::duration<double>(Clock::now() - t_start).count();
    out << (all_ok ? "selftest: pass" : "selftest: FAIL") << " (" << format_double(secs)
        << " s)\n";
    return all_ok;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        Parsed p = parse_args(args);
        Emitter em{out, flag_str(p, "out", "")};
        if (!em.out_dir.empty()) {
            std::filesystem::create_directories(em.out_dir);
            std::ofstream clear(em.out_dir + "/report.txt", std::ios::trunc);
        }
        if (p.subcommand == "check-criterion") return cmd_check_criterion(p, em);
        if (p.subcommand == "lsi-test") return cmd_lsi_test(p, em);
        if (p.subcommand == "dual-ic") return cmd_dual_ic(p, em);
        if (p.subcommand == "poincare") return cmd_poincare(p, em);
        if (p.subcommand == "infconv") return cmd_infconv(p, em);
        if (p.subcommand == "weak-ot") return cmd_weak_ot(p, em);
        if (p.subcommand == "concentration") return cmd_concentration(p, em);
        if (p.subcommand == "chain") return cmd_chain(p, em);
        if (p.subcommand == "selftest") {
            bool ok = run_selftest(out, flag_u64(p, "seed", 1));
            return ok ? 0 : 1;
        }
        throw ConfigError("unknown subcommand: " + p.subcommand);
    } catch (const DivergenceError& e) {
        err << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const EdgeAttainedError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace clsi
