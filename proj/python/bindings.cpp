#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "clsi/cli.hpp"
#include "clsi/concentration.hpp"
#include "clsi/inequalities.hpp"
#include "clsi/infconv.hpp"
#include "clsi/transport_map.hpp"
#include "clsi/weak_ot.hpp"

namespace py = pybind11;
using namespace clsi;

namespace {

py::dict report_to_dict(const Report& r) {
    py::dict d;
    d["check"] = r.check;
    d["verdict"] = to_string(r.verdict);
    d["extremal"] = r.extremal;
    d["witness"] = r.witness;
    d["note"] = r.note;
    py::dict params;
    for (const auto& kv : r.params) params[py::str(kv.key)] = kv.value;
    d["params"] = params;
    return d;
}

py::dict ineq_to_dict(const InequalityReport& r) {
    py::dict d;
    d["check"] = r.check;
    d["verdict"] = to_string(r.verdict);
    d["worst_ratio"] = r.worst_ratio;
    d["worst_witness"] = r.worst_witness;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["ratios"] = r.ratios;
    d["labels"] = r.labels;
    d["caveat"] = r.caveat;
    return d;
}

CostFunction cost_from_spec(const std::string& kind, double param, double scale) {
    CostFunction c;
    if (kind == "quadratic-h") c = make_quadratic_cost(param, CostRole::H);
    else if (kind == "quadratic-theta") c = make_quadratic_cost(param, CostRole::Theta);
    else if (kind == "hp") c = make_hp_cost(param);
    else if (kind == "hp-conjugate") c = make_hp_cost(param).closed_conjugate();
    else if (kind == "thetaD") c = make_theta_d(param);
    else throw ConfigError("unknown cost kind: " + kind);
    if (scale != 1.0) c = scaled_cost(c, scale);
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Numerical toolkit for convex log-Sobolev inequalities on the real line";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DivergenceError>(m, "DivergenceError");
    py::register_exception<EdgeAttainedError>(m, "EdgeAttainedError");

    py::class_<Measure1D>(m, "Measure1D")
        .def_static("atoms", &Measure1D::atoms, py::arg("positions"), py::arg("weights"))
        .def_static("grid_cdf", &Measure1D::grid_cdf, py::arg("nodes"), py::arg("cdf"))
        .def_static("symmetric_exponential", &Measure1D::symmetric_exponential)
        .def_static("gaussian", &Measure1D::gaussian, py::arg("mean"), py::arg("sigma"))
        .def_static("uniform", &Measure1D::uniform, py::arg("a"), py::arg("b"))
        .def_static("two_point", &Measure1D::two_point, py::arg("x0"), py::arg("x1"),
                    py::arg("w0") = 0.5)
        .def("cdf", &Measure1D::cdf)
        .def("quantile", &Measure1D::quantile)
        .def("median", &Measure1D::median)
        .def("support", [](const Measure1D& mu) {
            return py::make_tuple(mu.support_lo(), mu.support_hi());
        })
        .def("exp_moment", &Measure1D::exp_moment)
        .def("discretize", &Measure1D::discretize)
        .def("mean", &Measure1D::mean)
        .def("variance", &Measure1D::variance)
        .def("scaled", &Measure1D::scaled)
        .def("is_atomic", &Measure1D::is_atomic)
        .def("positions", [](const Measure1D& mu) {
            auto s = mu.positions();
            return std::vector<double>(s.begin(), s.end());
        })
        .def("weights", [](const Measure1D& mu) {
            auto s = mu.weights();
            return std::vector<double>(s.begin(), s.end());
        })
        .def("__repr__", &Measure1D::describe);

    py::class_<CostFunction>(m, "CostFunction")
        .def("__call__", &CostFunction::operator())
        .def("derivative", &CostFunction::derivative)
        .def("t0", &CostFunction::t0)
        .def("conjugate", &CostFunction::closed_conjugate)
        .def("__repr__", &CostFunction::describe);
    m.def("cost", &cost_from_spec, py::arg("kind"), py::arg("param") = 1.0,
          py::arg("scale") = 1.0,
          "Cost factory: quadratic-h | quadratic-theta | hp | hp-conjugate | thetaD");
    m.def("theta_inverse", &theta_inverse);
    m.def("c_theta", &c_theta, py::arg("theta"), py::arg("rel_tol") = 1e-10);

    py::class_<GridFunction>(m, "GridFunction")
        .def(py::init([](std::vector<double> xs, std::vector<double> ys, bool plus_infinity) {
                 return GridFunction(std::move(xs), std::move(ys),
                                     plus_infinity ? Extension::PlusInfinity : Extension::Linear);
             }),
             py::arg("nodes"), py::arg("values"), py::arg("plus_infinity_extension") = false)
        .def("__call__", &GridFunction::operator())
        .def("nodes", [](const GridFunction& f) {
            return std::vector<double>(f.nodes().begin(), f.nodes().end());
        })
        .def("values", [](const GridFunction& f) {
            return std::vector<double>(f.values().begin(), f.values().end());
        });

    m.def("u_mu", &u_mu, py::arg("mu"), py::arg("x"),
          "Left-continuous monotone map sending the symmetric exponential onto mu");
    m.def("delta_mu", [](const Measure1D& mu, double h) { return delta_mu(mu, h); },
          py::arg("mu"), py::arg("h"), "Modulus of continuity (value, witness x)");
    m.def(
        "criterion_check",
        [](const Measure1D& mu, const CostFunction& theta, double t0) {
            CriterionResult r = criterion_check(mu, theta, t0);
            py::dict d = report_to_dict(r.report);
            d["b_best"] = r.b_best;
            d["h_at_best"] = r.h_at_best;
            d["h"] = r.curve.h;
            d["delta"] = r.curve.delta;
            d["ratio"] = r.ratios;
            return d;
        },
        py::arg("mu"), py::arg("theta"), py::arg("t0"));
    m.def("tail_decay_check", [](const Measure1D& mu, const CostFunction& theta, double t0,
                                 double b) { return report_to_dict(tail_decay_check(mu, theta, t0, b)); });
    m.def("tail_cost_bound", [](const Measure1D& mu, const CostFunction& theta, double a) {
        return report_to_dict(tail_cost_bound(mu, theta, a));
    });
    m.def("linear_growth_bound", [](const Measure1D& mu, double a) {
        return report_to_dict(linear_growth_bound(mu, a));
    });

    m.def(
        "inf_convolution",
        [](const GridFunction& f, const CostFunction& theta, double t,
           std::vector<double> out_nodes, const std::string& engine) {
            InfConvEngine e = engine == "exhaustive"  ? InfConvEngine::Exhaustive
                              : engine == "fast"      ? InfConvEngine::FastQuadratic
                              : engine == "exact"     ? InfConvEngine::ExactPiecewiseLinear
                                                      : InfConvEngine::Auto;
            GridFunction q = inf_convolution(f, theta, t, out_nodes, e);
            return py::make_tuple(
                std::vector<double>(q.nodes().begin(), q.nodes().end()),
                std::vector<double>(q.values().begin(), q.values().end()));
        },
        py::arg("f"), py::arg("theta"), py::arg("t"), py::arg("out_nodes"),
        py::arg("engine") = "auto");
    m.def("maurey_k", &maurey_k);
    m.def("maurey_bound_check", [](const GridFunction& phi, double D, const Measure1D& mu) {
        return report_to_dict(maurey_bound_check(phi, D, mu));
    });

    m.def("entropy", &entropy, py::arg("mu"), py::arg("phi"));
    m.def("relative_entropy", &relative_entropy, py::arg("nu"), py::arg("mu"));
    m.def("classical_ot_1d", &classical_ot_1d);
    m.def(
        "lsi_test",
        [](const Measure1D& mu, const CostFunction& H, double c, int family_size, uint64_t seed) {
            auto fns = generate_tests(family_for(mu, seed, family_size, 1.0));
            return ineq_to_dict(lsi_test(mu, H, c, fns));
        },
        py::arg("mu"), py::arg("H"), py::arg("c"), py::arg("family_size") = 200,
        py::arg("seed") = 1);
    m.def(
        "convex_poincare_test",
        [](const Measure1D& mu, double a, int family_size, uint64_t seed) {
            auto fns = generate_tests(family_for(mu, seed, family_size, 1.0));
            return ineq_to_dict(convex_poincare_test(mu, a, fns));
        },
        py::arg("mu"), py::arg("a"), py::arg("family_size") = 200, py::arg("seed") = 1);
    m.def(
        "dual_ic_test",
        [](const Measure1D& mu, const CostFunction& theta, double t, const std::string& mode,
           int family_size, uint64_t seed) {
            DualIcMode md = mode == "minus"  ? DualIcMode::Minus
                            : mode == "plus" ? DualIcMode::Plus
                                             : DualIcMode::TwoSided;
            auto fns = generate_tests(family_for(mu, seed, family_size, 1.0));
            return ineq_to_dict(dual_ic_test(mu, theta, t, md, fns));
        },
        py::arg("mu"), py::arg("theta"), py::arg("t") = 1.0, py::arg("mode") = "minus",
        py::arg("family_size") = 200, py::arg("seed") = 1);

    m.def("chain_b_to_c", &chain_b_to_c);
    m.def("chain_delta_bound", &chain_delta_bound);
    m.def("chain_delta_bound_sharp", &chain_delta_bound_sharp);
    m.def("chain_c_to_a", &chain_c_to_a);
    m.def("chain_a_to_b_from_t0", &chain_a_to_b_from_t0);
    m.def("chain_a_to_b_with_ctheta", &chain_a_to_b_with_ctheta);

    m.def(
        "weak_ot_solve",
        [](const Measure1D& target, const Measure1D& source, const CostFunction& theta) {
            WeakOtResult r = weak_ot_solve(target, source, theta);
            py::dict d;
            d["value"] = r.value;
            d["iterations"] = r.iterations;
            d["gap"] = r.gap;
            d["barycenters"] = r.barycenters;
            d["kernel"] = r.kernel.p;
            d["rows"] = r.kernel.rows();
            d["cols"] = r.kernel.cols();
            return d;
        },
        py::arg("target"), py::arg("source"), py::arg("theta"),
        "Barycentric weak transport cost T(target | source)");
    m.def(
        "weak_transport_verify",
        [](const Measure1D& mu, const std::string& direction, const CostFunction& theta, double a,
           int n_samples, uint64_t seed) {
            WeakDirection d = direction == "plus" ? WeakDirection::Plus : WeakDirection::Minus;
            WeakVerifyResult r = weak_transport_verify(mu, d, theta, a, n_samples, seed);
            return report_to_dict(r.report);
        },
        py::arg("mu"), py::arg("direction"), py::arg("theta"), py::arg("a"),
        py::arg("n_samples") = 50, py::arg("seed") = 1);

    m.def(
        "simulate_tails",
        [](const Measure1D& base, int dim, int samples, uint64_t seed, const std::string& zoo) {
            ExperimentConfig cfg;
            cfg.base = base;
            cfg.dim = dim;
            cfg.samples = samples;
            cfg.seed = seed;
            TailTable t = simulate_tails(cfg, zoo_from_name(zoo));
            py::dict d;
            d["t"] = t.t;
            d["two_sided"] = t.two_sided;
            d["lower"] = t.lower;
            d["upper"] = t.upper;
            d["half_width"] = t.half_width;
            d["median"] = t.median;
            return d;
        },
        py::arg("base"), py::arg("dim"), py::arg("samples"), py::arg("seed"),
        py::arg("zoo") = "norm");
    m.def("fit_subgaussian", [](std::vector<double> t, std::vector<double> two_sided,
                                std::vector<double> half_width, int samples) {
        TailTable table;
        table.t = std::move(t);
        table.two_sided = std::move(two_sided);
        table.half_width = std::move(half_width);
        table.samples = samples;
        TailFit f = fit_subgaussian(table);
        py::dict d;
        d["A"] = f.A;
        d["B"] = f.B;
        d["residual"] = f.residual;
        d["degenerate"] = f.degenerate;
        d["envelope_ok"] = f.envelope_ok;
        d["points_used"] = f.points_used;
        return d;
    });

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });
    m.def("selftest", [](uint64_t seed) {
        std::ostringstream out;
        bool ok = run_selftest(out, seed);
        return py::make_tuple(ok, out.str());
    }, py::arg("seed") = 1);
}
