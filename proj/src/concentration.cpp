#include "clsi/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace clsi {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double eval_zoo(ZooFunction f, const std::vector<double>& x) {
    switch (f) {
        case ZooFunction::FirstCoordinate: return x[0];
        case ZooFunction::ScaledSum: {
            double s = 0.0;
            for (double v : x) s += v;
            return s / std::sqrt(static_cast<double>(x.size()));
        }
        case ZooFunction::EuclideanNorm: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return std::sqrt(s);
        }
        case ZooFunction::MaxCoordinate: {
            double m = x[0];
            for (double v : x) m = std::max(m, v);
            return m;
        }
        case ZooFunction::NegativeNorm: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return -std::sqrt(s);
        }
        case ZooFunction::Constant: return 1.0;
    }
    return 0.0;
}

// probe-based Lipschitz certificate: |phi(u)-phi(v)| <= |u-v| on seeded pairs
void certify_lipschitz(ZooFunction f, int dim, uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed ^ 0x5ca1ab1eULL));
    auto draw = [&](std::vector<double>& v) {
        for (double& e : v) {
            double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
            e = 8.0 * (u - 0.5);
        }
    };
    std::vector<double> u(static_cast<size_t>(dim)), v(static_cast<size_t>(dim));
    for (int k = 0; k < 64; ++k) {
        draw(u);
        draw(v);
        double dist2 = 0.0;
        for (int i = 0; i < dim; ++i) dist2 += (u[static_cast<size_t>(i)] - v[static_cast<size_t>(i)]) *
                                               (u[static_cast<size_t>(i)] - v[static_cast<size_t>(i)]);
        double gap = std::abs(eval_zoo(f, u) - eval_zoo(f, v));
        if (gap > std::sqrt(dist2) * (1.0 + 1e-9) + 1e-12)
            throw ConfigError("zoo function failed its Lipschitz certificate: " + zoo_name(f));
    }
}

}  // namespace

std::string zoo_name(ZooFunction f) {
    switch (f) {
        case ZooFunction::FirstCoordinate: return "linear";
        case ZooFunction::ScaledSum: return "scaled-sum";
        case ZooFunction::EuclideanNorm: return "norm";
        case ZooFunction::MaxCoordinate: return "max";
        case ZooFunction::NegativeNorm: return "neg-norm";
        case ZooFunction::Constant: return "constant";
    }
    return "unknown";
}

ZooFunction zoo_from_name(const std::string& name) {
    if (name == "linear") return ZooFunction::FirstCoordinate;
    if (name == "scaled-sum") return ZooFunction::ScaledSum;
    if (name == "norm") return ZooFunction::EuclideanNorm;
    if (name == "max") return ZooFunction::MaxCoordinate;
    if (name == "neg-norm") return ZooFunction::NegativeNorm;
    if (name == "constant") return ZooFunction::Constant;
    throw ConfigError("unknown zoo function: " + name);
}

std::vector<double> default_t_grid(int points, double t_max) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(points));
    for (int i = 1; i <= points; ++i) out.push_back(t_max * i / points);
    return out;
}

TailTable tails_from_values(std::vector<double> values, const std::vector<double>& t_grid) {
    TailTable table;
    table.t = t_grid;
    table.samples = static_cast<int>(values.size());
    std::sort(values.begin(), values.end());
    size_t M = values.size();
    double med = M % 2 == 1 ? values[M / 2] : 0.5 * (values[M / 2 - 1] + values[M / 2]);
    table.median = med;

    for (double t : t_grid) {
        // counts via binary search in the sorted sample
        auto up = values.end() - std::lower_bound(values.begin(), values.end(), med + t);
        auto lo = std::upper_bound(values.begin(), values.end(), med - t) - values.begin();
        double pu = static_cast<double>(up) / static_cast<double>(M);
        double pl = static_cast<double>(lo) / static_cast<double>(M);
        double p2 = pu + pl;
        table.upper.push_back(pu);
        table.lower.push_back(pl);
        table.two_sided.push_back(p2);
        double hw = 1.96 * std::sqrt(std::max(p2 * (1.0 - p2), 0.0) / static_cast<double>(M)) +
                    1.0 / static_cast<double>(M);
        table.half_width.push_back(hw);
    }
    return table;
}

TailTable simulate_tails(const ExperimentConfig& cfg, ZooFunction zoo) {
    if (cfg.samples < 10000)
        throw ConfigError("simulate_tails: need at least 1e4 samples for tail estimates");
    if (cfg.dim < 1) throw ConfigError("simulate_tails: dimension must be >= 1");
    certify_lipschitz(zoo, cfg.dim, cfg.seed);

    std::vector<double> t_grid = cfg.t_grid.empty() ? default_t_grid() : cfg.t_grid;
    std::vector<double> values(static_cast<size_t>(cfg.samples));
    std::vector<double> x(static_cast<size_t>(cfg.dim));
    for (int r = 0; r < cfg.samples; ++r) {
        std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (r + 1))));
        for (int i = 0; i < cfg.dim; ++i) x[static_cast<size_t>(i)] = cfg.base.sample(rng);
        values[static_cast<size_t>(r)] = eval_zoo(zoo, x);
    }
    return tails_from_values(std::move(values), t_grid);
}

TailFit fit_subgaussian(const TailTable& tails) {
    TailFit fit;
    double M = tails.samples;
    // reliable range: enough mass for a stable log, and genuinely in the tail
    std::vector<double> us, ys;
    for (size_t i = 0; i < tails.t.size(); ++i) {
        double p = tails.two_sided[i];
        if (p >= 10.0 / M && p <= 0.5) {
            us.push_back(tails.t[i] * tails.t[i]);
            ys.push_back(std::log(p));
        }
    }
    fit.points_used = static_cast<int>(us.size());
    if (us.size() < 4) {
        fit.degenerate = true;
        return fit;
    }
    double n = static_cast<double>(us.size());
    double su = 0.0, sy = 0.0, suu = 0.0, suy = 0.0;
    for (size_t i = 0; i < us.size(); ++i) {
        su += us[i];
        sy += ys[i];
        suu += us[i] * us[i];
        suy += us[i] * ys[i];
    }
    double denom = n * suu - su * su;
    if (!(std::abs(denom) > 0.0)) {
        fit.degenerate = true;
        return fit;
    }
    double slope = (n * suy - su * sy) / denom;
    double intercept = (sy - slope * su) / n;
    if (!(slope < 0.0)) {
        fit.degenerate = true;
        return fit;
    }
    fit.A = -1.0 / slope;
    fit.B = std::max(std::exp(intercept), 1.0);
    double rss = 0.0;
    for (size_t i = 0; i < us.size(); ++i) {
        double pred = intercept + slope * us[i];
        rss += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.residual = std::sqrt(rss / n);

    fit.envelope_ok = true;
    for (size_t i = 0; i < tails.t.size(); ++i) {
        double cap = fit.B * std::exp(-tails.t[i] * tails.t[i] / fit.A) + tails.half_width[i];
        if (tails.two_sided[i] > cap) fit.envelope_ok = false;
    }
    return fit;
}

}  // namespace clsi
