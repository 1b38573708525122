// Test-only oracles, independent of the library implementation paths they
// check: plain adaptive Simpson quadrature, a quadrature-based normal CDF
// with bisection inverse, Gauss-Laguerre nodes, and a nested-grid brute
// force for small weak-transport instances.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (!(a < b)) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// quadrature CDF: integrate the density from 0 (the half below is 1/2)
inline double normal_cdf(double x) {
    if (x < 0.0) return 0.5 - integrate(normal_pdf, x, 0.0);
    return 0.5 + integrate(normal_pdf, 0.0, x);
}

// bisection on the quadrature CDF
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile oracle");
    double lo = -12.0, hi = 12.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Gauss-Laguerre nodes/weights by Newton iteration on the recurrence.
struct GaussLaguerre {
    std::vector<double> x, w;
    explicit GaussLaguerre(int n) : x(static_cast<size_t>(n)), w(static_cast<size_t>(n)) {
        for (int i = 0; i < n; ++i) {
            double z;
            if (i == 0) z = 3.0 / (1.0 + 2.4 * n);
            else if (i == 1) z = x[0] + 15.0 / (1.0 + 2.5 * n);
            else z = x[static_cast<size_t>(i - 1)] +
                     (1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1)) *
                         (x[static_cast<size_t>(i - 1)] - x[static_cast<size_t>(i - 2)]);
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 1; j <= n; ++j) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
                }
                pp = n * (p1 - p2) / z;
                double dz = p1 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15 * std::max(1.0, z)) break;
            }
            x[static_cast<size_t>(i)] = z;
            // weight via the derivative relation
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
            }
            w[static_cast<size_t>(i)] = -1.0 / (pp * n * p2);
        }
    }
    // integral over (0, inf) of g(t) e^{-t} dt
    double integrate(const std::function<double(double)>& g) const {
        double acc = 0.0;
        for (size_t i = 0; i < x.size(); ++i) acc += w[i] * g(x[i]);
        return acc;
    }
};

// Brute-force weak barycentric transport on small instances: nested grid
// refinement over the free block of the transportation polytope, walking
// feasible intervals dimension by dimension.
struct WeakOtBrute {
    std::vector<double> x, mu;  // source (rows)
    std::vector<double> y, nu;  // target (columns)

    double objective(const std::vector<double>& z,
                     const std::function<double(double)>& theta) const {
        size_t n = mu.size(), m = nu.size();
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double bary = 0.0;
            for (size_t j = 0; j < m; ++j) bary += y[j] * z[i * m + j];
            bary /= mu[i];
            acc += mu[i] * theta(std::abs(x[i] - bary));
        }
        return acc;
    }

    // enumerate the free (n-1)x(m-1) block on a grid of k points per
    // feasible interval; returns the best mass matrix found
    void enumerate(std::vector<double>& z, std::vector<double>& row_left,
                   std::vector<double>& col_left, size_t i, size_t j, int k,
                   const std::function<double(double)>& theta, double& best,
                   std::vector<double>& best_z, const std::vector<double>* center,
                   double shrink) const {
        size_t n = mu.size(), m = nu.size();
        if (i == n - 1) {
            // bottom row and last column are determined
            bool ok = true;
            for (size_t jj = 0; jj + 1 < m && ok; ++jj) {
                double v = col_left[jj];
                z[(n - 1) * m + jj] = v;
                if (v < -1e-12) ok = false;
            }
            if (ok) {
                double acc = 0.0;
                for (size_t jj = 0; jj + 1 < m; ++jj) acc += z[(n - 1) * m + jj];
                double v = mu[n - 1] - acc;
                z[(n - 1) * m + (m - 1)] = v;
                if (v < -1e-12) ok = false;
            }
            for (size_t ii = 0; ii + 1 < n && ok; ++ii) {
                if (row_left[ii] < -1e-12) ok = false;
                z[ii * m + (m - 1)] = row_left[ii];
            }
            if (!ok) return;
            double val = objective(z, theta);
            if (val < best) {
                best = val;
                best_z = z;
            }
            return;
        }
        if (j == m - 1) {
            enumerate(z, row_left, col_left, i + 1, 0, k, theta, best, best_z, center, shrink);
            return;
        }
        double hi = std::min(row_left[i], col_left[j]);
        if (hi < -1e-12) return;
        hi = std::max(hi, 0.0);
        double lo = 0.0;
        for (int s = 0; s <= k; ++s) {
            double v = lo + (hi - lo) * s / k;
            if (center) {
                double c = (*center)[i * nu.size() + j];
                double half = shrink * (hi - lo) * 0.5;
                double a = std::max(lo, c - half), b = std::min(hi, c + half);
                v = a + (b - a) * s / k;
            }
            z[i * nu.size() + j] = v;
            row_left[i] -= v;
            col_left[j] -= v;
            enumerate(z, row_left, col_left, i, j + 1, k, theta, best, best_z, center, shrink);
            row_left[i] += v;
            col_left[j] += v;
        }
    }

    double solve(const std::function<double(double)>& theta, int k = 10, int rounds = 6) const {
        size_t n = mu.size(), m = nu.size();
        std::vector<double> z(n * m, 0.0), best_z;
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> row_left(mu.begin(), mu.end());
        std::vector<double> col_left(nu.begin(), nu.end());
        enumerate(z, row_left, col_left, 0, 0, k, theta, best, best_z, nullptr, 1.0);
        double shrink = 1.0;
        for (int r = 1; r < rounds; ++r) {
            shrink *= 2.5 / k;
            std::vector<double> center = best_z;
            enumerate(z, row_left, col_left, 0, 0, k, theta, best, best_z, &center, shrink);
        }
        return best;
    }
};

}  // namespace oracle
