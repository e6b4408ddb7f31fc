#pragma once

// Independent reference computations used by the tests. None of these call
// into the library; they are written from the defining formulas directly.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asode/coefficients.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;
using Cx = std::complex<double>;

// Gaussian elimination with complete pivoting.
inline Vec full_pivot_solve(Mat a, Vec b) {
    const std::size_t n = b.size();
    std::vector<std::size_t> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        double best = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            for (std::size_t j = k; j < n; ++j) {
                if (std::abs(a[i][j]) > best) {
                    best = std::abs(a[i][j]);
                    pr = i;
                    pc = j;
                }
            }
        }
        if (best == 0.0) throw std::runtime_error("oracle: singular");
        std::swap(a[k], a[pr]);
        std::swap(b[k], b[pr]);
        for (auto& row : a) std::swap(row[k], row[pc]);
        std::swap(col[k], col[pc]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    Vec z(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * z[j];
        z[i] = s / a[i][i];
    }
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[col[i]] = z[i];
    return x;
}

// One step with y0 = 1, h = 1 on y' = x y + z y, B = z: main and embedded
// results side by side.
struct ScalarStep {
    Cx main;
    Cx embedded;
};

inline ScalarStep scalar_step(Cx x, Cx z, const asode::SchemeCoefficients& c,
                              const asode::EmbeddedCoefficients& e) {
    const Cx d = 1.0 - c.a * z;
    const Cx k1 = x;
    const Cx k2 = (x + z) / d;
    const Cx k3 = k2 / d;
    const Cx phi_arg = 1.0 + c.beta4[0] * k1 + c.beta4[1] * k2 + c.beta4[2] * k3;
    const Cx g_arg = 1.0 + c.alpha4[0] * k1 + c.alpha4[1] * k2 + c.alpha4[2] * k3;
    const Cx k4 = (x * phi_arg + z * g_arg) / d;
    const Cx k5 = (k4 + c.gamma * k3) / d;
    const Cx k6 = x * (1.0 + c.beta6[0] * k1 + c.beta6[1] * k2 + c.beta6[2] * k3 +
                       c.beta6[3] * k4 + c.beta6[4] * k5);
    const Cx k5e = k4 / d;
    ScalarStep s;
    s.main = 1.0 + c.p[0] * k1 + c.p[1] * k2 + c.p[2] * k3 + c.p[3] * k4 + c.p[4] * k5 +
             c.p[5] * k6;
    s.embedded = 1.0 + e.r[0] * k1 + e.r[1] * k2 + e.r[2] * k3 + e.r[3] * k4 + e.r[4] * k5e;
    return s;
}

// Right-hand sides of the four chemistry benchmarks, typed in from the
// model equations.
inline Vec example_rhs(int which, const Vec& y) {
    switch (which) {
        case 1: {
            const double y1 = y[0], y2 = y[1], y3 = y[2];
            return {-0.013 * y1 - 1000.0 * y1 * y3, -2500.0 * y2 * y3,
                    -0.013 * y1 - 1000.0 * y1 * y3 - 2500.0 * y2 * y3};
        }
        case 2: {
            const double y1 = y[0], y2 = y[1], y3 = y[2];
            return {77.27 * (y2 - y1 * y2 + y1 - 8.375e-6 * y1 * y1),
                    (-y2 - y1 * y2 + y3) / 77.27, 0.161 * (y1 - y3)};
        }
        case 3: {
            const double y1 = y[0], y2 = y[1], y3 = y[2];
            return {-0.04 * y1 + 0.01 * y2 * y3, 400.0 * y1 - 100.0 * y2 * y3 - 3000.0 * y2 * y2,
                    30.0 * y2 * y2};
        }
        case 4: {
            const double y1 = y[0], y2 = y[1], y3 = y[2], y4 = y[3];
            return {y3 - 100.0 * y1 * y2, y3 + 2.0 * y4 - 100.0 * y1 * y2 - 2e4 * y2 * y2,
                    -y3 + 100.0 * y1 * y2, -y4 + 1e4 * y2 * y2};
        }
        default:
            throw std::invalid_argument("oracle: no example " + std::to_string(which));
    }
}

// Least-squares slope of log(err) against log(h).
inline double loglog_slope(const Vec& h, const Vec& err) {
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(h[i]), ly = std::log(err[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20261015);
    return gen;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

}  // namespace oracle
