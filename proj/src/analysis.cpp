#include "asode/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "asode/errors.hpp"

namespace asode {

namespace {

constexpr double kPoleGuard = 1e-12;

Complex stage_denominator(Complex z, double a) {
    const Complex d = 1.0 - a * z;
    if (!(std::abs(d) > kPoleGuard)) {
        std::ostringstream msg;
        msg << "stability function evaluated at the pole z = 1/a (z=" << z << ")";
        throw PoleProximity(msg.str());
    }
    return d;
}

}  // namespace

Complex eval_R(Complex x, Complex z, const SchemeCoefficients& c) {
    const Complex d = stage_denominator(z, c.a);
    const Complex k1 = x;
    const Complex k2 = (x + z) / d;
    const Complex k3 = k2 / d;
    const Complex phi4 = 1.0 + c.beta4[0] * k1 + c.beta4[1] * k2 + c.beta4[2] * k3;
    const Complex g4 = 1.0 + c.alpha4[0] * k1 + c.alpha4[1] * k2 + c.alpha4[2] * k3;
    const Complex k4 = (x * phi4 + z * g4) / d;
    const Complex k5 = (k4 + c.gamma * k3) / d;
    const Complex phi6 = 1.0 + c.beta6[0] * k1 + c.beta6[1] * k2 + c.beta6[2] * k3 +
                         c.beta6[3] * k4 + c.beta6[4] * k5;
    const Complex k6 = x * phi6;
    return 1.0 + c.p[0] * k1 + c.p[1] * k2 + c.p[2] * k3 + c.p[3] * k4 + c.p[4] * k5 + c.p[5] * k6;
}

Complex eval_R2(Complex x, Complex z, const SchemeCoefficients& c, const EmbeddedCoefficients& e) {
    const Complex d = stage_denominator(z, c.a);
    const double a = c.a;
    const double b4 = c.aux[3];
    const auto [r1, r2, r3, r4, r5] = e.r;
    (void)r1;
    const double a2 = a * a;
    const double a3 = a2 * a;
    const Complex x2 = x * x;
    const Complex z2 = z * z;
    const Complex z3 = z2 * z;
    const Complex z4 = z3 * z;

    const Complex num =
        a3 * (a - r2) * z4 - a3 * (r2 - r4) * x * z3 -
        a * (4.0 * a2 - a * (3.0 * r2 + r3 + 2.0 * r4) + r4) * z3 + a3 * r4 * x2 * z2 +
        a * (a * (3.0 * r2 + r3 + r4 - r5) - r4 * (b4 + 1.0)) * x * z2 +
        (6.0 * a2 - a * (3.0 * r2 + 2.0 * r3 + 3.0 * r4 + 2.0 * r5) + r4 + r5) * z2 -
        a * (a * (r4 + r5) + r4 * b4) * x2 * z +
        (-a * (3.0 * r2 + 2.0 * r3 + 3.0 * r4 + 2.0 * r5) + (r4 + r5) * (b4 + 1.0)) * x * z +
        (-4.0 * a + r2 + r3 + r4 + r5) * z + b4 * (r4 + r5) * x2 + (r2 + r3 + r4 + r5) * x + 1.0;
    const Complex d2 = d * d;
    return num / (d2 * d2);
}

StabilityScan stability_region_scan(std::span<const Complex> x_grid, std::span<const Complex> z_grid,
                                    StabilityTarget which, const SchemeCoefficients& c,
                                    const EmbeddedCoefficients& e) {
    StabilityScan out;
    out.x_grid.assign(x_grid.begin(), x_grid.end());
    out.z_grid.assign(z_grid.begin(), z_grid.end());
    out.magnitude.reserve(x_grid.size() * z_grid.size());
    for (const Complex z : z_grid) {
        for (const Complex x : x_grid) {
            double m = std::numeric_limits<double>::infinity();
            try {
                m = std::abs(which == StabilityTarget::Main ? eval_R(x, z, c) : eval_R2(x, z, c, e));
            } catch (const PoleProximity&) {
            }
            out.magnitude.push_back(m);
        }
    }
    return out;
}

}  // namespace asode
