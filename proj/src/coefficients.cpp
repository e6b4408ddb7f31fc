#include "asode/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "asode/errors.hpp"

namespace asode {

namespace {

constexpr double kDenominatorGuard = 1e-14;

double checked(double denominator, const char* what, double a) {
    if (!(std::abs(denominator) >= kDenominatorGuard)) {
        std::ostringstream msg;
        msg << "degenerate free parameter a=" << a << ": denominator " << what
            << " = " << denominator;
        throw DegenerateParameter(msg.str());
    }
    return denominator;
}

double quartic_derivative(double a) noexcept {
    return ((96.0 * a - 288.0) * a + 144.0) * a - 16.0;
}

// Bisection to a tight bracket, then a few Newton steps from the midpoint.
double refine_root(double lo, double hi) {
    double flo = design_quartic(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = design_quartic(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double d = quartic_derivative(x);
        if (d == 0.0) break;
        const double next = x - design_quartic(x) / d;
        if (!(next >= lo && next <= hi)) break;
        x = next;
    }
    return x;
}

// NaN residuals count as infinitely bad.
void finalize(ResidualReport& rep) {
    rep.max_abs = 0.0;
    for (const auto& r : rep.residuals) {
        const double mag = std::isnan(r.value) ? std::numeric_limits<double>::infinity()
                                               : std::abs(r.value);
        rep.max_abs = std::max(rep.max_abs, mag);
    }
}

}  // namespace

double ResidualReport::value(const std::string& group) const {
    for (const auto& r : residuals) {
        if (r.group == group) return r.value;
    }
    throw InvalidArgument("no residual group named " + group);
}

double design_quartic(double a) noexcept {
    return (((24.0 * a - 96.0) * a + 72.0) * a - 16.0) * a + 1.0;
}

QuarticRoots solve_design_quartic() {
    constexpr double lo = -1.0;
    constexpr double hi = 4.0;
    constexpr int intervals = 5000;
    std::vector<double> found;
    double x0 = lo;
    double f0 = design_quartic(x0);
    for (int i = 1; i <= intervals; ++i) {
        const double x1 = lo + (hi - lo) * i / intervals;
        const double f1 = design_quartic(x1);
        if (f0 == 0.0) {
            found.push_back(x0);
        } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
            found.push_back(refine_root(x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    if (found.size() != 4) {
        std::ostringstream msg;
        msg << "design quartic: expected 4 real roots, isolated " << found.size();
        throw RootFindingFailure(msg.str());
    }
    QuarticRoots out;
    std::sort(found.begin(), found.end());
    std::copy(found.begin(), found.end(), out.roots.begin());
    return out;
}

SchemeCoefficients derive_scheme(double a) {
    if (!std::isfinite(a)) throw DegenerateParameter("free parameter a is not finite");
    checked(a, "a", a);
    checked(1.0 - a, "1-a", a);

    SchemeCoefficients c;
    c.a = a;
    const double a2 = a * a;
    const double a3 = a2 * a;

    const double den_gamma = checked(6.0 * a3 - 18.0 * a2 + 9.0 * a - 1.0, "6a^3-18a^2+9a-1", a);
    c.gamma = 2.0 * a * (a + 1.0) / den_gamma;
    const double p3 = (a2 - 4.0 * a / 3.0 + 1.0) / (1.0 - a);
    const double p4 = (6.0 * a3 - 20.0 * a2 + 11.0 * a - 1.0) / (6.0 * a - 6.0 * a2);
    const double p5 = den_gamma / (6.0 * a2 - 6.0 * a);

    const double b4 = (a - 1.0) / checked(6.0 * a3 - 16.0 * a2 + 7.0 * a - 1.0, "6a^3-16a^2+7a-1", a);
    checked(b4, "beta4", a);
    const double beta43 = b4 - a;
    const double b2 = (1.0 - b4 * b4) / checked(1.5 - b4, "1.5-beta4", a);
    const double p6 = (0.5 - b4 / 3.0) / checked(b2, "beta2", a);
    checked(p6, "p6", a);
    const double p1 = -p6;
    const double b1 = 1.0 / (6.0 * b4 * p6);
    const double b3 = (1.0 / 6.0 - a * (2.0 * b4 - a) / 3.0) / p6;
    const double beta65 = (a * (b1 - 2.0 * b2) + b3 - b1) / checked(a * c.gamma + a, "a(gamma+1)", a);
    const double beta63 = b2 - b1 - c.gamma * beta65;
    const double beta64 = b1 - beta65;

    c.p = {p1, a, p3, p4, p5, p6};
    c.alpha4 = {0.0, a, 1.0 - a};
    c.beta4 = {0.0, a, beta43};
    c.beta6 = {0.0, 0.0, beta63, beta64, beta65};
    c.aux = {b1, b2, b3, b4};
    return c;
}

const SchemeCoefficients& default_scheme() {
    static const SchemeCoefficients coeffs = derive_scheme(kDefaultA);
    return coeffs;
}

ResidualReport verify_order_conditions(const SchemeCoefficients& c) {
    const double a = c.a;
    const double g = c.gamma;
    const auto [p1, p2, p3, p4, p5, p6] = c.p;
    const auto [a41, a42, a43] = c.alpha4;
    const auto [b41, b42, b43] = c.beta4;
    const auto [b61, b62, b63, b64, b65] = c.beta6;

    const double sum_b4 = b41 + b42 + b43;
    const double sum_a4 = a41 + a42 + a43;
    const double sum_b6 = b61 + b62 + b63 + b64 + (g + 1.0) * b65;

    ResidualReport rep;
    auto add = [&rep](std::string name, double v) {
        rep.residuals.push_back({std::move(name), v});
    };

    add("order.1", p2 + p3 + p4 + (g + 1.0) * p5 - 1.0);
    add("order.2", sum_b4 * (p4 + p5) + sum_b6 * p6 - 0.5);
    add("order.3", a * (p2 + 2.0 * p3 + p4 + (3.0 * g + 2.0) * p5) + sum_a4 * (p4 + p5) - 0.5);
    add("order.4", sum_b4 * sum_b4 * (p4 + p5) + sum_b6 * sum_b6 * p6 - 1.0 / 3.0);
    add("order.5", sum_b4 * (b64 + b65) * p6 - 1.0 / 6.0);
    add("order.6",
        a * ((b42 + 2.0 * b43) * (p4 + p5) + (b62 + 2.0 * b63 + b64 + (3.0 * g + 2.0) * b65) * p6) +
            sum_a4 * (b64 + b65) * p6 - 1.0 / 6.0);
    add("order.7", sum_a4 * sum_a4 * (p4 + p5) - 1.0 / 3.0);
    add("order.8", a * sum_b4 * (p4 + 2.0 * p5) - 1.0 / 6.0);
    add("order.9",
        a * (a * (p2 + 3.0 * p3 + p4 + (6.0 * g + 3.0) * p5) + (a41 + 2.0 * a42 + 3.0 * a43) * p4 +
             (2.0 * a41 + 3.0 * a42 + 4.0 * a43) * p5) -
            1.0 / 6.0);
    add("order.10.alpha41", a41);
    add("order.10.beta41", b41);
    add("order.10.beta61", b61);
    add("order.10.p1+p6", p1 + p6);

    add("lstab.1", a * a * (p1 + p6) + ((a42 - a) * b64 - a * b62) * p6);
    add("lstab.2", a * (a - p2) + (a42 - a) * p4);

    add("assume.sum_alpha4", sum_a4 - 1.0);
    add("assume.alpha42", a42 - a);
    add("assume.beta42", b42 - a);
    add("assume.beta62", b62);

    // Reduced nine-equation system, with the auxiliaries rebuilt from the
    // stored stage coefficients rather than read from c.aux.
    const double beta1 = b64 + b65;
    const double beta2 = b63 + b64 + (g + 1.0) * b65;
    const double beta3 = a * (2.0 * b63 + b64 + (3.0 * g + 2.0) * b65) + b64 + b65;
    const double beta4 = a + b43;
    add("reduced.1", p2 + p3 + g * p5 - 2.0 / 3.0);
    add("reduced.2", a * beta4 * (p4 + 2.0 * p5) - 1.0 / 6.0);
    add("reduced.3", beta4 * beta1 * p6 - 1.0 / 6.0);
    add("reduced.4", beta4 / 3.0 + beta2 * p6 - 0.5);
    add("reduced.5", beta4 * beta4 / 3.0 + beta2 * beta2 * p6 - 1.0 / 3.0);
    add("reduced.6", a * (2.0 * beta4 - a) / 3.0 + beta3 * p6 - 1.0 / 6.0);
    add("reduced.7", p4 + p5 - 1.0 / 3.0);
    add("reduced.8", a * (p2 + 2.0 * p3 + p4 + (3.0 * g + 2.0) * p5) - 1.0 / 6.0);
    add("reduced.9",
        a * (a * (p2 + 3.0 * p3 + p4 + (6.0 * g + 3.0) * p5) + (3.0 - a) * p4 + (4.0 - a) * p5) -
            1.0 / 6.0);

    finalize(rep);
    return rep;
}

EmbeddedCoefficients derive_embedded(const SchemeCoefficients& c) {
    const double a = c.a;
    const double b4 = c.aux[3];
    const double ab4 = a * b4;
    if (!(std::abs(ab4) >= kDenominatorGuard)) {
        throw DegenerateParameter("embedded coefficients: a*beta4 vanishes");
    }
    EmbeddedCoefficients e;
    e.r[0] = 0.0;
    e.r[1] = a;
    e.r[2] = 1.0 - a - 0.5 / b4;
    e.r[3] = 0.5 * (1.0 - b4) / ab4 + 2.0 - a;
    e.r[4] = 0.5 * (a - 1.0 + b4) / ab4 - 2.0 + a;
    return e;
}

ResidualReport verify_embedded_conditions(const SchemeCoefficients& c,
                                          const EmbeddedCoefficients& e) {
    const double a = c.a;
    const double b4 = c.beta4[0] + c.beta4[1] + c.beta4[2];
    const auto [r1, r2, r3, r4, r5] = e.r;
    ResidualReport rep;
    rep.residuals = {
        {"embedded.1", r1 + r2 + r3 + r4 + r5 - 1.0},
        {"embedded.2", r2 + r3 + r4 + r5 - 1.0},
        {"embedded.3", b4 * (r4 + r5) - 0.5},
        {"embedded.4", a * (r2 + 2.0 * r3 + r4 + 2.0 * r5) + r4 + r5 - 0.5},
        {"embedded.lstab", r2 - a},
    };
    finalize(rep);
    return rep;
}

}  // namespace asode
