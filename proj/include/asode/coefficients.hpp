#pragma once

// Coefficients of the six-stage third-order additive scheme and of its
// second-order embedded companion. Every constant is a function of the
// single free parameter a (the diagonal of D_n = E - a h B).
//
//   y_{n+1} = y_n + sum_{i=1..6} p_i k_i
//   k1          = h phi(y_n)
//   D k2        = h [phi(y_n) + g(y_n)]
//   D k3        = k2
//   D k4        = h phi(y_n + sum beta4_j k_j) + h g(y_n + sum alpha4_j k_j)
//   D k5        = k4 + gamma k3
//   k6          = h phi(y_n + sum beta6_j k_j)
//
//   embedded:  y_{n+1,2} = y_n + sum_{i=1..4} r_i k_i + r5 k5~,  D k5~ = k4

#include <array>
#include <string>
#include <vector>

namespace asode {

/// The root of the design quartic used by default. Kept as a literal so the
/// production coefficients do not depend on a root finder.
inline constexpr double kDefaultA = 0.57281606248213;

struct SchemeCoefficients {
    double a = 0.0;
    std::array<double, 6> p{};      // p1..p6
    std::array<double, 3> alpha4{}; // alpha41..alpha43
    std::array<double, 3> beta4{};  // beta41..beta43
    std::array<double, 5> beta6{};  // beta61..beta65
    double gamma = 0.0;
    // beta1 = beta64 + beta65, beta2 = beta63 + beta64 + (gamma+1) beta65,
    // beta3 = a (2 beta63 + beta64 + (3 gamma + 2) beta65) + beta64 + beta65,
    // beta4 = a + beta43.
    std::array<double, 4> aux{};
};

struct EmbeddedCoefficients {
    std::array<double, 5> r{};  // r1..r5
};

struct QuarticRoots {
    std::array<double, 4> roots{};  // ascending
};

struct Residual {
    std::string group;  // e.g. "order.3", "lstab.1"
    double value = 0.0; // left-hand side minus right-hand side
};

struct ResidualReport {
    std::vector<Residual> residuals;
    double max_abs = 0.0;

    [[nodiscard]] double value(const std::string& group) const;
};

/// Evaluates 24a^4 - 96a^3 + 72a^2 - 16a + 1.
[[nodiscard]] double design_quartic(double a) noexcept;

/// All four real roots of the design quartic (c1 = 0 condition).
/// Throws RootFindingFailure if the scan does not isolate exactly four roots.
[[nodiscard]] QuarticRoots solve_design_quartic();

/// Computes the full scheme from a, in the order of the closed-form chain:
/// gamma, p3, p4, p5, beta4, beta43, beta2, p6, p1, beta1, beta3, beta65,
/// beta63, beta64. Throws DegenerateParameter if a denominator vanishes.
[[nodiscard]] SchemeCoefficients derive_scheme(double a);

/// derive_scheme(kDefaultA).
[[nodiscard]] const SchemeCoefficients& default_scheme();

/// Residuals of the third-order conditions ("order.1".."order.9",
/// "order.10.*"), the two L-stability conditions ("lstab.1", "lstab.2") and
/// the simplifying assumptions ("assume.*").
[[nodiscard]] ResidualReport verify_order_conditions(const SchemeCoefficients& c);

/// r1..r5 of the L-stable second-order embedded method.
/// Throws DegenerateParameter when |a beta4| < 1e-14.
[[nodiscard]] EmbeddedCoefficients derive_embedded(const SchemeCoefficients& c);

/// Residuals of the four second-order conditions of the embedded method
/// ("embedded.1".."embedded.4") plus the L-stability condition r2 = a
/// ("embedded.lstab").
[[nodiscard]] ResidualReport verify_embedded_conditions(const SchemeCoefficients& c,
                                                        const EmbeddedCoefficients& e);

}  // namespace asode
