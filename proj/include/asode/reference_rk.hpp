#pragma once

// Classical explicit embedded Runge-Kutta pairs used as baselines: Merson's
// 5-stage order-4 method and Fehlberg's 6-stage order-5 pair. Both propagate
// the higher-order solution.

#include <string>
#include <string_view>
#include <vector>

#include "asode/problem.hpp"
#include "asode/stepper.hpp"
#include "asode/types.hpp"

namespace asode {

struct ExplicitTableau {
    std::string name;
    std::vector<double> c;
    std::vector<std::vector<double>> a;  // strictly lower triangular, row i has i entries
    std::vector<double> b;               // propagated weights
    std::vector<double> b_hat;           // embedded weights
    int order = 0;
    int embedded_order = 0;

    [[nodiscard]] std::size_t stages() const noexcept { return b.size(); }
};

[[nodiscard]] const ExplicitTableau& merson_tableau();
[[nodiscard]] const ExplicitTableau& fehlberg_tableau();

/// Throws UnknownProblem-style InvalidArgument for names other than
/// "merson" and "rkf45".
[[nodiscard]] const ExplicitTableau& tableau_by_name(std::string_view name);

struct TableauCheck {
    double max_row_sum_residual = 0.0;
    double max_order_residual = 0.0;           // conditions up to `order` for b
    double max_embedded_order_residual = 0.0;  // conditions up to `embedded_order` for b_hat
    int conditions_checked = 0;

    [[nodiscard]] bool ok(double tol = 1e-13) const {
        return max_row_sum_residual <= tol && max_order_residual <= tol &&
               max_embedded_order_residual <= tol;
    }
};

/// Row sums and all rooted-tree order conditions.
[[nodiscard]] TableauCheck verify_tableau(const ExplicitTableau& t);

/// Number of rooted trees with exactly `order` nodes.
[[nodiscard]] int rooted_tree_count(int order);

struct RkStepResult {
    Vector y_next;
    Vector error_estimate;  // h * sum (b_i - b_hat_i) k_i
};

/// One explicit step on y' = f(y). Throws NonFiniteState.
[[nodiscard]] RkStepResult rk_step(const ExplicitTableau& t, const RhsFn& f, std::span<const double> y,
                                   double h);

/// R(z) = 1 + z b^T (I - zA)^-1 e for real z.
[[nodiscard]] double stability_polynomial(const ExplicitTableau& t, double z);

/// Length of the negative real interval [-L, 0] on which |R| <= 1.
/// Throws InvalidArgument if |R| stays bounded by 1 out to -100.
[[nodiscard]] double real_stability_interval(const ExplicitTableau& t);

struct RkConfig {
    double safety = 0.9;
    double fac_min = 0.2;
    double fac_max = 1.5;
    double h_min = 1e-14;
    int max_rejects_per_step = 50;
    // Caps the next step by safety * interval / v, where v estimates
    // h |lambda_max| from the first three stages at no extra cost.
    bool stability_control = true;
};

/// Adaptive integration of the full right-hand side of `problem` with the
/// same error norm as the additive solver and
/// h_new = safety h err^(-1/(embedded_order+1)), limited to
/// [fac_min, fac_max] h and, with stability control, to
/// safety * real_stability_interval / v. Each step costs `stages`
/// evaluations of f, counted as one phi and one g evaluation each.
/// Throws StepsizeUnderflow, MaxRejectsExceeded, NonFiniteState.
[[nodiscard]] IntegrationResult rk_integrate(const ExplicitTableau& t, const SplitProblem& problem,
                                             const Tolerances& tol, const RkConfig& cfg = {},
                                             const StepObserver& observer = {});

/// Fixed-step run with `steps` uniform steps.
[[nodiscard]] IntegrationResult rk_integrate_fixed(const ExplicitTableau& t, const SplitProblem& problem,
                                                   std::size_t steps);

}  // namespace asode
