#pragma once

// One attempted step of the six-stage additive scheme with its embedded
// second-order estimate, the explicit-part stability probe, stepsize
// selection and the adaptive driver loop.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>

#include "asode/coefficients.hpp"
#include "asode/linalg.hpp"
#include "asode/problem.hpp"
#include "asode/types.hpp"

namespace asode {

/// Main scheme plus its embedded companion.
struct AdditiveMethod {
    SchemeCoefficients scheme;
    EmbeddedCoefficients embedded;

    /// Coefficients for the default free parameter.
    [[nodiscard]] static const AdditiveMethod& standard();
    [[nodiscard]] static AdditiveMethod from_parameter(double a);
};

struct ControllerConfig {
    bool stability_control = true;
    double safety = 0.9;
    double h_min = 1e-14;
    double h_max = std::numeric_limits<double>::infinity();
    int max_rejects_per_step = 20;
    // Probe coefficients; alpha21 must equal alpha31 + alpha32.
    double alpha21 = 0.5;
    double alpha31 = 0.25;
    double alpha32 = 0.25;

    void validate() const;
};

struct RunStatistics {
    std::uint64_t phi_evals = 0;
    std::uint64_t g_evals = 0;
    std::uint64_t jacobian_evals = 0;
    std::uint64_t factorizations = 0;
    std::uint64_t linear_solves = 0;
    std::uint64_t steps_accepted = 0;
    std::uint64_t steps_rejected = 0;

    /// max(phi_evals, g_evals): one full right-hand-side evaluation supplies
    /// both terms, so this is the comparable cost against explicit methods.
    [[nodiscard]] std::uint64_t rhs_evals() const noexcept {
        return phi_evals > g_evals ? phi_evals : g_evals;
    }
    [[nodiscard]] std::uint64_t attempts() const noexcept { return steps_accepted + steps_rejected; }

    RunStatistics& operator+=(const RunStatistics& o) noexcept;
};

enum class StepFailure { None, ErrorTooLarge, SingularMatrix, NonFiniteState };

struct StepReport {
    bool accepted = false;
    double err = 0.0;
    std::optional<double> v;  // present when stability control ran
    double h_used = 0.0;
    double h_next = 0.0;      // proposal for the next step, or the retry size
    StepFailure failure = StepFailure::None;
};

/// Scratch storage for one integration; allocated once, reused every step.
struct StepWorkspace {
    explicit StepWorkspace(std::size_t n);

    std::size_t n;
    std::array<Vector, 6> k;
    Vector k5_embedded;
    Vector d1, d2;
    Vector arg_a, arg_b;  // stage arguments
    Vector eval_a, eval_b;
    Vector y_next;      // main solution after take_step
    Vector y_embedded;  // embedded solution after take_step
    JacobianApprox jacobian;
    std::optional<Factorization> factorization;
};

/// Computes all stages for one step from y_n and leaves y_{n+1} and
/// y_{n+1,2} in the workspace. Costs 1 Jacobian evaluation, 1 factorization,
/// 5 solves, 3 phi and 2 g evaluations. Throws SingularMatrix.
void take_step(const SplitProblem& problem, std::span<const double> y_n, double h,
               const AdditiveMethod& method, StepWorkspace& ws, RunStatistics& stats);

/// max_i |y_i - y2_i| / (atol_i + rtol_i |y_i|).
/// Throws ZeroToleranceDenominator, DimensionMismatch.
[[nodiscard]] double error_norm(std::span<const double> y, std::span<const double> y2,
                                const Tolerances& tol);

/// Power-method estimate of h |lambda_max| for the Jacobian of phi, from the
/// two probe stages d1 = h phi(y_n + alpha21 k1) and
/// d2 = h phi(y_n + alpha31 k1 + alpha32 d1). Uses ws.d1, ws.d2, ws.arg_a.
/// Components with |d1_i - k1_i| < 1e-14 (1 + |k1_i|) are skipped; returns 0
/// when all are skipped. Costs 2 phi evaluations.
[[nodiscard]] double stability_estimate(const FrozenSplit& split, std::span<const double> y_n,
                                        std::span<const double> k1, double h,
                                        const ControllerConfig& cfg, StepWorkspace& ws);

struct StepProposal {
    double h_next_accepted = 0.0;
    double h_retry = 0.0;
};

/// Next stepsize after an accepted step, max(h, min(h_acc, h_st)) clamped to
/// [h_min, h_max], and the retry size after a rejection, clamped to
/// [h_min, h]. v is absent (or zero) when there is no stability limit.
[[nodiscard]] StepProposal propose_next_h(double h, double err, std::optional<double> v,
                                          const ControllerConfig& cfg);

/// One attempt: take_step, the stability probe (when enabled, on every
/// attempt that produced stages), error norm, accept test and the next-step
/// proposal. SingularMatrix and non-finite states become rejections with
/// h_next = h / 2.
[[nodiscard]] StepReport attempt_step(const SplitProblem& problem, std::span<const double> y_n,
                                      double h, const AdditiveMethod& method, const Tolerances& tol,
                                      const ControllerConfig& cfg, StepWorkspace& ws,
                                      RunStatistics& stats);

/// Row of the optional per-step log, emitted for accepted steps.
struct TraceRow {
    double t = 0.0;  // time reached by the step
    double h = 0.0;
    double err = 0.0;
    double v = 0.0;  // NaN when stability control is off
    std::span<const double> y;
};

using StepObserver = std::function<void(const TraceRow&)>;

struct IntegrationResult {
    Vector y;
    double t = 0.0;
    RunStatistics stats;
};

/// Adaptive integration from problem.t0 to problem.t_end starting at
/// problem.h0. Throws StepsizeUnderflow, MaxRejectsExceeded, NonFiniteState.
[[nodiscard]] IntegrationResult integrate(const SplitProblem& problem, const Tolerances& tol,
                                          const AdditiveMethod& method = AdditiveMethod::standard(),
                                          const ControllerConfig& cfg = {},
                                          const StepObserver& observer = {});

struct FixedStepResult {
    Vector y;
    RunStatistics stats;
    double max_embedded_gap = 0.0;  // max over steps of ||y_{n+1} - y_{n+1,2}||_inf
};

/// steps uniform steps of size (t_end - t0) / steps, no error control.
[[nodiscard]] FixedStepResult integrate_fixed(const SplitProblem& problem, std::size_t steps,
                                              const AdditiveMethod& method = AdditiveMethod::standard());

}  // namespace asode
