#include "asode/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "asode/errors.hpp"

namespace asode {

namespace {

constexpr double kErrFloor = 1e-14;
constexpr double kProbeFloor = 1e-14;
constexpr double kLandingSlack = 1.0001;

// out = y + sum_j c_j k_j over the first M stages.
template <std::size_t M>
void combine(std::span<const double> y, const std::array<double, M>& c,
             const std::array<Vector, 6>& k, std::span<double> out) {
    std::copy(y.begin(), y.end(), out.begin());
    for (std::size_t j = 0; j < M; ++j) {
        if (c[j] == 0.0) continue;
        const Vector& kj = k[j];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[j] * kj[i];
    }
}

}  // namespace

const AdditiveMethod& AdditiveMethod::standard() {
    static const AdditiveMethod method = from_parameter(kDefaultA);
    return method;
}

AdditiveMethod AdditiveMethod::from_parameter(double a) {
    AdditiveMethod m;
    m.scheme = derive_scheme(a);
    m.embedded = derive_embedded(m.scheme);
    return m;
}

void ControllerConfig::validate() const {
    if (!(safety > 0.0 && safety <= 1.0)) throw InvalidArgument("safety factor must lie in (0, 1]");
    if (!(h_min > 0.0) || !(h_max >= h_min)) throw InvalidArgument("need 0 < h_min <= h_max");
    if (max_rejects_per_step < 1) throw InvalidArgument("max_rejects_per_step must be positive");
    if (std::abs(alpha21 - (alpha31 + alpha32)) > 1e-15 * std::max(1.0, std::abs(alpha21))) {
        throw InvalidArgument("probe coefficients must satisfy alpha21 = alpha31 + alpha32");
    }
    if (alpha32 == 0.0 || alpha21 == 0.0) throw InvalidArgument("probe coefficients alpha21, alpha32 must be nonzero");
}

RunStatistics& RunStatistics::operator+=(const RunStatistics& o) noexcept {
    phi_evals += o.phi_evals;
    g_evals += o.g_evals;
    jacobian_evals += o.jacobian_evals;
    factorizations += o.factorizations;
    linear_solves += o.linear_solves;
    steps_accepted += o.steps_accepted;
    steps_rejected += o.steps_rejected;
    return *this;
}

StepWorkspace::StepWorkspace(std::size_t n_)
    : n(n_),
      k5_embedded(n_),
      d1(n_),
      d2(n_),
      arg_a(n_),
      arg_b(n_),
      eval_a(n_),
      eval_b(n_),
      y_next(n_),
      y_embedded(n_),
      jacobian(DiagonalJacobian{Vector(n_, 0.0)}) {
    for (auto& v : k) v.assign(n_, 0.0);
}

void take_step(const SplitProblem& problem, std::span<const double> y_n, double h,
               const AdditiveMethod& method, StepWorkspace& ws, RunStatistics& stats) {
    const std::size_t n = ws.n;
    if (y_n.size() != n || problem.dimension != n) throw DimensionMismatch("take_step: state size mismatch");
    const SchemeCoefficients& c = method.scheme;
    const auto& r = method.embedded.r;
    auto& k = ws.k;

    ws.jacobian = problem.jac(y_n);
    ++stats.jacobian_evals;
    const FrozenSplit split(problem, ws.jacobian);

    ++stats.factorizations;
    ws.factorization.reset();
    ws.factorization.emplace(factor(ws.jacobian, c.a * h));
    const Factorization& d = *ws.factorization;

    split.phi(y_n, ws.eval_a);
    ++stats.phi_evals;
    split.g(y_n, ws.eval_b);
    ++stats.g_evals;

    for (std::size_t i = 0; i < n; ++i) {
        k[0][i] = h * ws.eval_a[i];
        ws.arg_a[i] = h * (ws.eval_a[i] + ws.eval_b[i]);
    }
    d.solve_into(ws.arg_a, k[1]);
    d.solve_into(k[1], k[2]);
    stats.linear_solves += 2;

    combine(y_n, c.beta4, k, ws.arg_a);
    combine(y_n, c.alpha4, k, ws.arg_b);
    split.phi(ws.arg_a, ws.eval_a);
    ++stats.phi_evals;
    split.g(ws.arg_b, ws.eval_b);
    ++stats.g_evals;
    for (std::size_t i = 0; i < n; ++i) ws.arg_a[i] = h * (ws.eval_a[i] + ws.eval_b[i]);
    d.solve_into(ws.arg_a, k[3]);

    for (std::size_t i = 0; i < n; ++i) ws.arg_a[i] = k[3][i] + c.gamma * k[2][i];
    d.solve_into(ws.arg_a, k[4]);

    combine(y_n, c.beta6, k, ws.arg_a);
    split.phi(ws.arg_a, ws.eval_a);
    ++stats.phi_evals;
    for (std::size_t i = 0; i < n; ++i) k[5][i] = h * ws.eval_a[i];

    combine(y_n, c.p, k, ws.y_next);

    d.solve_into(k[3], ws.k5_embedded);
    stats.linear_solves += 3;
    for (std::size_t i = 0; i < n; ++i) {
        ws.y_embedded[i] = y_n[i] + r[0] * k[0][i] + r[1] * k[1][i] + r[2] * k[2][i] +
                           r[3] * k[3][i] + r[4] * ws.k5_embedded[i];
    }
}

double error_norm(std::span<const double> y, std::span<const double> y2, const Tolerances& tol) {
    if (y.size() != y2.size() || y.size() != tol.atol.size() || y.size() != tol.rtol.size()) {
        throw DimensionMismatch("error_norm: size mismatch");
    }
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double scale = tol.atol[i] + tol.rtol[i] * std::abs(y[i]);
        if (!(scale > 0.0)) {
            std::ostringstream msg;
            msg << "error weight of component " << i << " is zero (atol=" << tol.atol[i]
                << ", rtol=" << tol.rtol[i] << ", y=" << y[i] << ")";
            throw ZeroToleranceDenominator(msg.str());
        }
        const double e = std::abs(y[i] - y2[i]) / scale;
        if (std::isnan(e)) return e;
        err = std::max(err, e);
    }
    return err;
}

double stability_estimate(const FrozenSplit& split, std::span<const double> y_n,
                          std::span<const double> k1, double h, const ControllerConfig& cfg,
                          StepWorkspace& ws) {
    const std::size_t n = y_n.size();
    for (std::size_t i = 0; i < n; ++i) ws.arg_a[i] = y_n[i] + cfg.alpha21 * k1[i];
    split.phi(ws.arg_a, ws.d1);
    for (std::size_t i = 0; i < n; ++i) ws.d1[i] *= h;

    for (std::size_t i = 0; i < n; ++i) ws.arg_a[i] = y_n[i] + cfg.alpha31 * k1[i] + cfg.alpha32 * ws.d1[i];
    split.phi(ws.arg_a, ws.d2);
    for (std::size_t i = 0; i < n; ++i) ws.d2[i] *= h;

    double ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double den = std::abs(ws.d1[i] - k1[i]);
        if (!(den >= kProbeFloor * (1.0 + std::abs(k1[i])))) continue;
        ratio = std::max(ratio, std::abs(ws.d2[i] - ws.d1[i]) / den);
    }
    return ratio / std::abs(cfg.alpha32);
}

StepProposal propose_next_h(double h, double err, std::optional<double> v, const ControllerConfig& cfg) {
    const double q1 = std::cbrt(1.0 / std::max(err, kErrFloor));
    const double h_acc = cfg.safety * q1 * h;
    const double h_st = (v && *v > 0.0) ? 2.0 / *v * h : std::numeric_limits<double>::infinity();
    StepProposal out;
    out.h_next_accepted = std::clamp(std::max(h, std::min(h_acc, h_st)), cfg.h_min, cfg.h_max);
    out.h_retry = std::clamp(cfg.safety * q1 * h, cfg.h_min, std::max(h, cfg.h_min));
    return out;
}

StepReport attempt_step(const SplitProblem& problem, std::span<const double> y_n, double h,
                        const AdditiveMethod& method, const Tolerances& tol,
                        const ControllerConfig& cfg, StepWorkspace& ws, RunStatistics& stats) {
    if (!all_finite(y_n)) throw NonFiniteState("attempt_step: y_n is not finite");

    StepReport rep;
    rep.h_used = h;
    auto reject_halving = [&](StepFailure why) {
        rep.accepted = false;
        rep.failure = why;
        rep.err = std::numeric_limits<double>::infinity();
        rep.h_next = std::max(0.5 * h, cfg.h_min);
        ++stats.steps_rejected;
        return rep;
    };

    try {
        take_step(problem, y_n, h, method, ws, stats);
    } catch (const SingularMatrix&) {
        return reject_halving(StepFailure::SingularMatrix);
    }
    if (cfg.stability_control) {
        const FrozenSplit split(problem, ws.jacobian);
        rep.v = stability_estimate(split, y_n, ws.k[0], h, cfg, ws);
        stats.phi_evals += 2;
    }
    if (!all_finite(ws.y_next) || !all_finite(ws.y_embedded)) {
        return reject_halving(StepFailure::NonFiniteState);
    }

    rep.err = error_norm(ws.y_next, ws.y_embedded, tol);
    if (std::isnan(rep.err)) return reject_halving(StepFailure::NonFiniteState);

    if (!(rep.err <= 1.0)) {
        rep.accepted = false;
        rep.failure = StepFailure::ErrorTooLarge;
        rep.h_next = propose_next_h(h, rep.err, std::nullopt, cfg).h_retry;
        ++stats.steps_rejected;
        return rep;
    }

    rep.accepted = true;
    rep.h_next = propose_next_h(h, rep.err, rep.v, cfg).h_next_accepted;
    ++stats.steps_accepted;
    return rep;
}

IntegrationResult integrate(const SplitProblem& problem, const Tolerances& tol,
                            const AdditiveMethod& method, const ControllerConfig& cfg,
                            const StepObserver& observer) {
    problem.validate();
    tol.validate(problem.dimension);
    cfg.validate();

    IntegrationResult res;
    res.y = problem.y0;
    res.t = problem.t0;
    if (problem.t_end == problem.t0) return res;

    ControllerConfig run_cfg = cfg;
    run_cfg.h_max = std::min(cfg.h_max, problem.t_end - problem.t0);
    run_cfg.h_min = std::min(cfg.h_min, run_cfg.h_max);

    StepWorkspace ws(problem.dimension);
    double h = std::clamp(problem.h0, run_cfg.h_min, run_cfg.h_max);
    int rejects_in_row = 0;

    while (res.t < problem.t_end) {
        const double remaining = problem.t_end - res.t;
        const bool last = h * kLandingSlack >= remaining;
        const double h_step = last ? remaining : h;

        const StepReport rep = attempt_step(problem, res.y, h_step, method, tol, run_cfg, ws, res.stats);
        if (rep.accepted) {
            rejects_in_row = 0;
            res.t = last ? problem.t_end : res.t + h_step;
            std::swap(res.y, ws.y_next);
            if (observer) {
                observer(TraceRow{res.t, h_step, rep.err,
                                  rep.v.value_or(std::numeric_limits<double>::quiet_NaN()), res.y});
            }
            h = rep.h_next;
            continue;
        }

        ++rejects_in_row;
        if (rejects_in_row > run_cfg.max_rejects_per_step) {
            std::ostringstream msg;
            msg << "step at t=" << res.t << " rejected " << rejects_in_row << " times in a row (last h="
                << h_step << ", err=" << rep.err << ")";
            if (rep.failure == StepFailure::NonFiniteState) throw NonFiniteState(msg.str());
            throw MaxRejectsExceeded(msg.str());
        }
        if (h_step <= run_cfg.h_min) {
            std::ostringstream msg;
            msg << "step size underflow at t=" << res.t << ": h=" << h_step << " rejected (err=" << rep.err
                << ") and h_min=" << run_cfg.h_min;
            throw StepsizeUnderflow(msg.str());
        }
        h = std::clamp(rep.h_next, run_cfg.h_min, h_step);
    }
    return res;
}

FixedStepResult integrate_fixed(const SplitProblem& problem, std::size_t steps, const AdditiveMethod& method) {
    problem.validate();
    if (steps == 0) throw InvalidArgument("integrate_fixed: need at least one step");
    FixedStepResult res;
    res.y = problem.y0;
    const double h = (problem.t_end - problem.t0) / static_cast<double>(steps);
    StepWorkspace ws(problem.dimension);
    for (std::size_t s = 0; s < steps; ++s) {
        take_step(problem, res.y, h, method, ws, res.stats);
        double gap = 0.0;
        for (std::size_t i = 0; i < ws.n; ++i) gap = std::max(gap, std::abs(ws.y_next[i] - ws.y_embedded[i]));
        res.max_embedded_gap = std::max(res.max_embedded_gap, gap);
        std::swap(res.y, ws.y_next);
        ++res.stats.steps_accepted;
    }
    return res;
}

}  // namespace asode
