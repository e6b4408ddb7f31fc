#include <cmath>
#include <limits>

#include "asode/errors.hpp"
#include "asode/stepper.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace asode;

namespace {

// y' = A y with A diagonal, all of it in phi (B = 0).
SplitProblem diagonal_linear(Vector lambdas) {
    const std::size_t n = lambdas.size();
    return make_split(
        "lin", n,
        [lambdas](std::span<const double> y, std::span<double> f) {
            for (std::size_t i = 0; i < y.size(); ++i) f[i] = lambdas[i] * y[i];
        },
        [n](std::span<const double>) -> JacobianApprox { return DiagonalJacobian{Vector(n, 0.0)}; });
}

// y' = lambda y with exact B = lambda, nothing left in phi.
SplitProblem implicit_scalar(double lambda) {
    return make_split(
        "impl", 1, [lambda](std::span<const double> y, std::span<double> f) { f[0] = lambda * y[0]; },
        [lambda](std::span<const double>) -> JacobianApprox { return DiagonalJacobian{{lambda}}; });
}

double probe(const SplitProblem& p, const Vector& y, double h, const ControllerConfig& cfg = {}) {
    StepWorkspace ws(p.dimension);
    const JacobianApprox b = p.jac(y);
    const FrozenSplit split(p, b);
    Vector k1(p.dimension);
    split.phi(y, k1);
    for (double& v : k1) v *= h;
    return stability_estimate(split, y, k1, h, cfg, ws);
}

Vector one_step(const SplitProblem& p, const Vector& y, double h) {
    StepWorkspace ws(p.dimension);
    RunStatistics stats;
    take_step(p, y, h, AdditiveMethod::standard(), ws, stats);
    return ws.y_next;
}

}  // namespace

TEST_CASE("error norm") {
    CHECK(error_norm(Vector{1.0, 2.0}, Vector{1.0, 2.0}, Tolerances::uniform(2, 1e-3)) == 0.0);
    CHECK(error_norm(Vector{5.0}, Vector{4.5}, Tolerances{{1.0}, {0.0}}) == doctest::Approx(0.5));
    const Tolerances mixed{{0.0, 1e-2}, {1e-2, 0.0}};
    CHECK(error_norm(Vector{2.0, 0.0}, Vector{2.01, 0.005}, mixed) == doctest::Approx(0.5));
    CHECK_THROWS_AS((void)error_norm(Vector{0.0}, Vector{1.0}, Tolerances{{0.0}, {1.0}}),
                    ZeroToleranceDenominator);
    CHECK_THROWS_AS((void)error_norm(Vector{0.0, 1.0}, Vector{1.0}, Tolerances::uniform(2, 1.0)),
                    DimensionMismatch);
}

TEST_CASE("stability probe on linear phi") {
    const SplitProblem p = diagonal_linear({-1.0, -10.0});
    for (double h : {1e-3, 0.01, 0.05}) {
        CHECK(probe(p, Vector{1.0, 1.0}, h) == doctest::Approx(10.0 * h).epsilon(1e-10));
    }
    ControllerConfig other;
    other.alpha21 = 0.8;
    other.alpha31 = 0.3;
    other.alpha32 = 0.5;
    CHECK(probe(p, Vector{0.4, -2.0}, 0.02, other) == doctest::Approx(0.2).epsilon(1e-10));

    const SplitProblem scalar = diagonal_linear({-37.0});
    CHECK(probe(scalar, Vector{1.0}, 0.01) == doctest::Approx(0.37).epsilon(1e-10));
}

TEST_CASE("stability probe on constant phi is zero") {
    const SplitProblem p = make_split(
        "const", 2,
        [](std::span<const double>, std::span<double> f) {
            f[0] = 1.0;
            f[1] = -2.0;
        },
        [](std::span<const double>) -> JacobianApprox { return DiagonalJacobian{{0.0, 0.0}}; });
    CHECK(probe(p, Vector{1.0, 1.0}, 0.1) == 0.0);
}

TEST_CASE("stepsize proposal") {
    ControllerConfig cfg;
    cfg.safety = 1.0;
    const double h = 0.01;
    CHECK(propose_next_h(h, 1.0, std::nullopt, cfg).h_next_accepted == doctest::Approx(h));
    CHECK(propose_next_h(h, 0.125, std::nullopt, cfg).h_next_accepted == doctest::Approx(2 * h));
    CHECK(propose_next_h(h, 0.125, 4.0, cfg).h_next_accepted == doctest::Approx(h));
    // rejection shrinks but never grows
    const StepProposal rej = propose_next_h(h, 8.0, std::nullopt, cfg);
    CHECK(rej.h_retry == doctest::Approx(h / 2));
    CHECK(propose_next_h(h, 0.5, std::nullopt, cfg).h_retry <= h);
    // clamping
    cfg.h_max = 0.015;
    CHECK(propose_next_h(h, 1e-6, std::nullopt, cfg).h_next_accepted == 0.015);
}

TEST_CASE("a zero step changes nothing") {
    const SplitProblem p = builtin("example2");
    const Vector y = one_step(p, p.y0, 0.0);
    CHECK(y == p.y0);
}

TEST_CASE("stiff limit of one implicit step") {
    const SplitProblem p = implicit_scalar(-1e8);
    CHECK(std::abs(one_step(p, Vector{1.0}, 1.0)[0]) < 1e-6);
}

TEST_CASE("local error order") {
    const auto ratio = [](const SplitProblem& p, double h) {
        const double e1 = std::abs(one_step(p, Vector{1.0}, h)[0] - std::exp(-h));
        const double e2 = std::abs(one_step(p, Vector{1.0}, h / 2)[0] - std::exp(-h / 2));
        return e1 / e2;
    };
    // explicit part alone: O(h^4)
    CHECK(ratio(diagonal_linear({-1.0}), 0.1) == doctest::Approx(16.0).epsilon(0.1));
    // implicit part alone: a is a root of the quartic that cancels the h^4
    // term of R(0, z) - e^z, leaving O(h^5)
    CHECK(ratio(implicit_scalar(-1.0), 0.02) == doctest::Approx(32.0).epsilon(0.1));
}

TEST_CASE("counters match the per-attempt cost") {
    for (bool control : {true, false}) {
        ControllerConfig cfg;
        cfg.stability_control = control;
        const IntegrationResult r = integrate(builtin("example4"), Tolerances::uniform(4, 1e-3),
                                              AdditiveMethod::standard(), cfg);
        const auto n = r.stats.attempts();
        CAPTURE(control);
        CHECK(n > 0);
        CHECK(r.stats.factorizations == n);
        CHECK(r.stats.jacobian_evals == n);
        CHECK(r.stats.linear_solves == 5 * n);
        CHECK(r.stats.g_evals == 2 * n);
        CHECK(r.stats.phi_evals == (control ? 5 : 3) * n);
    }
}

TEST_CASE("accepted steps never exceed the tolerance") {
    bool all_ok = true;
    std::size_t rows = 0;
    const IntegrationResult r = integrate(builtin("example2"), Tolerances::uniform(3, 1e-3),
                                          AdditiveMethod::standard(), {}, [&](const TraceRow& row) {
                                              ++rows;
                                              all_ok = all_ok && row.err <= 1.0;
                                          });
    CHECK(all_ok);
    CHECK(rows == r.stats.steps_accepted);
}

TEST_CASE("empty interval") {
    SplitProblem p = linear_decay();
    p.t_end = p.t0;
    const IntegrationResult r = integrate(p, Tolerances::uniform(1, 1e-6));
    CHECK(r.y == p.y0);
    CHECK(r.stats.attempts() == 0);
}

TEST_CASE("linear decay lands on the exact value") {
    const double tol = 1e-8;
    SplitProblem p = implicit_scalar(-1.0);
    p.y0 = {1.0};
    p.t_end = 1.0;
    p.h0 = 1e-2;
    const IntegrationResult r = integrate(p, Tolerances::uniform(1, tol));
    CHECK(r.t == 1.0);
    CHECK(std::abs(r.y[0] - std::exp(-1.0)) <= 5 * tol);
}

TEST_CASE("example1 cost band") {
    const IntegrationResult r = integrate(builtin("example1"), Tolerances::uniform(3, 1e-2));
    CHECK(r.stats.phi_evals >= 100);
    CHECK(r.stats.phi_evals <= 5000);
}

TEST_CASE("embedded gap shrinks like h^3") {
    const SplitProblem p = smooth_problem(20.0, JacobianChoice::Exact, 1.0, true);
    const double g1 = integrate_fixed(p, 160).max_embedded_gap;
    const double g2 = integrate_fixed(p, 320).max_embedded_gap;
    CHECK(g1 / g2 >= 6.0);
    CHECK(g1 / g2 <= 10.0);
}

TEST_CASE("config validation") {
    ControllerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.alpha31 = 0.3;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
