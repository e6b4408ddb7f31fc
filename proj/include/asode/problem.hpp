#pragma once

// Autonomous additively split problems y' = phi(y) + g(y).
//
// Two shapes are supported:
//  * linearized: the user gives the full right-hand side f and a provider of
//    B(y), an approximation of df/dy. For a step starting at y_n the split is
//    g(y) = B(y_n) y, phi(y) = f(y) - B(y_n) y, so g' = B(y_n) exactly no
//    matter how crude B is.
//  * additive: the user gives phi and g directly and jac(y) approximates g'.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asode/linalg.hpp"
#include "asode/types.hpp"

namespace asode {

using RhsFn = std::function<void(std::span<const double> y, std::span<double> dydt)>;
using JacobianFn = std::function<JacobianApprox(std::span<const double> y)>;
using SolutionFn = std::function<Vector(double t)>;

struct SplitProblem {
    std::string name;
    std::size_t dimension = 0;

    RhsFn full;     // f; always set
    JacobianFn jac; // B(y)
    RhsFn phi;      // set only for additive problems
    RhsFn g;

    Vector y0;
    double t0 = 0.0;
    double t_end = 0.0;
    double h0 = 0.0;

    std::optional<SolutionFn> exact;  // closed-form solution, if known

    [[nodiscard]] bool is_additive() const noexcept { return static_cast<bool>(phi); }

    /// Throws InvalidArgument / DimensionMismatch on inconsistent fields.
    void validate() const;
};

/// Per-component error weights Atol_i + Rtol_i |y_i|.
struct Tolerances {
    Vector atol;
    Vector rtol;

    [[nodiscard]] static Tolerances uniform(std::size_t n, double atol, double rtol);
    [[nodiscard]] static Tolerances uniform(std::size_t n, double tol) { return uniform(n, tol, tol); }

    void validate(std::size_t n) const;
};

/// The split of a problem with B held fixed at one linearization point.
class FrozenSplit {
public:
    FrozenSplit(const SplitProblem& problem, const JacobianApprox& b) : problem_(&problem), b_(&b) {}

    void phi(std::span<const double> y, std::span<double> out) const;
    void g(std::span<const double> y, std::span<double> out) const;

    [[nodiscard]] const JacobianApprox& jacobian() const noexcept { return *b_; }

private:
    const SplitProblem* problem_;
    const JacobianApprox* b_;
};

/// out += alpha * B * x, without temporaries.
void multiply_add(const JacobianApprox& b, std::span<const double> x, double alpha,
                  std::span<double> out);

/// Builds a linearized problem from f and B. Dimension checks on B happen at
/// evaluation time and raise DimensionMismatch.
[[nodiscard]] SplitProblem make_split(std::string name, std::size_t n, RhsFn f, JacobianFn b);

/// Builds an additive problem from explicit phi and g; jac approximates g'.
[[nodiscard]] SplitProblem make_additive(std::string name, std::size_t n, RhsFn phi, RhsFn g,
                                         JacobianFn jac);

// Evaluations with B taken at the evaluation point itself.
[[nodiscard]] Vector eval_full(const SplitProblem& p, std::span<const double> y);
[[nodiscard]] Vector eval_phi(const SplitProblem& p, std::span<const double> y);
[[nodiscard]] Vector eval_g(const SplitProblem& p, std::span<const double> y);

/// example1..example4 (stiff chemistry benchmarks, diagonal B) plus two
/// synthetic test problems: "smooth" (mildly stiff, closed-form solution,
/// dense Jacobian) and "leaky" (linear, stiffness left in phi).
/// Throws UnknownProblem.
[[nodiscard]] SplitProblem builtin(std::string_view name);
[[nodiscard]] std::vector<std::string> builtin_names();

/// How B is chosen for the synthetic smooth problem.
enum class JacobianChoice { Exact, Zero, Diagonal, FrozenAtStart };

/// Nonlinear 2-component problem with closed-form solution. Internally
/// z1' = -stiffness z1 + z2^2, z2' = -z2, observed through y = M z with a
/// non-diagonal M so the Jacobian couples both components. z2(0) = 1 and
/// z1(0) = 1, or z1(0) = 1/(stiffness - 2) to start without the fast
/// transient.
[[nodiscard]] SplitProblem smooth_problem(double stiffness,
                                          JacobianChoice choice = JacobianChoice::Exact,
                                          double t_end = 1.0, bool on_slow_manifold = false);

/// Linear problem y1' = -stiff y1 + leak y2, y2' = -leak y2 with
/// B = diag(-stiff, 0): the eigenvalue -leak stays in phi.
[[nodiscard]] SplitProblem leaky_problem(double stiff = 1000.0, double leak = 10.0,
                                         double t_end = 3.0);

/// y' = -rate y, y(0) = 1, with B = 0 so everything is explicit.
[[nodiscard]] SplitProblem linear_decay(double rate = 1.0, double t_end = 1.0);

}  // namespace asode
