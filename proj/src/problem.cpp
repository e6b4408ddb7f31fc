#include "asode/problem.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "asode/errors.hpp"

namespace asode {

namespace {

void require_size(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        std::ostringstream msg;
        msg << what << ": expected dimension " << expected << ", got " << got;
        throw DimensionMismatch(msg.str());
    }
}

DiagonalJacobian diag(std::initializer_list<double> v) { return DiagonalJacobian{Vector(v)}; }

// --- benchmark problems -----------------------------------------------------

SplitProblem example1() {
    auto f = [](std::span<const double> y, std::span<double> dy) {
        dy[0] = -0.013 * y[0] - 1000.0 * y[0] * y[2];
        dy[1] = -2500.0 * y[1] * y[2];
        dy[2] = -0.013 * y[0] - 1000.0 * y[0] * y[2] - 2500.0 * y[1] * y[2];
    };
    auto b = [](std::span<const double> y) -> JacobianApprox {
        return diag({-0.013 - 1000.0 * y[2], -2500.0 * y[2], -1000.0 * y[0] - 2500.0 * y[1]});
    };
    SplitProblem p = make_split("example1", 3, f, b);
    p.y0 = {1.0, 1.0, 0.0};
    p.t0 = 0.0;
    p.t_end = 50.0;
    p.h0 = 2.9e-4;
    return p;
}

// Oregonator.
SplitProblem example2() {
    auto f = [](std::span<const double> y, std::span<double> dy) {
        dy[0] = 77.27 * (y[1] - y[0] * y[1] + y[0] - 8.375e-6 * y[0] * y[0]);
        dy[1] = (-y[1] - y[0] * y[1] + y[2]) / 77.27;
        dy[2] = 0.161 * (y[0] - y[2]);
    };
    auto b = [](std::span<const double> y) -> JacobianApprox {
        return diag({77.27 * (1.0 - y[1] - 2.0 * 8.375e-6 * y[0]), (-1.0 - y[0]) / 77.27, -0.161});
    };
    SplitProblem p = make_split("example2", 3, f, b);
    p.y0 = {4.0, 1.1, 4.0};
    p.t0 = 0.0;
    p.t_end = 300.0;
    p.h0 = 2e-3;
    return p;
}

SplitProblem example3() {
    auto f = [](std::span<const double> y, std::span<double> dy) {
        dy[0] = -0.04 * y[0] + 0.01 * y[1] * y[2];
        dy[1] = 400.0 * y[0] - 100.0 * y[1] * y[2] - 3000.0 * y[1] * y[1];
        dy[2] = 30.0 * y[1] * y[1];
    };
    auto b = [](std::span<const double> y) -> JacobianApprox {
        return diag({-0.04, -100.0 * y[2] - 6000.0 * y[1], 0.0});
    };
    SplitProblem p = make_split("example3", 3, f, b);
    p.y0 = {1.0, 0.0, 0.0};
    p.t0 = 0.0;
    p.t_end = 40.0;
    p.h0 = 1e-5;
    return p;
}

SplitProblem example4() {
    auto f = [](std::span<const double> y, std::span<double> dy) {
        dy[0] = y[2] - 100.0 * y[0] * y[1];
        dy[1] = y[2] + 2.0 * y[3] - 100.0 * y[0] * y[1] - 2e4 * y[1] * y[1];
        dy[2] = -y[2] + 100.0 * y[0] * y[1];
        dy[3] = -y[3] + 1e4 * y[1] * y[1];
    };
    auto b = [](std::span<const double> y) -> JacobianApprox {
        return diag({-100.0 * y[1], -100.0 * y[0] - 4e4 * y[1], -1.0, -1.0});
    };
    SplitProblem p = make_split("example4", 4, f, b);
    p.y0 = {1.0, 1.0, 0.0, 0.0};
    p.t0 = 0.0;
    p.t_end = 20.0;
    p.h0 = 2.5e-5;
    return p;
}

// --- synthetic smooth problem ----------------------------------------------

// y = M z, M = [[1, 1/2], [1/4, 1]].
constexpr double kM[2][2] = {{1.0, 0.5}, {0.25, 1.0}};
constexpr double kMdet = 1.0 - 0.5 * 0.25;
constexpr double kMinv[2][2] = {{1.0 / kMdet, -0.5 / kMdet}, {-0.25 / kMdet, 1.0 / kMdet}};

std::array<double, 2> to_z(std::span<const double> y) {
    return {kMinv[0][0] * y[0] + kMinv[0][1] * y[1], kMinv[1][0] * y[0] + kMinv[1][1] * y[1]};
}

DenseMatrix smooth_jacobian(double lambda, std::span<const double> y) {
    const auto z = to_z(y);
    // dF/dz = [[-lambda, 2 z2], [0, -1]]; J = M dF/dz M^{-1}.
    const double fz[2][2] = {{-lambda, 2.0 * z[1]}, {0.0, -1.0}};
    double tmp[2][2] = {};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) tmp[i][j] += kM[i][k] * fz[k][j];
    DenseMatrix jac(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) jac(i, j) += tmp[i][k] * kMinv[k][j];
    return jac;
}

}  // namespace

void SplitProblem::validate() const {
    if (dimension == 0) throw InvalidArgument("problem '" + name + "': dimension must be positive");
    if (!full || !jac) throw InvalidArgument("problem '" + name + "': missing f or B provider");
    if (static_cast<bool>(phi) != static_cast<bool>(g)) {
        throw InvalidArgument("problem '" + name + "': phi and g must be given together");
    }
    require_size(dimension, y0.size(), "initial state");
    if (!all_finite(y0)) throw NonFiniteState("problem '" + name + "': initial state is not finite");
    if (!std::isfinite(t0) || !std::isfinite(t_end) || t_end < t0) {
        throw InvalidArgument("problem '" + name + "': need finite t0 <= t_end");
    }
    if (!(h0 > 0.0) || !std::isfinite(h0)) {
        throw InvalidArgument("problem '" + name + "': initial step must be positive");
    }
}

Tolerances Tolerances::uniform(std::size_t n, double atol, double rtol) {
    return Tolerances{Vector(n, atol), Vector(n, rtol)};
}

void Tolerances::validate(std::size_t n) const {
    require_size(n, atol.size(), "atol");
    require_size(n, rtol.size(), "rtol");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(atol[i] >= 0.0) || !(rtol[i] >= 0.0) || !std::isfinite(atol[i]) || !std::isfinite(rtol[i])) {
            throw InvalidArgument("tolerances must be finite and non-negative");
        }
        if (atol[i] == 0.0 && rtol[i] == 0.0) {
            throw InvalidArgument("atol and rtol are both zero in component " + std::to_string(i));
        }
    }
}

void multiply_add(const JacobianApprox& b, std::span<const double> x, double alpha,
                  std::span<double> out) {
    if (const auto* d = std::get_if<DiagonalJacobian>(&b)) {
        require_size(x.size(), d->values.size(), "B");
        require_size(x.size(), out.size(), "B*y output");
        for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * d->values[i] * x[i];
        return;
    }
    const DenseMatrix& m = std::get<DenseJacobian>(b).matrix;
    require_size(x.size(), m.size(), "B");
    require_size(x.size(), out.size(), "B*y output");
    for (std::size_t i = 0; i < x.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += m(i, j) * x[j];
        out[i] += alpha * s;
    }
}

void FrozenSplit::phi(std::span<const double> y, std::span<double> out) const {
    if (problem_->is_additive()) {
        problem_->phi(y, out);
        return;
    }
    problem_->full(y, out);
    multiply_add(*b_, y, -1.0, out);
}

void FrozenSplit::g(std::span<const double> y, std::span<double> out) const {
    if (problem_->is_additive()) {
        problem_->g(y, out);
        return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    multiply_add(*b_, y, 1.0, out);
}

SplitProblem make_split(std::string name, std::size_t n, RhsFn f, JacobianFn b) {
    SplitProblem p;
    p.name = std::move(name);
    p.dimension = n;
    p.full = std::move(f);
    p.jac = [n, provider = std::move(b)](std::span<const double> y) {
        JacobianApprox out = provider(y);
        require_size(n, dimension(out), "Jacobian approximation");
        return out;
    };
    return p;
}

SplitProblem make_additive(std::string name, std::size_t n, RhsFn phi, RhsFn g, JacobianFn jac) {
    SplitProblem p = make_split(std::move(name), n, nullptr, std::move(jac));
    p.full = [n, phi, g](std::span<const double> y, std::span<double> out) {
        Vector tmp(n);
        phi(y, out);
        g(y, tmp);
        for (std::size_t i = 0; i < n; ++i) out[i] += tmp[i];
    };
    p.phi = std::move(phi);
    p.g = std::move(g);
    return p;
}

Vector eval_full(const SplitProblem& p, std::span<const double> y) {
    require_size(p.dimension, y.size(), "state");
    Vector out(p.dimension);
    p.full(y, out);
    return out;
}

Vector eval_phi(const SplitProblem& p, std::span<const double> y) {
    require_size(p.dimension, y.size(), "state");
    const JacobianApprox b = p.jac(y);
    Vector out(p.dimension);
    FrozenSplit(p, b).phi(y, out);
    return out;
}

Vector eval_g(const SplitProblem& p, std::span<const double> y) {
    require_size(p.dimension, y.size(), "state");
    const JacobianApprox b = p.jac(y);
    Vector out(p.dimension);
    FrozenSplit(p, b).g(y, out);
    return out;
}

SplitProblem smooth_problem(double stiffness, JacobianChoice choice, double t_end, bool on_slow_manifold) {
    const double lambda = stiffness;
    if (std::abs(lambda - 2.0) < 1e-8) throw InvalidArgument("smooth problem: stiffness must differ from 2");
    const double c = 1.0 / (lambda - 2.0);
    const double z10 = on_slow_manifold ? c : 1.0;
    auto f = [lambda](std::span<const double> y, std::span<double> dy) {
        const auto z = to_z(y);
        const double f1 = -lambda * z[0] + z[1] * z[1];
        const double f2 = -z[1];
        dy[0] = kM[0][0] * f1 + kM[0][1] * f2;
        dy[1] = kM[1][0] * f1 + kM[1][1] * f2;
    };
    const Vector y0 = {kM[0][0] * z10 + kM[0][1], kM[1][0] * z10 + kM[1][1]};  // z2(0) = 1

    JacobianFn b;
    switch (choice) {
        case JacobianChoice::Exact:
            b = [lambda](std::span<const double> y) -> JacobianApprox {
                return DenseJacobian{smooth_jacobian(lambda, y)};
            };
            break;
        case JacobianChoice::Zero:
            b = [](std::span<const double>) -> JacobianApprox { return DiagonalJacobian{Vector(2, 0.0)}; };
            break;
        case JacobianChoice::Diagonal:
            b = [lambda](std::span<const double> y) -> JacobianApprox {
                const DenseMatrix j = smooth_jacobian(lambda, y);
                return DiagonalJacobian{{j(0, 0), j(1, 1)}};
            };
            break;
        case JacobianChoice::FrozenAtStart: {
            const JacobianApprox frozen = DenseJacobian{smooth_jacobian(lambda, y0)};
            b = [frozen](std::span<const double>) { return frozen; };
            break;
        }
    }

    SplitProblem p = make_split("smooth", 2, f, b);
    p.y0 = y0;
    p.t0 = 0.0;
    p.t_end = t_end;
    p.h0 = 1e-3;
    p.exact = [lambda, c, z10](double t) {
        const double z2 = std::exp(-t);
        const double z1 = (z10 - c) * std::exp(-lambda * t) + c * std::exp(-2.0 * t);
        return Vector{kM[0][0] * z1 + kM[0][1] * z2, kM[1][0] * z1 + kM[1][1] * z2};
    };
    return p;
}

SplitProblem leaky_problem(double stiff, double leak, double t_end) {
    auto f = [stiff, leak](std::span<const double> y, std::span<double> dy) {
        dy[0] = -stiff * y[0] + leak * y[1];
        dy[1] = -leak * y[1];
    };
    auto b = [stiff](std::span<const double>) -> JacobianApprox { return diag({-stiff, 0.0}); };
    SplitProblem p = make_split("leaky", 2, f, b);
    p.y0 = {1.0, 1.0};
    p.t0 = 0.0;
    p.t_end = t_end;
    p.h0 = 1e-3;
    p.exact = [stiff, leak](double t) {
        const double y2 = std::exp(-leak * t);
        const double c = leak / (stiff - leak);
        const double y1 = (1.0 - c) * std::exp(-stiff * t) + c * y2;
        return Vector{y1, y2};
    };
    return p;
}

SplitProblem linear_decay(double rate, double t_end) {
    auto f = [rate](std::span<const double> y, std::span<double> dy) { dy[0] = -rate * y[0]; };
    auto b = [](std::span<const double>) -> JacobianApprox { return diag({0.0}); };
    SplitProblem p = make_split("decay", 1, f, b);
    p.y0 = {1.0};
    p.t0 = 0.0;
    p.t_end = t_end;
    p.h0 = 1e-2;
    p.exact = [rate](double t) { return Vector{std::exp(-rate * t)}; };
    return p;
}

SplitProblem builtin(std::string_view name) {
    if (name == "example1") return example1();
    if (name == "example2") return example2();
    if (name == "example3") return example3();
    if (name == "example4") return example4();
    if (name == "smooth") return smooth_problem(20.0);
    if (name == "leaky") return leaky_problem();
    throw UnknownProblem("unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names() {
    return {"example1", "example2", "example3", "example4", "smooth", "leaky"};
}

}  // namespace asode
