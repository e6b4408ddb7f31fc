#pragma once

// Stage-system kernel: factor D = E - (a h) B once per step attempt and
// back-substitute the five right-hand sides of that attempt.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "asode/types.hpp"

namespace asode {

/// Square row-major matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static DenseMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    [[nodiscard]] Vector multiply(std::span<const double> x) const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct DiagonalJacobian {
    Vector values;
};

struct DenseJacobian {
    DenseMatrix matrix;
};

/// Approximation B of the Jacobian of the stiff term.
using JacobianApprox = std::variant<DiagonalJacobian, DenseJacobian>;

[[nodiscard]] std::size_t dimension(const JacobianApprox& b) noexcept;

/// B * x.
[[nodiscard]] Vector apply(const JacobianApprox& b, std::span<const double> x);

/// Factored E - (a h) B. Immutable once built; solve() is const and reentrant.
class Factorization {
public:
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double a_times_h() const noexcept { return a_times_h_; }
    [[nodiscard]] bool is_diagonal() const noexcept { return lu_.size() == 0; }

    /// Writes the solution of D x = rhs into out. Aliasing rhs and out is
    /// allowed but costs a copy on the dense path.
    void solve_into(std::span<const double> rhs, std::span<double> out) const;

    [[nodiscard]] Vector solve(std::span<const double> rhs) const;

    friend Factorization factor(const JacobianApprox& b, double a_times_h);

private:
    std::size_t n_ = 0;
    double a_times_h_ = 0.0;
    Vector inv_diag_;               // diagonal path
    DenseMatrix lu_;                // dense path: unit-lower L and U packed
    std::vector<std::size_t> perm_; // row i of PA is row perm_[i] of A
};

/// Throws SingularMatrix when a pivot falls below 1e-14 times the largest
/// entry of D, InvalidArgument for an empty or non-finite input.
[[nodiscard]] Factorization factor(const JacobianApprox& b, double a_times_h);

/// Throws DimensionMismatch if rhs does not match the factorization.
[[nodiscard]] Vector solve(const Factorization& f, std::span<const double> rhs);

}  // namespace asode
