#include "asode/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "asode/errors.hpp"

namespace asode {

namespace {

constexpr double kPivotGuard = 1e-14;

[[noreturn]] void throw_singular(std::size_t row, double pivot, double scale) {
    std::ostringstream msg;
    msg << "stage matrix is singular: pivot " << pivot << " in row " << row
        << " (matrix scale " << scale << "); reduce the step size";
    throw SingularMatrix(msg.str());
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector DenseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionMismatch("matrix-vector product: size mismatch");
    Vector y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

std::size_t dimension(const JacobianApprox& b) noexcept {
    return std::visit(
        [](const auto& m) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DiagonalJacobian>) {
                return m.values.size();
            } else {
                return m.matrix.size();
            }
        },
        b);
}

Vector apply(const JacobianApprox& b, std::span<const double> x) {
    if (const auto* d = std::get_if<DiagonalJacobian>(&b)) {
        if (d->values.size() != x.size()) throw DimensionMismatch("B*y: size mismatch");
        Vector y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = d->values[i] * x[i];
        return y;
    }
    return std::get<DenseJacobian>(b).matrix.multiply(x);
}

Factorization factor(const JacobianApprox& b, double a_times_h) {
    if (!std::isfinite(a_times_h)) throw InvalidArgument("factor: a*h is not finite");
    const std::size_t n = dimension(b);
    if (n == 0) throw InvalidArgument("factor: empty Jacobian approximation");

    Factorization f;
    f.n_ = n;
    f.a_times_h_ = a_times_h;

    if (const auto* d = std::get_if<DiagonalJacobian>(&b)) {
        f.inv_diag_.resize(n);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double di = 1.0 - a_times_h * d->values[i];
            if (!std::isfinite(di)) throw InvalidArgument("factor: non-finite Jacobian entry");
            f.inv_diag_[i] = di;
            scale = std::max(scale, std::abs(di));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(f.inv_diag_[i]) < kPivotGuard * scale) throw_singular(i, f.inv_diag_[i], scale);
            f.inv_diag_[i] = 1.0 / f.inv_diag_[i];
        }
        return f;
    }

    const DenseMatrix& bm = std::get<DenseJacobian>(b).matrix;
    DenseMatrix lu(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = (i == j ? 1.0 : 0.0) - a_times_h * bm(i, j);
            if (!std::isfinite(v)) throw InvalidArgument("factor: non-finite Jacobian entry");
            lu(i, j) = v;
            scale = std::max(scale, std::abs(v));
        }
    }

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    // Doolittle elimination with row pivoting; rows are swapped physically.
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                piv = i;
            }
        }
        if (best < kPivotGuard * scale) throw_singular(k, best, scale);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            std::swap(perm[k], perm[piv]);
        }
        const double inv = 1.0 / lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = lu(i, k) * inv;
            lu(i, k) = m;
            if (m == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
        }
    }

    f.lu_ = std::move(lu);
    f.perm_ = std::move(perm);
    return f;
}

void Factorization::solve_into(std::span<const double> rhs, std::span<double> out) const {
    if (rhs.size() != n_ || out.size() != n_) {
        std::ostringstream msg;
        msg << "solve: factorization has dimension " << n_ << ", rhs " << rhs.size();
        throw DimensionMismatch(msg.str());
    }
    if (!inv_diag_.empty()) {
        for (std::size_t i = 0; i < n_; ++i) out[i] = rhs[i] * inv_diag_[i];
        return;
    }
    if (rhs.data() == out.data()) {
        const Vector copy(rhs.begin(), rhs.end());
        solve_into(copy, out);
        return;
    }
    for (std::size_t i = 0; i < n_; ++i) out[i] = rhs[perm_[i]];
    for (std::size_t i = 1; i < n_; ++i) {
        double s = out[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * out[j];
        out[i] = s;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        double s = out[ii];
        for (std::size_t j = ii + 1; j < n_; ++j) s -= lu_(ii, j) * out[j];
        out[ii] = s / lu_(ii, ii);
    }
}

Vector Factorization::solve(std::span<const double> rhs) const {
    Vector out(rhs.size());
    solve_into(rhs, out);
    return out;
}

Vector solve(const Factorization& f, std::span<const double> rhs) { return f.solve(rhs); }

}  // namespace asode
