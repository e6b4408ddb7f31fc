#include <cmath>

#include "asode/errors.hpp"
#include "asode/linalg.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace asode;

namespace {

DenseMatrix random_matrix(std::size_t n, double lo, double hi) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = oracle::uniform(lo, hi);
    return m;
}

Vector random_vector(std::size_t n) {
    Vector v(n);
    for (auto& x : v) x = oracle::uniform(-1.0, 1.0);
    return v;
}

double max_diff(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

oracle::Mat d_matrix(const DenseMatrix& b, double ah) {
    const std::size_t n = b.size();
    oracle::Mat d(n, oracle::Vec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = (i == j ? 1.0 : 0.0) - ah * b(i, j);
    return d;
}

}  // namespace

TEST_CASE("zero B gives the identity") {
    const Factorization f = factor(DenseJacobian{DenseMatrix(3)}, 0.7);
    const Vector x = solve(f, Vector{1.0, -2.0, 3.0});
    CHECK(max_diff(x, {1.0, -2.0, 3.0}) == 0.0);
}

TEST_CASE("scalar system") {
    // D = 1 - 0.001 * (-1000) = 2
    const Factorization f = factor(DiagonalJacobian{{-1000.0}}, 0.001);
    CHECK(solve(f, Vector{3.0})[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(f.is_diagonal());
}

TEST_CASE("diagonal B") {
    const Factorization f = factor(DiagonalJacobian{{-1.0, -3.0}}, 1.0);
    const Vector x = solve(f, Vector{2.0, 4.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("random 5x5 round trip") {
    const DenseMatrix b = random_matrix(5, -10.0, 10.0);
    const double ah = 0.05;
    const Factorization f = factor(DenseJacobian{b}, ah);
    const Vector rhs = random_vector(5);
    const Vector x = solve(f, rhs);
    // D x = x - ah B x
    const Vector bx = b.multiply(x);
    Vector dx(5);
    for (std::size_t i = 0; i < 5; ++i) dx[i] = x[i] - ah * bx[i];
    CHECK(max_diff(dx, rhs) < 1e-10);
}

TEST_CASE("3x3 against complete pivoting") {
    DenseMatrix b(3);
    const double vals[3][3] = {{-4.0, 1.0, 2.0}, {0.5, -7.0, 1.0}, {3.0, 2.0, -1.0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b(i, j) = vals[i][j];
    const Vector rhs = {1.0, 2.0, 3.0};
    const Vector x = solve(factor(DenseJacobian{b}, 0.3), rhs);
    const oracle::Vec ref = oracle::full_pivot_solve(d_matrix(b, 0.3), rhs);
    CHECK(max_diff(x, ref) < 1e-12);
}

TEST_CASE("property: random dense systems match the oracle") {
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
        const DenseMatrix b = random_matrix(n, -100.0, 100.0);
        const double ah = oracle::uniform(1e-4, 1e-2);
        const Vector rhs = random_vector(n);
        Factorization f;
        try {
            f = factor(DenseJacobian{b}, ah);
        } catch (const SingularMatrix&) {
            continue;
        }
        const oracle::Vec ref = oracle::full_pivot_solve(d_matrix(b, ah), rhs);
        double scale = 1.0;
        for (double r : ref) scale = std::max(scale, std::abs(r));
        INFO("trial " << trial);
        CHECK(max_diff(solve(f, rhs), ref) <= 1e-9 * scale);
    }
}

TEST_CASE("diagonal and dense paths agree") {
    const Vector diag = {-5.0, -0.1, 2.0, -300.0};
    DenseMatrix dense(4);
    for (std::size_t i = 0; i < 4; ++i) dense(i, i) = diag[i];
    const Vector rhs = random_vector(4);
    const Vector a = solve(factor(DiagonalJacobian{diag}, 0.01), rhs);
    const Vector b = solve(factor(DenseJacobian{dense}, 0.01), rhs);
    CHECK(max_diff(a, b) < 1e-15);
}

TEST_CASE("singular D is reported") {
    // 1 - 1 * 1 = 0
    CHECK_THROWS_AS((void)factor(DiagonalJacobian{{1.0, -1.0}}, 1.0), SingularMatrix);
    DenseMatrix b(2);
    b(0, 0) = 1.0;
    b(0, 1) = 1.0;
    b(1, 0) = 1.0;
    b(1, 1) = 1.0;
    // I - 0.5 * ones is singular
    CHECK_THROWS_AS((void)factor(DenseJacobian{b}, 0.5), SingularMatrix);
}

TEST_CASE("dimension mismatch is reported") {
    const Factorization f = factor(DiagonalJacobian{{-1.0, -2.0}}, 0.1);
    CHECK_THROWS_AS((void)solve(f, Vector{1.0, 2.0, 3.0}), DimensionMismatch);
}

TEST_CASE("solving in place matches a separate output") {
    const DenseMatrix b = random_matrix(4, -3.0, 3.0);
    const Factorization f = factor(DenseJacobian{b}, 0.1);
    Vector v = random_vector(4);
    const Vector expected = solve(f, v);
    f.solve_into(v, v);
    CHECK(max_diff(v, expected) == 0.0);
}
