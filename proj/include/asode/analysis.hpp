#pragma once

// Linear stability of the scheme on y' = lambda1 y + lambda2 y, with
// x = lambda1 h (explicit part) and z = lambda2 h (implicit part).

#include <complex>
#include <span>
#include <vector>

#include "asode/coefficients.hpp"

namespace asode {

using Complex = std::complex<double>;

struct StabilityPoint {
    Complex x;
    Complex z;
    Complex R;
};

/// R(x, z) of the main scheme, obtained by running one step with y0 = 1,
/// h = 1, phi = x y, g = z y and exact B = z. Throws PoleProximity when
/// |1 - a z| <= 1e-12.
[[nodiscard]] Complex eval_R(Complex x, Complex z, const SchemeCoefficients& c);

/// R2(x, z) of the embedded scheme from its closed rational form with
/// denominator (1 - a z)^4. Throws PoleProximity.
[[nodiscard]] Complex eval_R2(Complex x, Complex z, const SchemeCoefficients& c,
                              const EmbeddedCoefficients& e);

enum class StabilityTarget { Main, Embedded };

/// |R| (or |R2|) on the tensor grid; rows follow z_grid, columns x_grid.
/// Cells at the pole hold +inf.
struct StabilityScan {
    std::vector<Complex> x_grid;
    std::vector<Complex> z_grid;
    std::vector<double> magnitude;  // row-major, z_grid.size() x x_grid.size()

    [[nodiscard]] double at(std::size_t zi, std::size_t xi) const {
        return magnitude[zi * x_grid.size() + xi];
    }
    [[nodiscard]] bool stable(std::size_t zi, std::size_t xi) const { return at(zi, xi) <= 1.0; }
};

[[nodiscard]] StabilityScan stability_region_scan(std::span<const Complex> x_grid,
                                                  std::span<const Complex> z_grid,
                                                  StabilityTarget which,
                                                  const SchemeCoefficients& c,
                                                  const EmbeddedCoefficients& e);

}  // namespace asode
