#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace asode {

using Vector = std::vector<double>;

inline bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace asode
