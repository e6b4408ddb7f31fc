#pragma once

// Coefficients for the default root as printed with 14 significant digits,
// and the four roots of the design quartic.

namespace published {

inline constexpr double p[6] = {-0.48695861160293, 0.57281606248213, 1.32112526220103,
                                -0.09105090402502, 0.42438423735836, 0.48695861160293};
inline constexpr double alpha4[3] = {0.0, 0.57281606248213, 0.42718393751787};
inline constexpr double beta4[3] = {0.0, 0.57281606248213, -0.18882050162852};
inline constexpr double beta6[5] = {0.0, 0.0, 2.51499368618962, -0.022405291307077,
                                    0.91371881359685};
inline constexpr double gamma = -2.891895009239397;
inline constexpr double r[5] = {0.0, 0.57281606248213, -0.87491444843356, 2.82745609901376,
                                -1.52535771306233};
inline constexpr double roots[4] = {0.10643879214266, 0.22042841025921, 0.57281606248213,
                                    3.1003167351160};

}  // namespace published
