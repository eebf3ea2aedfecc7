#pragma once

#include <algorithm>
#include <cmath>

namespace vfsk::detail {

// Frozen-coefficient Ornstein-Uhlenbeck step of length h with rate kappa,
// x = kappa h. With X = int e^{-kappa (h - s)} dW_s over the step,
// Cov(X, dW) = c1 and Var(X | dW) = h f(x), where
// f(x) = (1 - e^{-2x}) / (2x) - ((1 - e^{-x}) / x)^2.
inline double ou_conditional_factor(double x) noexcept {
    if (x < 0.1) {
        return x * x *
               (1.0 / 12.0 + x * (-1.0 / 12.0 + x * (17.0 / 360.0 + x * (-7.0 / 360.0 + x * 43.0 / 6720.0))));
    }
    const double a = -std::expm1(-2.0 * x) / (2.0 * x);
    const double b = -std::expm1(-x) / x;
    return std::max(0.0, a - b * b);
}

struct OuStep {
    double decay;    // e^{-x}
    double c1;       // (1 - e^{-x}) / kappa
    double cond_sd;  // sqrt(h f(x))

    OuStep(double kappa, double h) noexcept
        : decay(std::exp(-kappa * h)),
          c1(-std::expm1(-kappa * h) / kappa),
          cond_sd(std::sqrt(h * ou_conditional_factor(kappa * h))) {}

    double draw(double dw, double z, double h) const noexcept { return (c1 / h) * dw + cond_sd * z; }
};

}  // namespace vfsk::detail
