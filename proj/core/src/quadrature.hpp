#pragma once

#include <functional>
#include <span>

namespace sublln::detail {

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b], split at the given interior points.
double integrate(const Integrand& f, double a, double b, std::span<const double> splits = {});

// Integral over [a, inf) of a function that decays like t^(-beta), beta > 1.
// [a, knee] is handled by integrate(); the remainder is mapped onto (0, 1] by
// t = knee * v^(-1/(beta-1)), which keeps the integrand bounded at v -> 0.
double integrate_to_infinity(const Integrand& f, double a, double beta,
                             std::span<const double> splits = {});

}  // namespace sublln::detail
