#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sublln::detail {
namespace {

constexpr unsigned kMaxDepth = 25;
constexpr double kRelTol = 1e-13;

double gauss_kronrod(const Integrand& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, kMaxDepth,
                                                                      kRelTol);
}

}  // namespace

double integrate(const Integrand& f, double a, double b, std::span<const double> splits) {
  std::vector<double> cuts{a};
  for (double s : splits) {
    if (s > a && s < b) cuts.push_back(s);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) total += gauss_kronrod(f, cuts[i - 1], cuts[i]);
  return total;
}

double integrate_to_infinity(const Integrand& f, double a, double beta,
                             std::span<const double> splits) {
  double knee = std::max(a, 1.0);
  for (double s : splits) knee = std::max(knee, s);
  knee *= 2.0;
  const double head = integrate(f, a, knee, splits);

  const double k = 1.0 / (beta - 1.0);
  const Integrand mapped = [&](double v) {
    const double t = knee * std::pow(v, -k);
    if (!std::isfinite(t)) return 0.0;
    const double jac = k * t / v;
    const double value = f(t) * jac;
    return std::isfinite(value) ? value : 0.0;
  };
  return head + gauss_kronrod(mapped, 0.0, 1.0);
}

}  // namespace sublln::detail
