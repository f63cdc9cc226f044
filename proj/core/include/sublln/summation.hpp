#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace sublln {

/// Neumaier's compensated summation.
class NeumaierSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Fixed-shape pairwise reduction: the association order depends only on
/// values.size(), never on how the values were produced or by which thread.
[[nodiscard]] inline double pairwise_sum(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace sublln
