#pragma once

#include <cmath>
#include <cstddef>

namespace mcfqkd::detail {

// Sum and variance accumulator using shifted data and Neumaier compensation.
// The shift is the first pushed value, which keeps the sum of squares well
// conditioned when the spread is much smaller than the mean.
class RunningStats {
 public:
  void push(double v) {
    if (n_ == 0) shift_ = v;
    const double d = v - shift_;
    add(sum_, comp_, d);
    add(sumsq_, compsq_, d * d);
    ++n_;
  }

  std::size_t count() const { return n_; }

  double mean() const {
    if (n_ == 0) return 0.0;
    return shift_ + (sum_ + comp_) / static_cast<double>(n_);
  }

  // Unbiased sample variance.
  double variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double s = sum_ + comp_;
    const double v = ((sumsq_ + compsq_) - s * s / n) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
  }

  double std_err() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n_));
  }

 private:
  static void add(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  std::size_t n_ = 0;
  double shift_ = 0.0;
  double sum_ = 0.0, comp_ = 0.0;
  double sumsq_ = 0.0, compsq_ = 0.0;
};

}  // namespace mcfqkd::detail
