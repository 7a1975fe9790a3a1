#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace oscnet {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      correction_ += (sum_ - t) + x;
    } else {
      correction_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;      // standard error of the mean
  double stddev = 0.0;  // sample standard deviation
  std::size_t count = 0;
};

/// Mean and standard error of independent values, summed in order.
MeanEstimate mean_estimate(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// 95% Wilson score interval for k successes out of n.
struct Interval {
  double low = 0.0;
  double high = 0.0;
};
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

}  // namespace oscnet
