#pragma once

#include <cstddef>
#include <functional>

namespace varsample {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  // Subintervals accepted only because max_depth was reached.
  std::size_t depth_limited = 0;
};

// Adaptive Simpson with Richardson correction. The tolerance is halved on each
// split; a leaf that hits max_depth is accepted and its error estimate added
// to the total. Throws NumericError if the summed estimate exceeds abs_tol or
// the integrand returns a non-finite value.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-10, int max_depth = 40);

// Convenience wrapper returning only the value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 40);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace varsample
