#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace varsample {

double eval_sinc(double x);
double eval_fejer(double x);
// Central B-spline M_n via the truncated-power sum. M_1 is the indicator of
// (-1/2, 1/2] because (0)_+^0 is taken as 0.
double eval_bspline(int n, double x);
// r-th antiderivative of M_n (r = 1 or 2), anchored so it vanishes left of the support.
double bspline_antiderivative(int n, int r, double x);

// Zero outside [-half_width, half_width].
struct CompactSupport {
  double half_width = 0.0;
};

// Unbounded support. tail_bound(R) must bound both the tail mass
// int_{|x|>R} |k| and sup_u sum_{|u-k|>R} |k(u-k)|. tail_mass(R), when given,
// is a leading-order estimate of the tail mass used to correct truncated L1
// integrals.
struct DecayingSupport {
  std::function<double(double)> tail_bound;
  std::function<double(double)> tail_mass;
};

using Support = std::variant<CompactSupport, DecayingSupport>;

class AveragedKernel1D;

// Immutable handle to a univariate kernel. Cheap to copy; safe to share between threads.
class Kernel1D {
 public:
  struct Model;

  static Kernel1D fejer();
  static Kernel1D bspline(int order);
  static Kernel1D custom(std::string name, std::function<double(double)> evaluate, Support support,
                         bool nonnegative = false);
  // Parses "fejer", "bspline:<n>" or "avg:<base>:<m>".
  static Kernel1D parse(std::string_view spec);

  double operator()(double t) const;

  const std::string& name() const;
  const Support& support() const;
  bool is_compact() const;
  // Throws ConfigError for decaying kernels.
  double half_width() const;
  // Throws ConfigError for a decaying kernel without tail bound.
  double tail_bound(double radius) const;
  bool nonnegative() const;

  // Integral of |kernel| over the real line.
  double l1_norm() const;
  // Empirical A_chi: max over a probe grid in [0,1) of the absolute lattice sum,
  // plus tail allowance. Throws ConfigError when the kernel has no tail bound.
  double abs_sum_bound() const;

  // Exact r-th antiderivative when the kernel is piecewise polynomial.
  std::optional<double> antiderivative(int r, double x) const;
  std::optional<int> bspline_order() const;

  AveragedKernel1D averaged(int m) const;

  explicit Kernel1D(std::shared_ptr<const Model> model) : model_(std::move(model)) {}
  const Model& model() const { return *model_; }

 private:
  std::shared_ptr<const Model> model_;
};

// Sliding mean of a base kernel over a window of width m.
class AveragedKernel1D {
 public:
  AveragedKernel1D(Kernel1D base, int m);

  const Kernel1D& base() const { return base_; }
  int m() const { return m_; }
  double operator()(double t) const { return kernel_(t); }
  const Kernel1D& as_kernel() const { return kernel_; }
  double l1_norm() const { return kernel_.l1_norm(); }

 private:
  Kernel1D base_;
  int m_;
  Kernel1D kernel_;
};

// (1/m) * integral of base over [t - m/2, t + m/2].
double averaged_eval(const Kernel1D& base, int m, double t);

// Smallest integer radius whose tail bound is <= budget. Compact kernels return ceil(half width).
int radius_for_tail(const Kernel1D& kernel, double budget);

// max_u |sum_{|u-k| <= R} kernel(u - k) - 1| + tail allowance.
double check_partition_of_unity(const Kernel1D& kernel, std::span<const double> probes, int lattice_radius);
// max_u sum_{|u-k| <= R} |kernel(u - k)| + tail allowance.
double abs_sum_bound(const Kernel1D& kernel, std::span<const double> probes, int lattice_radius);

// Truncated lattice sums at one point, shared by the check routines above.
double lattice_sum(const Kernel1D& kernel, double u, int radius);
double lattice_abs_sum(const Kernel1D& kernel, double u, int radius);
// Tail allowance used with a lattice radius: 0 for a compact kernel covered by the radius.
double lattice_tail_allowance(const Kernel1D& kernel, int radius);

std::vector<double> uniform_probes(int count);

}  // namespace varsample
