#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "varsample/kernel1d.hpp"

namespace varsample {

// Tensor product of N univariate kernels, possibly of different types per axis.
class ProductKernelND {
 public:
  explicit ProductKernelND(std::vector<Kernel1D> components);
  // Same kernel on every axis.
  ProductKernelND(const Kernel1D& component, std::size_t dimension);

  // "prod:<s1>,...,<sN>" (dimension must match when nonzero) or a single 1D
  // spec replicated across `dimension` axes.
  static ProductKernelND parse(std::string_view spec, std::size_t dimension);

  std::size_t dimension() const { return components_.size(); }
  const std::vector<Kernel1D>& components() const { return components_; }
  const Kernel1D& component(std::size_t i) const { return components_.at(i); }

  double operator()(std::span<const double> t) const;

  bool is_compact() const;
  // Per-axis half widths of the support box; ConfigError unless compact.
  std::vector<double> support_half_widths() const;
  // Largest half width over axes (the T of a [-T, T]^N box).
  double support_radius() const;

  double l1_norm_bound() const;   // product of component L1 norms
  double abs_sum_bound() const;   // product of component A_chi
  std::string name() const;

  // Bound on sum over k outside the box {|u_i - k_i| <= radius} of |kernel(u - k)|.
  double lattice_tail_bound(int radius) const;
  // Smallest radius whose lattice_tail_bound is <= budget (support radius when compact).
  int truncation_radius(double budget) const;

 private:
  std::vector<Kernel1D> components_;
};

double product_eval(const ProductKernelND& kernel, std::span<const double> t);

// Residual of the N-dimensional partition of unity at each probe, computed as
// a product of per-axis lattice sums, plus tail allowance.
double check_pu_nd(const ProductKernelND& kernel, std::span<const std::vector<double>> probes, int radius);
// Max over probes of the truncated absolute lattice sum, plus tail allowance.
double abs_sum_nd(const ProductKernelND& kernel, std::span<const std::vector<double>> probes, int radius);

}  // namespace varsample
