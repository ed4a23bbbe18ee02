#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "varsample/grid.hpp"
#include "varsample/kernel1d.hpp"
#include "varsample/kernelnd.hpp"
#include "varsample/test_function.hpp"

namespace varsample {

// Axis indices in this API are 0-based.

enum class InnerIntegral {
  automatic,   // exact axis integral when the function provides one, quadrature otherwise
  quadrature,  // always adaptive Simpson
};

struct EvalOptions {
  // Absolute lattice-tail budget for decaying kernels, relative to the bound of f.
  double truncation_eps = 1e-2;
  InnerIntegral inner = InnerIntegral::automatic;
  // Absolute tolerance of the inner Kantorovich integrals.
  double inner_tol = 1e-10;
};

// Averaged product kernel built from N base kernels and a window width m.
class AveragedFamily {
 public:
  AveragedFamily(std::vector<Kernel1D> bases, int m);

  std::size_t dimension() const { return bases_.size(); }
  int m() const { return m_; }
  const std::vector<Kernel1D>& bases() const { return bases_; }
  // prod_i avg(chi_i, m)
  const ProductKernelND& averaged() const { return averaged_; }
  // Kernel carried by the Kantorovich operators in the derivative identity:
  // averaged components on every axis except `axis`, which keeps its base kernel.
  ProductKernelND kantorovich_kernel(std::size_t axis) const;
  // Product of base L1 norms.
  double base_l1_product() const;

 private:
  std::vector<Kernel1D> bases_;
  int m_;
  ProductKernelND averaged_;
};

// A configured operator that can be evaluated pointwise or on a grid. Pointwise
// and grid evaluation return bitwise identical values.
class Operator {
 public:
  // (S_w f)(t) = sum_k f(k/w) chi(wt - k)
  static Operator sampling(TestFunction f, ProductKernelND kernel, double w, EvalOptions options = {});
  // Sampling series with the averaged product kernel of the family.
  static Operator averaged(TestFunction f, AveragedFamily family, double w, EvalOptions options = {});
  // (K_{w,j} f)(t) = sum_k [w int_{k_j/w}^{(k_j+1)/w} f(k'/w, u) du] chi(wt - k)
  static Operator kantorovich(TestFunction f, ProductKernelND kernel, double w, std::size_t axis,
                              EvalOptions options = {});
  // Analytic partial derivative of the averaged sampling series along axis.
  static Operator averaged_partial(TestFunction f, AveragedFamily family, double w, std::size_t axis,
                                   EvalOptions options = {});
  // (1/m) sum_{i=1}^m (K_{w,axis} g)(t'_axis, t_axis - (m - 2(i-1))/(2w)) with the
  // family's Kantorovich kernel.
  static Operator shifted_kantorovich(TestFunction g, AveragedFamily family, double w, std::size_t axis,
                                      EvalOptions options = {});

  std::size_t dimension() const;
  double operator()(std::span<const double> t) const;
  // Evaluates at every grid node. threads <= 1 runs inline; results do not depend on threads.
  GridFunction on_grid(const GridSpec& grid, int threads = 1) const;

  struct Impl;

 private:
  explicit Operator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

double sampling_series(const TestFunction& f, const ProductKernelND& kernel, double w, std::span<const double> t,
                       EvalOptions options = {});
double averaged_sampling_series(const TestFunction& f, const AveragedFamily& family, double w,
                                std::span<const double> t, EvalOptions options = {});
double averaged_sampling_series(const TestFunction& f, const std::vector<Kernel1D>& bases, double w, int m,
                                std::span<const double> t, EvalOptions options = {});
double kantorovich(const TestFunction& f, const ProductKernelND& kernel, double w, std::size_t axis,
                   std::span<const double> t, EvalOptions options = {});
double averaged_series_partial(const TestFunction& f, const AveragedFamily& family, double w,
                               std::span<const double> t, std::size_t axis, EvalOptions options = {});
double averaged_series_partial(const TestFunction& f, const std::vector<Kernel1D>& bases, double w, int m,
                               std::span<const double> t, std::size_t axis, EvalOptions options = {});
double kantorovich_shifted_average(const TestFunction& g, const AveragedFamily& family, double w,
                                   std::span<const double> t, std::size_t axis, EvalOptions options = {});
double kantorovich_shifted_average(const TestFunction& g, const std::vector<Kernel1D>& bases, double w, int m,
                                   std::span<const double> t, std::size_t axis, EvalOptions options = {});

// (2w/m) * M * prod A_chi_i: bound on |d/dt_j of the averaged series|.
double partial_derivative_bound(const TestFunction& f, const AveragedFamily& family, double w);

}  // namespace varsample
