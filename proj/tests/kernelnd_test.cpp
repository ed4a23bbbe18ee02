#include <doctest.h>

#include <cmath>

#include "varsample/errors.hpp"
#include "varsample/kernelnd.hpp"

using namespace varsample;

namespace {

std::vector<std::vector<double>> probes2(int n) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.push_back({(i + 0.37) / n, (j + 0.11) / n});
  }
  return out;
}

// Brute-force sum over the integer box |k_i| <= R of |kernel(u - k)|.
double box_abs_sum(const ProductKernelND& k, const std::vector<double>& u, int R) {
  double s = 0.0;
  for (int a = -R; a <= R; ++a) {
    for (int b = -R; b <= R; ++b) {
      const double p[2] = {u[0] - a, u[1] - b};
      s += std::abs(k(p));
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("kernelnd") {

TEST_CASE("product evaluation") {
  const ProductKernelND m2(Kernel1D::bspline(2), 2);
  const double origin[2] = {0.0, 0.0};
  CHECK(product_eval(m2, origin) == 1.0);
  const ProductKernelND af(Kernel1D::fejer().averaged(1).as_kernel(), 2);
  const double a = averaged_eval(Kernel1D::fejer(), 1, 0.0);
  CHECK(af(origin) == doctest::Approx(a * a).epsilon(1e-15));
  const ProductKernelND mixed({Kernel1D::bspline(2), Kernel1D::bspline(4)});
  const double t[2] = {0.3, -1.1};
  CHECK(mixed(t) == eval_bspline(2, 0.3) * eval_bspline(4, -1.1));
  const double far[2] = {0.1, 2.01};
  CHECK(mixed(far) == 0.0);
  const double out[2] = {-1.0000001, 0.0};
  CHECK(m2(out) == 0.0);
}

TEST_CASE("dimension mismatch") {
  const ProductKernelND m2(Kernel1D::bspline(2), 2);
  const double t3[3] = {0, 0, 0};
  CHECK_THROWS_AS(m2(t3), DomainError);
  CHECK_THROWS_AS(ProductKernelND(std::vector<Kernel1D>{}), DomainError);
}

TEST_CASE("partition of unity in 2D") {
  const auto probes = probes2(24);
  CHECK(check_pu_nd(ProductKernelND(Kernel1D::bspline(2), 2), probes, 2) < 1e-12);
  const ProductKernelND avg({Kernel1D::bspline(2).averaged(1).as_kernel(), Kernel1D::bspline(3).averaged(1).as_kernel()});
  const ProductKernelND plain({Kernel1D::bspline(3), Kernel1D::bspline(4)});
  CHECK(check_pu_nd(avg, probes, 2) < 1e-12);
  CHECK(check_pu_nd(plain, probes, 2) < 1e-12);
}

TEST_CASE("averaged fejer in 2D with a tail budget") {
  const ProductKernelND af(Kernel1D::fejer().averaged(1).as_kernel(), 2);
  const int radius = af.truncation_radius(1e-6);
  CHECK(af.lattice_tail_bound(radius) <= 1e-6);
  const std::vector<std::vector<double>> probes{{0.0, 0.0}, {0.5, 0.25}, {0.9, 0.7}};
  CHECK(check_pu_nd(af, probes, radius) < 1e-4);
}

TEST_CASE("absolute sum factorizes") {
  const ProductKernelND k({Kernel1D::bspline(3).averaged(2).as_kernel(), Kernel1D::bspline(2)});
  const auto probes = probes2(5);
  double worst = 0.0;
  for (const auto& u : probes) worst = std::max(worst, box_abs_sum(k, u, 4));
  CHECK(abs_sum_nd(k, probes, 4) == doctest::Approx(worst).epsilon(1e-10));
  const auto wiggle = Kernel1D::custom(
      "wiggle", [](double x) { return eval_bspline(4, x) * (1.0 - 1.5 * x * x); }, CompactSupport{2.0});
  const ProductKernelND s({wiggle, Kernel1D::bspline(3)});
  double ws = 0.0;
  for (const auto& u : probes) ws = std::max(ws, box_abs_sum(s, u, 3));
  CHECK(abs_sum_nd(s, probes, 3) == doctest::Approx(ws).epsilon(1e-10));
}

TEST_CASE("support and norms") {
  const ProductKernelND k({Kernel1D::bspline(2), Kernel1D::bspline(3).averaged(2).as_kernel()});
  CHECK(k.is_compact());
  const auto hw = k.support_half_widths();
  CHECK(hw[0] == 1.0);
  CHECK(hw[1] == 2.5);
  CHECK(k.support_radius() == 2.5);
  CHECK(k.l1_norm_bound() == doctest::Approx(1.0).epsilon(1e-12));
  const ProductKernelND f(Kernel1D::fejer(), 2);
  CHECK_FALSE(f.is_compact());
  CHECK_THROWS_AS(f.support_half_widths(), ConfigError);
  CHECK(f.lattice_tail_bound(10) > f.lattice_tail_bound(100));
}

TEST_CASE("spec parsing") {
  const ProductKernelND p = ProductKernelND::parse("prod:bspline:2,avg:bspline:2:3", 2);
  CHECK(p.dimension() == 2);
  CHECK(p.component(1).half_width() == 2.5);
  CHECK(ProductKernelND::parse("bspline:3", 3).dimension() == 3);
  CHECK_THROWS_AS(ProductKernelND::parse("prod:bspline:2,bspline:3", 3), ConfigError);
  CHECK_THROWS_AS(ProductKernelND::parse("prod:", 2), ConfigError);
}

}  // TEST_SUITE
