#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "varsample/grid.hpp"
#include "varsample/test_function.hpp"

namespace varsample {

struct VariationReport {
  std::vector<double> phi;  // directional components over the whole box
  double combined = 0.0;    // sum over cells of the per-cell Euclidean norms
  std::vector<std::size_t> granularity;
  bool is_lower_bound = true;
};

// sum |s[i+1] - s[i]|
double jordan_variation_1d(std::span<const double> samples);

// Tonelli variation of sampled data over the box spanned by the grid nodes,
// partitioned into cells_per_axis[a] equal cells along axis a. Sections are
// integrated with the trapezoid rule over the node grid.
VariationReport tonelli_variation(const GridFunction& gf, std::span<const std::size_t> cells_per_axis);
// Single cell.
VariationReport tonelli_variation(const GridFunction& gf);

struct AcVariation {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Samples of the N gradient components at the nodes of a midpoint grid.
using GradientSampler = std::function<std::vector<GridFunction>(const GridSpec&)>;

// int_box |grad f| by the composite midpoint rule with n cells per axis; the
// error estimate comes from the same rule at n/2.
AcVariation ac_variation(const GradientSampler& gradient, const Box& box, std::size_t n = 256);
AcVariation ac_variation(const TestFunction& f, const Box& box, std::size_t n = 256);
// Midpoint sum over precomputed gradient components on one grid.
double ac_variation(std::span<const GridFunction> components);

// max - min of f over probes^N points of the cube of side delta centered at x.
double omega1(const TestFunction& f, std::span<const double> x, double delta, std::size_t probes = 17);

// L^p norm (p in {1, 2}) of x -> omega1(f, x, delta) over box, midpoint rule
// with n cells per axis.
double tau1_norm(const TestFunction& f, double delta, int p, const Box& box, std::size_t n = 64,
                 std::size_t probes = 17);

// (sum |a - b|^p * cell volume)^(1/p), p in {1, 2}
double lp_error(const GridFunction& a, const GridFunction& b, int p);

}  // namespace varsample
