#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace varsample {

// Uniform node grid: node i on axis a sits at origin[a] + i * step[a].
struct GridSpec {
  std::vector<double> origin;
  std::vector<double> step;
  std::vector<std::size_t> count;

  // n nodes spanning [lo, hi] on every axis.
  static GridSpec nodes(std::size_t dim, double lo, double hi, std::size_t n);
  // n cell midpoints of a uniform partition of [lo, hi] on every axis.
  static GridSpec midpoints(std::size_t dim, double lo, double hi, std::size_t n);
  // "o,h,n;o,h,n;..." with one triple per axis.
  static GridSpec parse(std::string_view text);

  std::size_t dimension() const { return origin.size(); }
  std::size_t size() const;
  void validate() const;
  // Coordinates of the node with row-major flat index (last axis fastest).
  void point(std::size_t flat, std::span<double> out) const;
};

// Samples of a real function on a uniform grid, row-major with the last axis fastest.
class GridFunction {
 public:
  GridFunction(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::size_t dimension() const { return spec_.dimension(); }
  std::span<const double> origin() const { return spec_.origin; }
  std::span<const double> spacing() const { return spec_.step; }
  std::span<const std::size_t> shape() const { return spec_.count; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double at(std::span<const std::size_t> index) const;
  std::size_t flat_index(std::span<const std::size_t> index) const;
  std::size_t stride(std::size_t axis) const;
  double cell_volume() const;

  // Same grid with the given values.
  GridFunction with_values(std::vector<double> values) const { return GridFunction(spec_, std::move(values)); }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

}  // namespace varsample
