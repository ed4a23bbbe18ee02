#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "varsample/kernel1d.hpp"
#include "varsample/operators.hpp"
#include "varsample/test_function.hpp"
#include "varsample/variation.hpp"

namespace varsample {

// Gray levels in row-major order. Pixel (i, j), 1-based, is column i of row j
// and covers (i-1, i] x (j-1, j] in the plane.
struct ImageRaster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> pixels;

  ImageRaster() = default;
  ImageRaster(std::size_t width, std::size_t height, std::uint32_t maxval, std::uint16_t fill = 0);

  std::uint16_t& at(std::size_t col, std::size_t row) { return pixels[row * width + col]; }
  std::uint16_t at(std::size_t col, std::size_t row) const { return pixels[row * width + col]; }
  void validate() const;

  bool operator==(const ImageRaster&) const = default;
};

std::string encode_pgm(const ImageRaster& raster);
ImageRaster decode_pgm(std::span<const unsigned char> bytes);
ImageRaster read_pgm(const std::filesystem::path& path);
void write_pgm(const ImageRaster& raster, const std::filesystem::path& path);

// Piecewise-constant I_A, 0 outside [0, width] x [0, height].
TestFunction image_function(const ImageRaster& raster);

// Averaged sampling series of I_A sampled at the cell centers of an
// out_width x out_height grid over [0, width] x [0, height], clamped and rounded.
ImageRaster smooth_image(const ImageRaster& raster, const std::vector<Kernel1D>& bases, double w, int m,
                         std::size_t out_width, std::size_t out_height, EvalOptions options = {}, int threads = 1);
// Samples of the averaged series on the node grid, unrounded.
GridFunction smooth_image_grid(const ImageRaster& raster, const std::vector<Kernel1D>& bases, double w, int m,
                               const GridSpec& grid, EvalOptions options = {}, int threads = 1);

// Jump masses of I_A per pixel-aligned cell, the one-pixel ring of background
// included; per cell the Euclidean norm of its left and lower jumps.
VariationReport image_variation(const ImageRaster& raster);
// phi_1 + phi_2: the exact variation of I_A.
double image_jump_variation(const ImageRaster& raster);

namespace images {

ImageRaster checkerboard(std::size_t width, std::size_t height, std::size_t square, std::uint16_t dark,
                         std::uint16_t light, std::uint32_t maxval = 255);
ImageRaster disk(std::size_t width, std::size_t height, double radius, std::uint16_t level,
                 std::uint32_t maxval = 255);
// Left-to-right linear ramp from 0 to maxval.
ImageRaster ramp(std::size_t width, std::size_t height, std::uint32_t maxval = 255);

}  // namespace images

}  // namespace varsample
