#include "varsample/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "varsample/errors.hpp"
#include "varsample/quadrature.hpp"

namespace varsample {

ImageRaster::ImageRaster(std::size_t w, std::size_t h, std::uint32_t mv, std::uint16_t fill)
    : width(w), height(h), maxval(mv), pixels(w * h, fill) {
  validate();
}

void ImageRaster::validate() const {
  if (width == 0 || height == 0) throw DomainError("image dimensions must be positive");
  if (maxval == 0 || maxval > 65535) throw DomainError("maxval must lie in [1, 65535]");
  if (pixels.size() != width * height) throw DomainError("pixel count does not match width * height");
  for (auto p : pixels) {
    if (p > maxval) throw DomainError("pixel level exceeds maxval");
  }
}

std::string encode_pgm(const ImageRaster& raster) {
  raster.validate();
  std::string out = "P5\n" + std::to_string(raster.width) + " " + std::to_string(raster.height) + "\n" +
                    std::to_string(raster.maxval) + "\n";
  const bool wide = raster.maxval > 255;
  out.reserve(out.size() + raster.pixels.size() * (wide ? 2 : 1));
  for (auto p : raster.pixels) {
    if (wide) out.push_back(static_cast<char>(p >> 8));
    out.push_back(static_cast<char>(p & 0xff));
  }
  return out;
}

namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const unsigned char> bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const { return pos_; }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      const unsigned char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t number(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
      if (v > 1'000'000'000ULL) throw FormatError(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      throw FormatError(pos_ < bytes_.size() ? std::string("expected ") + what : std::string("header ends before ") + what,
                        start);
    }
    return v;
  }

  void single_space() {
    if (pos_ >= bytes_.size()) throw FormatError("header ends before pixel data", pos_);
    if (!std::isspace(bytes_[pos_])) throw FormatError("expected whitespace after maxval", pos_);
    ++pos_;
  }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_;
};

}  // namespace

ImageRaster decode_pgm(std::span<const unsigned char> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw FormatError("not a binary PGM (P5) file", 0);
  HeaderReader r(bytes, 2);
  const std::size_t width_at = r.pos();
  const auto width = r.number("width");
  const auto height = r.number("height");
  if (width == 0 || height == 0) throw FormatError("image dimensions must be positive", width_at);
  r.skip_space();
  const std::size_t maxval_at = r.pos();
  const auto maxval = r.number("maxval");
  if (maxval == 0 || maxval > 65535) throw FormatError("maxval out of range [1, 65535]", maxval_at);
  r.single_space();

  ImageRaster out;
  out.width = static_cast<std::size_t>(width);
  out.height = static_cast<std::size_t>(height);
  out.maxval = static_cast<std::uint32_t>(maxval);
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t count = out.width * out.height;
  std::size_t pos = r.pos();
  if (bytes.size() - pos < count * bpp) throw FormatError("truncated pixel data", bytes.size());
  out.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i, pos += bpp) {
    const std::uint32_t v = bpp == 2 ? (static_cast<std::uint32_t>(bytes[pos]) << 8) | bytes[pos + 1] : bytes[pos];
    if (v > maxval) throw FormatError("pixel level exceeds maxval", pos);
    out.pixels[i] = static_cast<std::uint16_t>(v);
  }
  return out;
}

ImageRaster read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  return decode_pgm(bytes);
}

void write_pgm(const ImageRaster& raster, const std::filesystem::path& path) {
  const std::string data = encode_pgm(raster);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("write error on '" + path.string() + "'");
}

TestFunction image_function(const ImageRaster& raster) {
  raster.validate();
  auto img = std::make_shared<const ImageRaster>(raster);
  const auto level = [img](long col, long row) -> double {
    if (col < 1 || row < 1 || col > static_cast<long>(img->width) || row > static_cast<long>(img->height)) return 0.0;
    return img->at(static_cast<std::size_t>(col - 1), static_cast<std::size_t>(row - 1));
  };
  const auto cell = [](double x) { return static_cast<long>(std::ceil(x)); };
  TestFunction f(
      "image", 2,
      [level, cell](std::span<const double> t) {
        if (!(t[0] > 0.0) || !(t[1] > 0.0)) return 0.0;
        return level(cell(t[0]), cell(t[1]));
      },
      static_cast<double>(raster.maxval));
  f.set_support(Box{{0.0, 0.0}, {static_cast<double>(raster.width), static_cast<double>(raster.height)}});
  const double extent[2] = {static_cast<double>(raster.width), static_cast<double>(raster.height)};
  f.set_axis_integral([level, cell, extent](std::span<const double> t, std::size_t axis, double a,
                                           double b) -> std::optional<double> {
    const std::size_t other = 1 - axis;
    if (!(t[other] > 0.0)) return 0.0;
    const long fixed = cell(t[other]);
    const double lo = std::max(a, 0.0);
    const double hi = std::min(b, extent[axis]);
    if (!(hi > lo)) return 0.0;
    CompensatedSum acc;
    for (long c = static_cast<long>(std::floor(lo)) + 1; static_cast<double>(c - 1) < hi; ++c) {
      const double len = std::min(hi, static_cast<double>(c)) - std::max(lo, static_cast<double>(c - 1));
      if (len <= 0.0) continue;
      acc += len * (axis == 0 ? level(c, fixed) : level(fixed, c));
    }
    return acc.value();
  });
  return f;
}

GridFunction smooth_image_grid(const ImageRaster& raster, const std::vector<Kernel1D>& bases, double w, int m,
                               const GridSpec& grid, EvalOptions options, int threads) {
  if (bases.size() != 2) throw DomainError("image smoothing needs two base kernels");
  const auto op = Operator::averaged(image_function(raster), AveragedFamily(bases, m), w, options);
  return op.on_grid(grid, threads);
}

ImageRaster smooth_image(const ImageRaster& raster, const std::vector<Kernel1D>& bases, double w, int m,
                         std::size_t out_width, std::size_t out_height, EvalOptions options, int threads) {
  raster.validate();
  if (out_width == 0 || out_height == 0) throw DomainError("output dimensions must be positive");
  const double hx = static_cast<double>(raster.width) / static_cast<double>(out_width);
  const double hy = static_cast<double>(raster.height) / static_cast<double>(out_height);
  GridSpec grid{{0.5 * hx, 0.5 * hy}, {hx, hy}, {out_width, out_height}};
  const GridFunction values = smooth_image_grid(raster, bases, w, m, grid, options, threads);
  ImageRaster out(out_width, out_height, raster.maxval);
  const double top = static_cast<double>(raster.maxval);
  for (std::size_t col = 0; col < out_width; ++col) {
    for (std::size_t row = 0; row < out_height; ++row) {
      const double v = std::clamp(values[col * out_height + row], 0.0, top);
      out.at(col, row) = static_cast<std::uint16_t>(std::round(v));
    }
  }
  return out;
}

VariationReport image_variation(const ImageRaster& raster) {
  raster.validate();
  const long W = static_cast<long>(raster.width);
  const long H = static_cast<long>(raster.height);
  const auto level = [&](long col, long row) -> double {
    if (col < 1 || row < 1 || col > W || row > H) return 0.0;
    return raster.at(static_cast<std::size_t>(col - 1), static_cast<std::size_t>(row - 1));
  };
  CompensatedSum phi1, phi2, combined;
  for (long row = 1; row <= H + 1; ++row) {
    for (long col = 1; col <= W + 1; ++col) {
      const double here = level(col, row);
      const double jx = std::abs(here - level(col - 1, row));
      const double jy = std::abs(here - level(col, row - 1));
      phi1 += jx;
      phi2 += jy;
      combined += std::hypot(jx, jy);
    }
  }
  VariationReport report;
  report.phi = {phi1.value(), phi2.value()};
  report.combined = combined.value();
  report.granularity = {raster.width + 1, raster.height + 1};
  report.is_lower_bound = true;
  return report;
}

double image_jump_variation(const ImageRaster& raster) {
  const auto r = image_variation(raster);
  return r.phi[0] + r.phi[1];
}

namespace images {

ImageRaster checkerboard(std::size_t width, std::size_t height, std::size_t square, std::uint16_t dark,
                         std::uint16_t light, std::uint32_t maxval) {
  if (square == 0) throw DomainError("checkerboard square size must be positive");
  ImageRaster img(width, height, maxval);
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) img.at(col, row) = ((col / square + row / square) % 2) ? light : dark;
  }
  img.validate();
  return img;
}

ImageRaster disk(std::size_t width, std::size_t height, double radius, std::uint16_t level, std::uint32_t maxval) {
  ImageRaster img(width, height, maxval);
  const double cx = 0.5 * static_cast<double>(width);
  const double cy = 0.5 * static_cast<double>(height);
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      const double x = static_cast<double>(col) + 0.5 - cx;
      const double y = static_cast<double>(row) + 0.5 - cy;
      if (x * x + y * y <= radius * radius) img.at(col, row) = level;
    }
  }
  img.validate();
  return img;
}

ImageRaster ramp(std::size_t width, std::size_t height, std::uint32_t maxval) {
  ImageRaster img(width, height, maxval);
  const double span = width > 1 ? static_cast<double>(width - 1) : 1.0;
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      img.at(col, row) = static_cast<std::uint16_t>(std::round(static_cast<double>(maxval) * static_cast<double>(col) / span));
    }
  }
  return img;
}

}  // namespace images

}  // namespace varsample
