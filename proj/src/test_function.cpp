#include "varsample/test_function.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "varsample/errors.hpp"
#include "varsample/kernel1d.hpp"

namespace varsample {

bool Box::contains(std::span<const double> t) const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (t[i] < lower[i] || t[i] > upper[i]) return false;
  }
  return true;
}

Box Box::expanded(double margin) const {
  Box out = *this;
  for (auto& v : out.lower) v -= margin;
  for (auto& v : out.upper) v += margin;
  return out;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
  return v;
}

TestFunction::TestFunction(std::string name, std::size_t dimension, Evaluate evaluate, double bound)
    : name_(std::move(name)), dimension_(dimension), evaluate_(std::move(evaluate)), bound_(bound) {
  if (dimension_ == 0) throw DomainError("test function dimension must be positive");
  if (!evaluate_) throw ConfigError("test function '" + name_ + "' has no evaluator");
  if (!(bound_ >= 0.0) || !std::isfinite(bound_)) throw DomainError("test function bound must be finite and >= 0");
}

TestFunction& TestFunction::set_gradient(Gradient gradient) {
  gradient_ = std::move(gradient);
  return *this;
}

TestFunction& TestFunction::set_support(Box box) {
  if (box.dimension() != dimension_) throw DomainError("support box dimension mismatch");
  support_ = std::move(box);
  return *this;
}

TestFunction& TestFunction::set_axis_integral(AxisIntegral integral) {
  axis_integral_ = std::move(integral);
  return *this;
}

double TestFunction::operator()(std::span<const double> t) const {
  if (t.size() != dimension_) throw DomainError("test function '" + name_ + "' evaluated with wrong dimension");
  return evaluate_(t);
}

void TestFunction::gradient(std::span<const double> t, std::span<double> out) const {
  if (!gradient_) throw ConfigError("test function '" + name_ + "' has no gradient");
  if (t.size() != dimension_ || out.size() != dimension_) throw DomainError("gradient dimension mismatch");
  gradient_(t, out);
}

std::vector<double> TestFunction::gradient(std::span<const double> t) const {
  std::vector<double> out(dimension_);
  gradient(t, out);
  return out;
}

std::optional<double> TestFunction::axis_integral(std::span<const double> t, std::size_t axis, double a,
                                                  double b) const {
  if (!axis_integral_) return std::nullopt;
  return axis_integral_(t, axis, a, b);
}

namespace functions {
namespace {

double hat(double x) { return std::max(0.0, 1.0 - std::abs(x)); }

double hat_slope(double x) {
  // One-sided average at the kinks.
  if (x <= -1.0 || x >= 1.0) return x == -1.0 ? 0.5 : (x == 1.0 ? -0.5 : 0.0);
  if (x == 0.0) return 0.0;
  return x < 0.0 ? 1.0 : -1.0;
}

// Scratch copy of a point with one coordinate replaced.
template <class Fn>
double with_coordinate(std::span<const double> t, std::size_t axis, double value, Fn&& fn) {
  if (t.size() <= 8) {
    std::array<double, 8> buf{};
    std::copy(t.begin(), t.end(), buf.begin());
    buf[axis] = value;
    return fn(std::span<const double>(buf.data(), t.size()));
  }
  std::vector<double> buf(t.begin(), t.end());
  buf[axis] = value;
  return fn(std::span<const double>(buf));
}

double parse_double(std::string_view text, std::string_view name) {
  std::string owned(text);
  char* end = nullptr;
  const double v = std::strtod(owned.c_str(), &end);
  if (owned.empty() || end != owned.c_str() + owned.size() || !std::isfinite(v)) {
    throw ConfigError("function spec '" + std::string(name) + "': bad number '" + owned + "'");
  }
  return v;
}

}  // namespace

TestFunction constant(std::size_t dim, double c) {
  TestFunction f("const:" + std::to_string(c), dim, [c](std::span<const double>) { return c; }, std::abs(c));
  f.set_gradient([](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); });
  f.set_axis_integral([c](std::span<const double>, std::size_t, double a, double b) -> std::optional<double> {
    return c * (b - a);
  });
  return f;
}

TestFunction coordinate(std::size_t dim, std::size_t axis, Box window) {
  if (axis >= dim) throw DomainError("coordinate: axis out of range");
  if (window.dimension() != dim) throw DomainError("coordinate: window dimension mismatch");
  const double bound = std::max(std::abs(window.lower[axis]), std::abs(window.upper[axis]));
  TestFunction f("coord:" + std::to_string(axis + 1), dim,
                 [axis, window](std::span<const double> t) { return window.contains(t) ? t[axis] : 0.0; }, bound);
  f.set_support(window);
  f.set_axis_integral([axis, window](std::span<const double> t, std::size_t along, double a,
                                     double b) -> std::optional<double> {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i != along && (t[i] < window.lower[i] || t[i] > window.upper[i])) return 0.0;
    }
    const double lo = std::max(a, window.lower[along]);
    const double hi = std::min(b, window.upper[along]);
    if (hi <= lo) return 0.0;
    if (along == axis) return 0.5 * (hi * hi - lo * lo);
    return t[axis] * (hi - lo);
  });
  return f;
}

TestFunction tensor_hat(std::size_t dim) {
  TestFunction f("hat", dim,
                 [](std::span<const double> t) {
                   double v = 1.0;
                   for (double x : t) v *= hat(x);
                   return v;
                 },
                 1.0);
  f.set_support(Box::cube(dim, -1.0, 1.0));
  f.set_gradient([](std::span<const double> t, std::span<double> out) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      double v = hat_slope(t[i]);
      for (std::size_t l = 0; l < t.size(); ++l) {
        if (l != i) v *= hat(t[l]);
      }
      out[i] = v;
    }
  });
  f.set_axis_integral([](std::span<const double> t, std::size_t along, double a, double b) -> std::optional<double> {
    double v = bspline_antiderivative(2, 1, b) - bspline_antiderivative(2, 1, a);
    for (std::size_t l = 0; l < t.size(); ++l) {
      if (l != along) v *= hat(t[l]);
    }
    return v;
  });
  return f;
}

TestFunction bump(std::size_t dim) {
  TestFunction f("bump", dim,
                 [](std::span<const double> t) {
                   double r2 = 0.0;
                   for (double x : t) r2 += x * x;
                   if (r2 >= 1.0) return 0.0;
                   return std::exp(1.0 - 1.0 / (1.0 - r2));
                 },
                 1.0);
  f.set_support(Box::cube(dim, -1.0, 1.0));
  f.set_gradient([](std::span<const double> t, std::span<double> out) {
    double r2 = 0.0;
    for (double x : t) r2 += x * x;
    if (r2 >= 1.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double s = 1.0 - r2;
    const double scale = -2.0 * std::exp(1.0 - 1.0 / s) / (s * s);
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = scale * t[i];
  });
  return f;
}

TestFunction step(std::size_t dim) {
  TestFunction f("step", dim, [](std::span<const double> t) { return t[0] > 0.0 ? 1.0 : 0.0; }, 1.0);
  f.set_axis_integral([](std::span<const double> t, std::size_t along, double a, double b) -> std::optional<double> {
    if (along == 0) return std::max(0.0, b - std::max(a, 0.0));
    return t[0] > 0.0 ? b - a : 0.0;
  });
  return f;
}

TestFunction partial_derivative(const TestFunction& f, std::size_t axis, std::optional<double> bound) {
  if (!f.has_gradient()) throw ConfigError("partial_derivative: '" + f.name() + "' has no gradient");
  if (axis >= f.dimension()) throw DomainError("partial_derivative: axis out of range");
  const std::size_t dim = f.dimension();
  auto eval = [f, axis, dim](std::span<const double> t) {
    std::array<double, 8> small{};
    std::vector<double> large;
    std::span<double> out;
    if (dim <= small.size()) {
      out = std::span<double>(small.data(), dim);
    } else {
      large.resize(dim);
      out = large;
    }
    f.gradient(t, out);
    return out[axis];
  };

  double m = 0.0;
  if (bound) {
    m = *bound;
  } else {
    // Sampled estimate of sup |df/dt_axis| over the support (or [-1,1]^N).
    const Box box = f.support_box().value_or(Box::cube(dim, -1.0, 1.0));
    const int per_axis = dim == 1 ? 4097 : (dim == 2 ? 257 : 17);
    std::vector<int> idx(dim, 0);
    std::vector<double> t(dim);
    while (true) {
      for (std::size_t i = 0; i < dim; ++i) {
        t[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * idx[i] / (per_axis - 1);
      }
      m = std::max(m, std::abs(eval(t)));
      std::size_t d = dim;
      while (d > 0 && ++idx[d - 1] == per_axis) idx[--d] = 0;
      if (d == 0) break;
    }
  }

  TestFunction g("d" + std::to_string(axis + 1) + "(" + f.name() + ")", dim, eval, m);
  if (f.support_box()) g.set_support(*f.support_box());
  g.set_axis_integral([f, axis](std::span<const double> t, std::size_t along, double a,
                                double b) -> std::optional<double> {
    if (along != axis) return std::nullopt;
    const auto at = [&f](std::span<const double> p) { return f(p); };
    return with_coordinate(t, axis, b, at) - with_coordinate(t, axis, a, at);
  });
  return g;
}

TestFunction parse(std::string_view name, std::size_t dim) {
  if (dim == 0) throw ConfigError("function '" + std::string(name) + "' needs a dimension");
  if (name == "hat") return tensor_hat(dim);
  if (name == "bump") return bump(dim);
  if (name == "step") return step(dim);
  if (name.starts_with("const:")) return constant(dim, parse_double(name.substr(6), name));
  if (name.starts_with("coord:")) {
    int axis = 0;
    const auto text = name.substr(6);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), axis);
    if (ec != std::errc() || ptr != text.data() + text.size() || axis < 1 || static_cast<std::size_t>(axis) > dim) {
      throw ConfigError("function spec '" + std::string(name) + "': axis must be in 1.." + std::to_string(dim));
    }
    return coordinate(dim, static_cast<std::size_t>(axis - 1), Box::cube(dim, -1.0, 1.0));
  }
  throw ConfigError("unknown function '" + std::string(name) + "'");
}

}  // namespace functions
}  // namespace varsample
