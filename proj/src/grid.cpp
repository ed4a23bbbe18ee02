#include "varsample/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "varsample/errors.hpp"

namespace varsample {

GridSpec GridSpec::nodes(std::size_t dim, double lo, double hi, std::size_t n) {
  if (n < 2) throw DomainError("GridSpec::nodes needs at least two nodes per axis");
  return {std::vector<double>(dim, lo), std::vector<double>(dim, (hi - lo) / static_cast<double>(n - 1)),
          std::vector<std::size_t>(dim, n)};
}

GridSpec GridSpec::midpoints(std::size_t dim, double lo, double hi, std::size_t n) {
  if (n < 1) throw DomainError("GridSpec::midpoints needs at least one cell per axis");
  const double h = (hi - lo) / static_cast<double>(n);
  return {std::vector<double>(dim, lo + 0.5 * h), std::vector<double>(dim, h), std::vector<std::size_t>(dim, n)};
}

GridSpec GridSpec::parse(std::string_view text) {
  GridSpec spec;
  std::string s(text);
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto end = s.find(';', pos);
    const std::string axis = s.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    const char* p = axis.c_str();
    char* q = nullptr;
    const double o = std::strtod(p, &q);
    if (q == p || *q != ',') throw ConfigError("grid spec '" + s + "': expected origin,step,count per axis");
    p = q + 1;
    const double h = std::strtod(p, &q);
    if (q == p || *q != ',') throw ConfigError("grid spec '" + s + "': expected origin,step,count per axis");
    p = q + 1;
    const long n = std::strtol(p, &q, 10);
    if (q == p || *q != '\0' || n < 1) throw ConfigError("grid spec '" + s + "': count must be a positive integer");
    spec.origin.push_back(o);
    spec.step.push_back(h);
    spec.count.push_back(static_cast<std::size_t>(n));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  spec.validate();
  return spec;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (auto c : count) n *= c;
  return n;
}

void GridSpec::validate() const {
  if (origin.empty()) throw DomainError("grid has no axes");
  if (step.size() != origin.size() || count.size() != origin.size()) throw DomainError("grid axis arrays differ in length");
  for (std::size_t i = 0; i < origin.size(); ++i) {
    if (!std::isfinite(origin[i]) || !std::isfinite(step[i]) || !(step[i] > 0.0)) {
      throw DomainError("grid spacing must be finite and positive");
    }
    if (count[i] == 0) throw DomainError("grid shape must be positive");
  }
}

void GridSpec::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = origin.size(); a-- > 0;) {
    const std::size_t i = flat % count[a];
    flat /= count[a];
    out[a] = origin[a] + static_cast<double>(i) * step[a];
  }
}

GridFunction::GridFunction(GridSpec spec, std::vector<double> values) : spec_(std::move(spec)), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.size()) {
    throw DomainError("grid function has " + std::to_string(values_.size()) + " values, shape needs " +
                      std::to_string(spec_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("grid function values must be finite");
  }
}

std::size_t GridFunction::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t a = axis + 1; a < spec_.count.size(); ++a) s *= spec_.count[a];
  return s;
}

std::size_t GridFunction::flat_index(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < spec_.count.size(); ++a) flat = flat * spec_.count[a] + index[a];
  return flat;
}

double GridFunction::at(std::span<const std::size_t> index) const { return values_[flat_index(index)]; }

double GridFunction::cell_volume() const {
  double v = 1.0;
  for (double h : spec_.step) v *= h;
  return v;
}

}  // namespace varsample
