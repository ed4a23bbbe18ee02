#include "varsample/kernelnd.hpp"

#include <algorithm>
#include <cmath>

#include "varsample/errors.hpp"

namespace varsample {

ProductKernelND::ProductKernelND(std::vector<Kernel1D> components) : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("product kernel needs at least one component");
}

ProductKernelND::ProductKernelND(const Kernel1D& component, std::size_t dimension)
    : ProductKernelND(std::vector<Kernel1D>(dimension, component)) {}

ProductKernelND ProductKernelND::parse(std::string_view spec, std::size_t dimension) {
  if (!spec.starts_with("prod:")) {
    if (dimension == 0) throw ConfigError("kernel spec '" + std::string(spec) + "' needs a dimension");
    return ProductKernelND(Kernel1D::parse(spec), dimension);
  }
  std::vector<Kernel1D> parts;
  auto rest = spec.substr(5);
  while (true) {
    const auto comma = rest.find(',');
    parts.push_back(Kernel1D::parse(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (dimension != 0 && parts.size() != dimension) {
    throw ConfigError("kernel spec '" + std::string(spec) + "' has " + std::to_string(parts.size()) +
                      " components, expected " + std::to_string(dimension));
  }
  return ProductKernelND(std::move(parts));
}

double ProductKernelND::operator()(std::span<const double> t) const {
  if (t.size() != components_.size()) {
    throw DomainError("product kernel of dimension " + std::to_string(components_.size()) +
                      " evaluated at a point of dimension " + std::to_string(t.size()));
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (components_[i].is_compact() && std::abs(t[i]) > components_[i].half_width()) return 0.0;
  }
  double value = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) value *= components_[i](t[i]);
  return value;
}

bool ProductKernelND::is_compact() const {
  return std::all_of(components_.begin(), components_.end(), [](const Kernel1D& k) { return k.is_compact(); });
}

std::vector<double> ProductKernelND::support_half_widths() const {
  std::vector<double> widths;
  widths.reserve(components_.size());
  for (const auto& k : components_) widths.push_back(k.half_width());
  return widths;
}

double ProductKernelND::support_radius() const {
  const auto widths = support_half_widths();
  return *std::max_element(widths.begin(), widths.end());
}

double ProductKernelND::l1_norm_bound() const {
  double p = 1.0;
  for (const auto& k : components_) p *= k.l1_norm();
  return p;
}

double ProductKernelND::abs_sum_bound() const {
  double p = 1.0;
  for (const auto& k : components_) p *= k.abs_sum_bound();
  return p;
}

std::string ProductKernelND::name() const {
  std::string out = "prod:";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) out += ',';
    out += components_[i].name();
  }
  return out;
}

double ProductKernelND::lattice_tail_bound(int radius) const {
  // Omitted terms have at least one axis outside its window:
  // sum_i tail_i * prod_{l != i} A_l.
  double total = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const double tail = components_[i].tail_bound(static_cast<double>(radius));
    if (tail == 0.0) continue;
    double others = 1.0;
    for (std::size_t l = 0; l < components_.size(); ++l) {
      if (l != i) others *= components_[l].abs_sum_bound();
    }
    total += tail * others;
  }
  return total;
}

int ProductKernelND::truncation_radius(double budget) const {
  if (is_compact()) return static_cast<int>(std::ceil(support_radius()));
  if (!(budget > 0.0)) throw DomainError("truncation budget must be positive");
  long hi = 1;
  while (!(lattice_tail_bound(static_cast<int>(hi)) <= budget)) {
    hi *= 2;
    if (hi > (1L << 30)) throw ConfigError("tail bound of '" + name() + "' never reaches the truncation budget");
  }
  long lo = hi / 2;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (lattice_tail_bound(static_cast<int>(mid)) <= budget) hi = mid; else lo = mid;
  }
  return static_cast<int>(hi);
}

double product_eval(const ProductKernelND& kernel, std::span<const double> t) { return kernel(t); }

namespace {

double nd_allowance(const ProductKernelND& kernel, int radius) {
  for (const auto& k : kernel.components()) lattice_tail_allowance(k, radius);
  return kernel.lattice_tail_bound(radius);
}

void check_probe(const ProductKernelND& kernel, const std::vector<double>& u) {
  if (u.size() != kernel.dimension()) throw DomainError("probe dimension does not match kernel dimension");
}

}  // namespace

double check_pu_nd(const ProductKernelND& kernel, std::span<const std::vector<double>> probes, int radius) {
  const double allowance = nd_allowance(kernel, radius);
  double worst = 0.0;
  for (const auto& u : probes) {
    check_probe(kernel, u);
    double product = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) product *= lattice_sum(kernel.component(i), u[i], radius);
    worst = std::max(worst, std::abs(product - 1.0));
  }
  return worst + allowance;
}

double abs_sum_nd(const ProductKernelND& kernel, std::span<const std::vector<double>> probes, int radius) {
  const double allowance = nd_allowance(kernel, radius);
  double worst = 0.0;
  for (const auto& u : probes) {
    check_probe(kernel, u);
    double product = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) product *= lattice_abs_sum(kernel.component(i), u[i], radius);
    worst = std::max(worst, product);
  }
  return worst + allowance;
}

}  // namespace varsample
