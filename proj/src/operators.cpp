#include "varsample/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "varsample/errors.hpp"
#include "varsample/quadrature.hpp"

namespace varsample {
namespace {

constexpr std::size_t kMaxDim = 8;
constexpr std::size_t kMaxCacheEntries = 20'000'000;

// How the weights along one lattice axis are produced.
struct AxisRule {
  Kernel1D kernel;
  double radius = 0.0;      // window half width in lattice units
  double half_m = 0.0;      // shift of the difference rule
  bool difference = false;  // kernel(x + half_m) - kernel(x - half_m)

  double weight(double x) const { return difference ? kernel(x + half_m) - kernel(x - half_m) : kernel(x); }
  bool compact() const { return kernel.is_compact(); }
  double tail(double r) const {
    return difference ? 2.0 * kernel.tail_bound(r - half_m) : kernel.tail_bound(r);
  }
  double abs_sum() const { return (difference ? 2.0 : 1.0) * kernel.abs_sum_bound(); }
};

struct Window {
  long first = 0;
  std::vector<double> weights;
};

// Dense memo over a lattice box; indices outside the box are computed directly.
class LatticeCache {
 public:
  LatticeCache() = default;
  LatticeCache(std::vector<long> lo, std::vector<long> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < lo_.size(); ++i) n *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
    values_.assign(n, 0.0);
    filled_.assign(n, 0);
  }

  template <class Compute>
  double get(std::span<const long> k, Compute&& compute) {
    if (values_.empty()) return compute();
    std::size_t flat = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] < lo_[i] || k[i] > hi_[i]) return compute();
      flat = flat * static_cast<std::size_t>(hi_[i] - lo_[i] + 1) + static_cast<std::size_t>(k[i] - lo_[i]);
    }
    if (!filled_[flat]) {
      values_[flat] = compute();
      filled_[flat] = 1;
    }
    return values_[flat];
  }

 private:
  std::vector<long> lo_, hi_;
  std::vector<double> values_;
  std::vector<unsigned char> filled_;
};

template <class Sample>
double combine(const std::vector<Window>& win, Sample&& sample) {
  const std::size_t n = win.size();
  for (const auto& w : win) {
    if (w.weights.empty()) return 0.0;
  }
  std::array<long, kMaxDim> k{};
  std::array<std::size_t, kMaxDim> idx{};
  std::array<double, kMaxDim + 1> prefix{};
  prefix[0] = 1.0;
  for (std::size_t d = 0; d < n; ++d) {
    k[d] = win[d].first;
    prefix[d + 1] = prefix[d] * win[d].weights[0];
  }
  CompensatedSum acc;
  while (true) {
    const double weight = prefix[n];
    if (weight != 0.0) acc += weight * sample(std::span<const long>(k.data(), n));
    std::size_t d = n;
    bool advanced = false;
    while (d > 0) {
      --d;
      if (++idx[d] < win[d].weights.size()) {
        k[d] = win[d].first + static_cast<long>(idx[d]);
        prefix[d + 1] = prefix[d] * win[d].weights[idx[d]];
        for (std::size_t e = d + 1; e < n; ++e) {
          idx[e] = 0;
          k[e] = win[e].first;
          prefix[e + 1] = prefix[e] * win[e].weights[0];
        }
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return acc.value();
}

// Integer radius for the decaying rules so the omitted lattice mass stays under budget.
int decaying_radius(const std::vector<AxisRule>& rules, double budget) {
  const auto tail_at = [&rules](double r) {
    double total = 0.0;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (rules[i].compact()) continue;
      double others = 1.0;
      for (std::size_t l = 0; l < rules.size(); ++l) {
        if (l != i) others *= rules[l].abs_sum();
      }
      total += rules[i].tail(r) * others;
    }
    return total;
  };
  long hi = 1;
  while (!(tail_at(static_cast<double>(hi)) <= budget)) {
    hi *= 2;
    if (hi > (1L << 30)) throw ConfigError("kernel tail bound never reaches the truncation budget");
  }
  long lo = hi / 2;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (tail_at(static_cast<double>(mid)) <= budget) hi = mid; else lo = mid;
  }
  return static_cast<int>(hi);
}

void check_w(double w) {
  if (!std::isfinite(w) || !(w > 0.0)) throw DomainError("sampling rate w must be finite and positive");
}

void check_options(const EvalOptions& o) {
  if (!(o.truncation_eps > 0.0) || o.truncation_eps > 1e-2) {
    throw DomainError("truncation_eps must lie in (0, 1e-2]");
  }
  if (!(o.inner_tol > 0.0)) throw DomainError("inner_tol must be positive");
}

}  // namespace

AveragedFamily::AveragedFamily(std::vector<Kernel1D> bases, int m)
    : bases_(std::move(bases)),
      m_(m >= 1 ? m : throw DomainError("averaged family: m must be >= 1")),
      averaged_([this] {
        std::vector<Kernel1D> comps;
        comps.reserve(bases_.size());
        for (const auto& b : bases_) comps.push_back(b.averaged(m_).as_kernel());
        return ProductKernelND(std::move(comps));
      }()) {}

ProductKernelND AveragedFamily::kantorovich_kernel(std::size_t axis) const {
  if (axis >= bases_.size()) throw DomainError("kantorovich_kernel: axis out of range");
  auto comps = averaged_.components();
  comps[axis] = bases_[axis];
  return ProductKernelND(std::move(comps));
}

double AveragedFamily::base_l1_product() const {
  double p = 1.0;
  for (const auto& b : bases_) p *= b.l1_norm();
  return p;
}

struct Operator::Impl {
  TestFunction f;
  double w = 1.0;
  std::size_t axis = 0;
  EvalOptions options;
  std::vector<AxisRule> rules;
  double scale = 1.0;
  bool cell_samples = false;
  std::vector<double> shifts;  // offsets of t[axis] averaged together (shifted Kantorovich)
  double max_radius = 0.0;

  Impl(TestFunction fn, double rate, std::size_t ax, EvalOptions opt)
      : f(std::move(fn)), w(rate), axis(ax), options(opt) {}

  void finish_rules() {
    if (rules.size() != f.dimension()) {
      throw DomainError("kernel dimension " + std::to_string(rules.size()) + " does not match function dimension " +
                        std::to_string(f.dimension()));
    }
    if (rules.size() > kMaxDim) throw DomainError("dimension above 8 is not supported");
    const bool any_decaying = std::any_of(rules.begin(), rules.end(), [](const AxisRule& r) { return !r.compact(); });
    int decaying = 0;
    if (any_decaying) decaying = decaying_radius(rules, options.truncation_eps / scale);
    for (auto& r : rules) {
      r.radius = r.compact() ? r.kernel.half_width() + (r.difference ? r.half_m : 0.0) : static_cast<double>(decaying);
      max_radius = std::max(max_radius, r.radius);
    }
  }

  double sample(std::span<const long> k) const {
    std::array<double, kMaxDim> p{};
    for (std::size_t i = 0; i < k.size(); ++i) p[i] = static_cast<double>(k[i]) / w;
    const std::span<const double> pt(p.data(), k.size());
    if (!cell_samples) {
      if (f.support_box() && !f.support_box()->contains(pt)) return 0.0;
      return f(pt);
    }
    const double a = static_cast<double>(k[axis]) / w;
    const double b = static_cast<double>(k[axis] + 1) / w;
    if (const auto& box = f.support_box()) {
      for (std::size_t i = 0; i < k.size(); ++i) {
        if (i != axis && (pt[i] < box->lower[i] || pt[i] > box->upper[i])) return 0.0;
      }
      if (b < box->lower[axis] || a > box->upper[axis]) return 0.0;
    }
    if (options.inner == InnerIntegral::automatic) {
      if (auto exact = f.axis_integral(pt, axis, a, b)) return w * *exact;
    }
    const std::size_t ax = axis;
    const auto section = [&](double u) {
      p[ax] = u;
      return f(pt);
    };
    return w * integrate(section, a, b, options.inner_tol);
  }

  double lattice_eval(std::span<const double> t, LatticeCache* cache) const {
    std::vector<Window> win(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const double x = w * t[i];
      const long k0 = static_cast<long>(std::ceil(x - rules[i].radius));
      const long k1 = static_cast<long>(std::floor(x + rules[i].radius));
      win[i].first = k0;
      if (k1 >= k0) {
        win[i].weights.resize(static_cast<std::size_t>(k1 - k0 + 1));
        for (long k = k0; k <= k1; ++k) win[i].weights[static_cast<std::size_t>(k - k0)] = rules[i].weight(x - static_cast<double>(k));
      }
    }
    if (cache) return combine(win, [&](std::span<const long> k) { return cache->get(k, [&] { return sample(k); }); });
    return combine(win, [&](std::span<const long> k) { return sample(k); });
  }

  double eval(std::span<const double> t, LatticeCache* cache) const {
    if (t.size() != rules.size()) throw DomainError("operator evaluated at a point of the wrong dimension");
    for (double x : t) {
      if (!std::isfinite(x)) throw DomainError("operator evaluated at a non-finite point");
    }
    if (shifts.empty()) return scale * lattice_eval(t, cache);
    std::array<double, kMaxDim> shifted{};
    std::copy(t.begin(), t.end(), shifted.begin());
    CompensatedSum acc;
    for (double s : shifts) {
      shifted[axis] = t[axis] + s;
      acc += lattice_eval(std::span<const double>(shifted.data(), t.size()), cache);
    }
    return acc.value() / static_cast<double>(shifts.size());
  }

  LatticeCache cache_for(const GridSpec& grid) const {
    std::vector<long> lo(grid.dimension()), hi(grid.dimension());
    const double margin = max_radius + (shifts.empty() ? 0.0 : 0.5 * static_cast<double>(shifts.size())) + 2.0;
    double entries = 1.0;
    for (std::size_t a = 0; a < grid.dimension(); ++a) {
      const double t0 = grid.origin[a];
      const double t1 = grid.origin[a] + static_cast<double>(grid.count[a] - 1) * grid.step[a];
      lo[a] = static_cast<long>(std::floor(w * std::min(t0, t1) - margin));
      hi[a] = static_cast<long>(std::ceil(w * std::max(t0, t1) + margin));
      entries *= static_cast<double>(hi[a] - lo[a] + 1);
    }
    if (entries > static_cast<double>(kMaxCacheEntries)) return {};
    return LatticeCache(std::move(lo), std::move(hi));
  }
};

Operator Operator::sampling(TestFunction f, ProductKernelND kernel, double w, EvalOptions options) {
  check_w(w);
  check_options(options);
  auto impl = std::make_shared<Impl>(std::move(f), w, 0, options);
  for (const auto& c : kernel.components()) impl->rules.push_back({c});
  impl->finish_rules();
  return Operator(std::move(impl));
}

Operator Operator::averaged(TestFunction f, AveragedFamily family, double w, EvalOptions options) {
  return sampling(std::move(f), family.averaged(), w, options);
}

Operator Operator::kantorovich(TestFunction f, ProductKernelND kernel, double w, std::size_t axis,
                               EvalOptions options) {
  check_w(w);
  check_options(options);
  if (axis >= kernel.dimension()) throw DomainError("kantorovich: axis out of range");
  auto impl = std::make_shared<Impl>(std::move(f), w, axis, options);
  for (const auto& c : kernel.components()) impl->rules.push_back({c});
  impl->cell_samples = true;
  impl->finish_rules();
  return Operator(std::move(impl));
}

Operator Operator::averaged_partial(TestFunction f, AveragedFamily family, double w, std::size_t axis,
                                    EvalOptions options) {
  check_w(w);
  check_options(options);
  if (axis >= family.dimension()) throw DomainError("averaged_partial: axis out of range");
  auto impl = std::make_shared<Impl>(std::move(f), w, axis, options);
  for (std::size_t i = 0; i < family.dimension(); ++i) {
    if (i == axis) {
      impl->rules.push_back({family.bases()[i], 0.0, 0.5 * family.m(), true});
    } else {
      impl->rules.push_back({family.averaged().component(i)});
    }
  }
  impl->scale = w / family.m();
  impl->finish_rules();
  return Operator(std::move(impl));
}

Operator Operator::shifted_kantorovich(TestFunction g, AveragedFamily family, double w, std::size_t axis,
                                       EvalOptions options) {
  check_w(w);
  check_options(options);
  if (axis >= family.dimension()) throw DomainError("shifted_kantorovich: axis out of range");
  auto impl = std::make_shared<Impl>(std::move(g), w, axis, options);
  const ProductKernelND kernel = family.kantorovich_kernel(axis);
  for (const auto& c : kernel.components()) impl->rules.push_back({c});
  impl->cell_samples = true;
  const int m = family.m();
  for (int i = 1; i <= m; ++i) impl->shifts.push_back(-static_cast<double>(m - 2 * (i - 1)) / (2.0 * w));
  impl->finish_rules();
  return Operator(std::move(impl));
}

std::size_t Operator::dimension() const { return impl_->rules.size(); }

double Operator::operator()(std::span<const double> t) const { return impl_->eval(t, nullptr); }

GridFunction Operator::on_grid(const GridSpec& grid, int threads) const {
  grid.validate();
  if (grid.dimension() != dimension()) throw DomainError("grid dimension does not match operator dimension");
  const std::size_t total = grid.size();
  std::vector<double> values(total);
  const auto run = [&](std::size_t begin, std::size_t end) {
    LatticeCache cache = impl_->cache_for(grid);
    std::vector<double> t(grid.dimension());
    for (std::size_t i = begin; i < end; ++i) {
      grid.point(i, t);
      values[i] = impl_->eval(t, &cache);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : static_cast<std::size_t>(threads), 1, total);
  if (workers == 1) {
    run(0, total);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(total, b + chunk);
      pool.emplace_back([&, t, b, e] {
        try {
          run(b, e);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }
  return GridFunction(grid, std::move(values));
}

double sampling_series(const TestFunction& f, const ProductKernelND& kernel, double w, std::span<const double> t,
                       EvalOptions options) {
  return Operator::sampling(f, kernel, w, options)(t);
}

double averaged_sampling_series(const TestFunction& f, const AveragedFamily& family, double w,
                                std::span<const double> t, EvalOptions options) {
  return Operator::averaged(f, family, w, options)(t);
}

double averaged_sampling_series(const TestFunction& f, const std::vector<Kernel1D>& bases, double w, int m,
                                std::span<const double> t, EvalOptions options) {
  return averaged_sampling_series(f, AveragedFamily(bases, m), w, t, options);
}

double kantorovich(const TestFunction& f, const ProductKernelND& kernel, double w, std::size_t axis,
                   std::span<const double> t, EvalOptions options) {
  return Operator::kantorovich(f, kernel, w, axis, options)(t);
}

double averaged_series_partial(const TestFunction& f, const AveragedFamily& family, double w,
                               std::span<const double> t, std::size_t axis, EvalOptions options) {
  return Operator::averaged_partial(f, family, w, axis, options)(t);
}

double averaged_series_partial(const TestFunction& f, const std::vector<Kernel1D>& bases, double w, int m,
                               std::span<const double> t, std::size_t axis, EvalOptions options) {
  return averaged_series_partial(f, AveragedFamily(bases, m), w, t, axis, options);
}

double kantorovich_shifted_average(const TestFunction& g, const AveragedFamily& family, double w,
                                   std::span<const double> t, std::size_t axis, EvalOptions options) {
  return Operator::shifted_kantorovich(g, family, w, axis, options)(t);
}

double kantorovich_shifted_average(const TestFunction& g, const std::vector<Kernel1D>& bases, double w, int m,
                                   std::span<const double> t, std::size_t axis, EvalOptions options) {
  return kantorovich_shifted_average(g, AveragedFamily(bases, m), w, t, axis, options);
}

double partial_derivative_bound(const TestFunction& f, const AveragedFamily& family, double w) {
  double a = 1.0;
  for (const auto& b : family.bases()) a *= b.abs_sum_bound();
  return 2.0 * w / family.m() * f.bound() * a;
}

}  // namespace varsample
