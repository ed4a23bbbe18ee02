#include "varsample/kernel1d.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "varsample/errors.hpp"
#include "varsample/quadrature.hpp"

namespace varsample {

struct Kernel1D::Model {
  std::string name;
  Support support;
  bool nonnegative = false;
  bool even = false;
  std::optional<int> bspline_order;
  double l1 = 0.0;
  std::optional<double> abs_sum;

  virtual ~Model() = default;
  virtual double eval(double t) const = 0;
  virtual std::optional<double> antiderivative(int /*r*/, double /*x*/) const { return std::nullopt; }
  // Exact L1 norm when the model knows it; nullopt falls back to quadrature.
  virtual std::optional<double> exact_l1() const { return std::nullopt; }
  // Absolute error of eval when it is computed by quadrature, 0 when exact.
  virtual double eval_accuracy() const { return 0.0; }
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Radius used for L1 integrals and abs-sum bounds of decaying kernels.
constexpr int kDecayingRadius = 1000;
constexpr int kAbsSumProbes = 32;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// sum_i (-1)^i C(n,i) (n/2 + x - i)_+^p / p!, with (0)_+ = 0.
double truncated_power_sum(int n, int p, double x) {
  CompensatedSum acc;
  for (int i = 0; i <= n; ++i) {
    const double base = 0.5 * n + x - i;
    if (base <= 0.0) break;
    const double term = binomial(n, i) * std::pow(base, p);
    acc += (i % 2 == 0) ? term : -term;
  }
  return acc.value() / factorial(p);
}

double fejer_tail_bound(double radius) {
  if (!(radius > 1.0)) return kInf;
  return 4.0 / (std::numbers::pi * std::numbers::pi * (radius - 1.0));
}

double fejer_tail_mass(double radius) {
  if (!(radius > 0.0)) return kInf;
  return 2.0 / (std::numbers::pi * std::numbers::pi * radius);
}

struct FejerModel final : Kernel1D::Model {
  FejerModel() {
    name = "fejer";
    support = DecayingSupport{fejer_tail_bound, fejer_tail_mass};
    nonnegative = true;
    even = true;
  }
  double eval(double t) const override { return eval_fejer(t); }
};

struct BSplineModel final : Kernel1D::Model {
  int n;
  explicit BSplineModel(int order) : n(order) {
    name = "bspline:" + std::to_string(order);
    support = CompactSupport{0.5 * order};
    nonnegative = true;
    even = order >= 2;
    bspline_order = order;
  }
  double eval(double t) const override { return eval_bspline(n, t); }
  std::optional<double> antiderivative(int r, double x) const override {
    if (r < 1 || r > 2) return std::nullopt;
    return bspline_antiderivative(n, r, x);
  }
  std::optional<double> exact_l1() const override { return 1.0; }
};

struct CustomModel final : Kernel1D::Model {
  std::function<double(double)> fn;
  double eval(double t) const override { return fn(t); }
};

struct AveragedModel final : Kernel1D::Model {
  Kernel1D base;
  int m;
  double half_m;
  bool exact;

  AveragedModel(Kernel1D b, int width) : base(std::move(b)), m(width), half_m(0.5 * width) {
    name = "avg:" + base.name() + ":" + std::to_string(m);
    nonnegative = base.nonnegative();
    even = base.model().even;
    exact = base.antiderivative(1, 0.0).has_value();
    if (base.is_compact()) {
      support = CompactSupport{base.half_width() + half_m};
    } else {
      const auto& ds = std::get<DecayingSupport>(base.support());
      DecayingSupport avg;
      if (ds.tail_bound) {
        avg.tail_bound = [bound = ds.tail_bound, h = half_m](double r) {
          return r - h > 0.0 ? bound(r - h) : kInf;
        };
      }
      avg.tail_mass = ds.tail_mass;
      support = std::move(avg);
    }
  }

  double eval(double t) const override {
    if (even) t = std::abs(t);
    if (const auto* cs = std::get_if<CompactSupport>(&support); cs && std::abs(t) > cs->half_width) return 0.0;
    if (exact) {
      return (*base.antiderivative(1, t + half_m) - *base.antiderivative(1, t - half_m)) / m;
    }
    const auto& k = base;
    return integrate([&k](double v) { return k(v); }, t - half_m, t + half_m, 1e-10) / m;
  }

  std::optional<double> antiderivative(int r, double x) const override {
    if (r != 1) return std::nullopt;
    const auto hi = base.antiderivative(2, x + half_m);
    const auto lo = base.antiderivative(2, x - half_m);
    if (!hi || !lo) return std::nullopt;
    return (*hi - *lo) / m;
  }

  double eval_accuracy() const override { return exact ? 0.0 : 1e-10 / m; }

  std::optional<double> exact_l1() const override {
    // Fubini: the average of a nonnegative kernel has the same integral.
    if (base.nonnegative()) return base.l1_norm();
    return std::nullopt;
  }
};

double compute_l1(const Kernel1D::Model& model) {
  if (auto exact = model.exact_l1()) return *exact;
  const auto abs_eval = [&model](double t) { return std::abs(model.eval(t)); };

  if (const auto* cs = std::get_if<CompactSupport>(&model.support)) {
    if (model.nonnegative) {
      auto lo = model.antiderivative(1, -cs->half_width);
      auto hi = model.antiderivative(1, cs->half_width);
      if (lo && hi) return *hi - *lo;
    }
    // Half-unit pieces so breakpoints of piecewise kernels fall on piece ends.
    CompensatedSum acc;
    const double t = cs->half_width;
    const int pieces = std::max(1, static_cast<int>(std::ceil(4.0 * t)));
    const double h = 2.0 * t / pieces;
    const double tol = model.eval_accuracy() > 0.0 ? 1e-10 : 1e-13;
    for (int i = 0; i < pieces; ++i) acc += integrate(abs_eval, -t + i * h, -t + (i + 1) * h, tol);
    return acc.value();
  }

  const auto& ds = std::get<DecayingSupport>(model.support);
  if (!ds.tail_bound && !ds.tail_mass) {
    throw ConfigError("l1_norm: decaying kernel '" + model.name + "' has no tail bound");
  }
  CompensatedSum acc;
  const double tol = model.eval_accuracy() > 0.0 ? 1e-10 : 1e-13;
  for (int i = -kDecayingRadius; i < kDecayingRadius; ++i) {
    acc += integrate(abs_eval, static_cast<double>(i), static_cast<double>(i + 1), tol);
  }
  acc += ds.tail_mass ? ds.tail_mass(kDecayingRadius) : ds.tail_bound(kDecayingRadius);
  return acc.value();
}

Kernel1D finalize(std::shared_ptr<Kernel1D::Model> model) {
  model->l1 = compute_l1(*model);
  Kernel1D handle(model);
  const bool has_bound = handle.is_compact() || static_cast<bool>(std::get<DecayingSupport>(model->support).tail_bound);
  if (has_bound) {
    const int radius = handle.is_compact() ? static_cast<int>(std::ceil(handle.half_width())) : kDecayingRadius;
    const auto probes = uniform_probes(kAbsSumProbes);
    model->abs_sum = abs_sum_bound(handle, probes, radius);
  }
  return handle;
}

int parse_int(std::string_view text, std::string_view spec) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("kernel spec '" + std::string(spec) + "': expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

double eval_sinc(double x) {
  require_finite(x, "eval_sinc");
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double eval_fejer(double x) {
  require_finite(x, "eval_fejer");
  const double s = eval_sinc(0.5 * x);
  return 0.5 * s * s;
}

double eval_bspline(int n, double x) {
  if (n < 1) throw DomainError("eval_bspline: order must be >= 1");
  require_finite(x, "eval_bspline");
  if (n == 1) return (x > -0.5 && x <= 0.5) ? 1.0 : 0.0;
  // Evaluate on the left half, where fewer truncated powers are active.
  const double xs = -std::abs(x);
  if (xs <= -0.5 * n) return 0.0;
  return truncated_power_sum(n, n - 1, xs);
}

double bspline_antiderivative(int n, int r, double x) {
  if (n < 1) throw DomainError("bspline_antiderivative: order must be >= 1");
  if (r < 1 || r > 2) throw DomainError("bspline_antiderivative: only r = 1, 2 are supported");
  require_finite(x, "bspline_antiderivative");
  const double half = 0.5 * n;
  if (x <= -half) return 0.0;
  if (r == 1) {
    if (x >= half) return 1.0;
    return x <= 0.0 ? truncated_power_sum(n, n, x) : 1.0 - truncated_power_sum(n, n, -x);
  }
  if (x >= half) return x;
  return x <= 0.0 ? truncated_power_sum(n, n + 1, x) : x + truncated_power_sum(n, n + 1, -x);
}

Kernel1D Kernel1D::fejer() {
  static const Kernel1D instance = finalize(std::make_shared<FejerModel>());
  return instance;
}

Kernel1D Kernel1D::bspline(int order) {
  if (order < 1) throw DomainError("bspline: order must be >= 1");
  return finalize(std::make_shared<BSplineModel>(order));
}

Kernel1D Kernel1D::custom(std::string name, std::function<double(double)> evaluate, Support support,
                          bool nonnegative) {
  if (!evaluate) throw ConfigError("custom kernel '" + name + "' has no evaluator");
  if (const auto* cs = std::get_if<CompactSupport>(&support); cs && !(cs->half_width > 0.0)) {
    throw DomainError("custom kernel '" + name + "': support half width must be positive");
  }
  auto model = std::make_shared<CustomModel>();
  model->name = std::move(name);
  model->support = std::move(support);
  model->nonnegative = nonnegative;
  model->fn = std::move(evaluate);
  return finalize(std::move(model));
}

Kernel1D Kernel1D::parse(std::string_view spec) {
  while (!spec.empty() && spec.front() == ' ') spec.remove_prefix(1);
  while (!spec.empty() && spec.back() == ' ') spec.remove_suffix(1);
  if (spec == "fejer") return fejer();
  if (spec.starts_with("bspline:")) {
    const int n = parse_int(spec.substr(8), spec);
    if (n < 1) throw ConfigError("kernel spec '" + std::string(spec) + "': order must be >= 1");
    return bspline(n);
  }
  if (spec.starts_with("avg:")) {
    const auto rest = spec.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos) {
      throw ConfigError("kernel spec '" + std::string(spec) + "': expected avg:<base>:<m>");
    }
    const int m = parse_int(rest.substr(colon + 1), spec);
    if (m < 1) throw ConfigError("kernel spec '" + std::string(spec) + "': m must be >= 1");
    return parse(rest.substr(0, colon)).averaged(m).as_kernel();
  }
  throw ConfigError("unknown kernel spec '" + std::string(spec) + "'");
}

double Kernel1D::operator()(double t) const {
  require_finite(t, "kernel evaluation");
  return model_->eval(t);
}

const std::string& Kernel1D::name() const { return model_->name; }
const Support& Kernel1D::support() const { return model_->support; }
bool Kernel1D::is_compact() const { return std::holds_alternative<CompactSupport>(model_->support); }
bool Kernel1D::nonnegative() const { return model_->nonnegative; }

double Kernel1D::half_width() const {
  if (const auto* cs = std::get_if<CompactSupport>(&model_->support)) return cs->half_width;
  throw ConfigError("kernel '" + name() + "' does not have compact support");
}

double Kernel1D::tail_bound(double radius) const {
  if (const auto* cs = std::get_if<CompactSupport>(&model_->support)) return radius >= cs->half_width ? 0.0 : kInf;
  const auto& ds = std::get<DecayingSupport>(model_->support);
  if (!ds.tail_bound) throw ConfigError("kernel '" + name() + "' has unbounded support but no tail bound");
  return ds.tail_bound(radius);
}

double Kernel1D::l1_norm() const { return model_->l1; }

double Kernel1D::abs_sum_bound() const {
  if (!model_->abs_sum) throw ConfigError("kernel '" + name() + "' has unbounded support but no tail bound");
  return *model_->abs_sum;
}

std::optional<double> Kernel1D::antiderivative(int r, double x) const { return model_->antiderivative(r, x); }
std::optional<int> Kernel1D::bspline_order() const { return model_->bspline_order; }

AveragedKernel1D Kernel1D::averaged(int m) const { return AveragedKernel1D(*this, m); }

AveragedKernel1D::AveragedKernel1D(Kernel1D base, int m)
    : base_(std::move(base)),
      m_(m),
      kernel_(m >= 1 ? finalize(std::make_shared<AveragedModel>(base_, m))
                     : throw DomainError("averaged kernel: m must be >= 1")) {}

double averaged_eval(const Kernel1D& base, int m, double t) {
  if (m < 1) throw DomainError("averaged_eval: m must be >= 1");
  require_finite(t, "averaged_eval");
  const double h = 0.5 * m;
  if (base.is_compact() && std::abs(t) > base.half_width() + h) return 0.0;
  const auto hi = base.antiderivative(1, t + h);
  const auto lo = base.antiderivative(1, t - h);
  if (hi && lo) return (*hi - *lo) / m;
  return integrate([&base](double v) { return base(v); }, t - h, t + h, 1e-10) / m;
}

int radius_for_tail(const Kernel1D& kernel, double budget) {
  if (kernel.is_compact()) return static_cast<int>(std::ceil(kernel.half_width()));
  if (!(budget > 0.0)) throw DomainError("radius_for_tail: budget must be positive");
  long hi = 1;
  while (!(kernel.tail_bound(static_cast<double>(hi)) <= budget)) {
    hi *= 2;
    if (hi > (1L << 40)) throw ConfigError("radius_for_tail: tail bound of '" + kernel.name() + "' never reaches budget");
  }
  long lo = hi / 2;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (kernel.tail_bound(static_cast<double>(mid)) <= budget) hi = mid; else lo = mid;
  }
  return static_cast<int>(hi);
}

double lattice_sum(const Kernel1D& kernel, double u, int radius) {
  CompensatedSum acc;
  const long k0 = static_cast<long>(std::ceil(u - radius));
  const long k1 = static_cast<long>(std::floor(u + radius));
  for (long k = k0; k <= k1; ++k) acc += kernel(u - static_cast<double>(k));
  return acc.value();
}

double lattice_abs_sum(const Kernel1D& kernel, double u, int radius) {
  CompensatedSum acc;
  const long k0 = static_cast<long>(std::ceil(u - radius));
  const long k1 = static_cast<long>(std::floor(u + radius));
  for (long k = k0; k <= k1; ++k) acc += std::abs(kernel(u - static_cast<double>(k)));
  return acc.value();
}

double lattice_tail_allowance(const Kernel1D& kernel, int radius) {
  if (radius < 1) throw ConfigError("lattice radius must be positive");
  const double allowance = kernel.tail_bound(static_cast<double>(radius));
  if (!std::isfinite(allowance)) {
    std::ostringstream msg;
    msg << "lattice radius " << radius << " is insufficient for kernel '" << kernel.name() << "'";
    throw ConfigError(msg.str());
  }
  return allowance;
}

double check_partition_of_unity(const Kernel1D& kernel, std::span<const double> probes, int lattice_radius) {
  const double allowance = lattice_tail_allowance(kernel, lattice_radius);
  double worst = 0.0;
  for (double u : probes) {
    require_finite(u, "check_partition_of_unity");
    worst = std::max(worst, std::abs(lattice_sum(kernel, u, lattice_radius) - 1.0));
  }
  return worst + allowance;
}

double abs_sum_bound(const Kernel1D& kernel, std::span<const double> probes, int lattice_radius) {
  const double allowance = lattice_tail_allowance(kernel, lattice_radius);
  double worst = 0.0;
  for (double u : probes) {
    require_finite(u, "abs_sum_bound");
    worst = std::max(worst, lattice_abs_sum(kernel, u, lattice_radius));
  }
  return worst + allowance;
}

std::vector<double> uniform_probes(int count) {
  std::vector<double> probes(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) probes[static_cast<std::size_t>(i)] = static_cast<double>(i) / count;
  return probes;
}

}  // namespace varsample
