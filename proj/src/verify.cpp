#include "varsample/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "varsample/errors.hpp"
#include "varsample/imaging.hpp"
#include "varsample/kernel1d.hpp"
#include "varsample/kernelnd.hpp"
#include "varsample/operators.hpp"
#include "varsample/test_function.hpp"
#include "varsample/variation.hpp"

namespace varsample {
namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Tracks the worst value of a quantity that must stay below a limit.
struct Worst {
  double value = 0.0;
  std::string where;
  void update(double v, const std::string& at) {
    if (where.empty() || v > value || std::isnan(v)) {
      value = v;
      where = at;
    }
  }
};

SuiteResult kernels_suite() {
  Worst identity, norms, even;
  const auto probes = [](double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * (i + 0.5) / n);
    return out;
  };
  for (int n = 1; n <= 4; ++n) {
    const Kernel1D base = Kernel1D::bspline(n);
    for (double t : probes(-0.5 * n - 1.0, 0.5 * n + 1.0, 2000)) {
      identity.update(std::abs(averaged_eval(base, 1, t) - eval_bspline(n + 1, t)), "M" + std::to_string(n));
    }
  }
  norms.update(std::abs(Kernel1D::fejer().l1_norm() - 1.0), "fejer");
  norms.update(std::abs(Kernel1D::bspline(3).l1_norm() - 1.0), "M3");
  for (const char* spec : {"fejer", "bspline:1", "bspline:2", "bspline:3", "bspline:5", "avg:bspline:2:3", "avg:fejer:2"}) {
    const Kernel1D k = Kernel1D::parse(spec);
    for (double t : probes(0.0, 4.0, 97)) even.update(std::abs(k(t) - k(-t)), spec);
  }
  const bool ok = identity.value < 1e-12 && norms.value < 1e-8 && even.value < 1e-15;
  return {"kernels", ok,
          "avg(M_n,1)=M_{n+1} err " + sci(identity.value) + ", |L1-1| " + sci(norms.value) + " (" + norms.where +
              "), asymmetry " + sci(even.value)};
}

SuiteResult partition_suite(double perturbation) {
  const auto perturbed = [perturbation](Kernel1D k) {
    if (perturbation == 0.0) return k;
    const Kernel1D base = k;
    return Kernel1D::custom(
        base.name() + "+perturbed",
        [base, perturbation](double x) {
          const double v = base(x);
          return v != 0.0 ? v + perturbation : v;
        },
        base.support(), false);
  };
  const auto probes = uniform_probes(1000);
  Worst exact;
  for (int n = 1; n <= 6; ++n) {
    const Kernel1D b = perturbed(Kernel1D::bspline(n));
    exact.update(check_partition_of_unity(b, probes, radius_for_tail(b, 0.0) + 1), b.name());
    for (int m : {1, 2, 3, 4}) {
      const Kernel1D a = perturbed(Kernel1D::bspline(n).averaged(m).as_kernel());
      exact.update(check_partition_of_unity(a, probes, radius_for_tail(a, 0.0) + 1), a.name());
    }
  }
  const Kernel1D fejer = perturbed(Kernel1D::fejer());
  const int radius = radius_for_tail(Kernel1D::fejer(), 4e-7);
  const double fejer_residual = check_partition_of_unity(fejer, uniform_probes(64), radius);
  const bool ok = exact.value < 1e-12 && fejer_residual < 1e-6;
  return {"partition-of-unity", ok,
          "B-spline max residual " + sci(exact.value) + " (" + exact.where + "), Fejer residual " +
              sci(fejer_residual) + " at radius " + std::to_string(radius)};
}

SuiteResult operators_suite() {
  Worst constant, linear, grid;
  const double pts[][2] = {{0.13, -0.41}, {0.77, 0.29}, {-0.52, 0.05}};
  const auto c = functions::constant(2, 2.5);
  for (const char* spec : {"bspline:2", "bspline:3", "bspline:4"}) {
    const ProductKernelND k = ProductKernelND::parse(spec, 2);
    const AveragedFamily fam(k.components(), 3);
    for (double w : {1.0, 3.0, 8.0}) {
      for (const auto& p : pts) {
        constant.update(std::abs(sampling_series(c, k, w, p) - 2.5), spec);
        constant.update(std::abs(averaged_sampling_series(c, fam, w, p) - 2.5), spec);
        constant.update(std::abs(kantorovich(c, k, w, 1, p) - 2.5), spec);
      }
    }
  }
  const auto x1 = functions::coordinate(2, 0, Box::cube(2, -3.0, 3.0));
  const ProductKernelND m2 = ProductKernelND::parse("bspline:2", 2);
  for (const auto& p : pts) {
    linear.update(std::abs(sampling_series(x1, m2, 1.0, p) - p[0]), "S_1 t1");
    linear.update(std::abs(kantorovich(x1, m2, 2.0, 0, p) - (p[0] + 0.25)), "K_2 t1");
  }
  const auto bump = functions::bump(2);
  const auto op = Operator::averaged(bump, AveragedFamily(m2.components(), 2), 4.0);
  const GridSpec gs = GridSpec::parse("-1.1,0.23,11;-0.9,0.19,11");
  const GridFunction g = op.on_grid(gs, 2);
  std::vector<double> t(2);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    gs.point(i, t);
    if (op(t) != g[i]) grid.update(1.0, "node " + std::to_string(i));
  }
  const bool ok = constant.value < 1e-12 && linear.value < 1e-12 && grid.value == 0.0;
  return {"operators", ok,
          "constant reproduction " + sci(constant.value) + ", linear reproduction " + sci(linear.value) +
              (grid.value == 0.0 ? ", grid/point bitwise equal" : ", grid/point differ at " + grid.where)};
}

SuiteResult derivative_suite() {
  Worst exact, quad;
  const GridSpec gs = GridSpec::parse("-1.2,0.3,9;-1.2,0.3,9");
  EvalOptions q;
  q.inner = InnerIntegral::quadrature;
  for (const char* name : {"bump", "hat"}) {
    const TestFunction f = functions::parse(name, 2);
    for (int n : {2, 3}) {
      for (int m : {1, 2, 3}) {
        const AveragedFamily fam({Kernel1D::bspline(n), Kernel1D::bspline(n)}, m);
        for (double w : {2.0, 4.0, 8.0}) {
          for (std::size_t j = 0; j < 2; ++j) {
            const TestFunction g = functions::partial_derivative(f, j);
            const GridFunction lhs = Operator::averaged_partial(f, fam, w, j).on_grid(gs);
            const GridFunction rhs = Operator::shifted_kantorovich(g, fam, w, j).on_grid(gs);
            const GridFunction rq = Operator::shifted_kantorovich(g, fam, w, j, q).on_grid(gs);
            std::ostringstream at;
            at << name << " M" << n << " m=" << m << " w=" << w << " axis " << j + 1;
            for (std::size_t i = 0; i < gs.size(); ++i) {
              exact.update(std::abs(lhs[i] - rhs[i]), at.str());
              quad.update(std::abs(lhs[i] - rq[i]), at.str());
            }
          }
        }
      }
    }
  }
  const bool ok = exact.value < 1e-8 && quad.value < 1e-6;
  return {"derivative-identity", ok,
          "max identity gap " + sci(exact.value) + " exact, " + sci(quad.value) + " quadrature (" + quad.where + ")"};
}

SuiteResult variation_suite() {
  // V[S^m_w f] <= prod ||chi_i||_1 * (V[f] + eta) with V[f] the exact jump variation.
  Worst ratio;
  double best_m_factor = 0.0;
  const std::vector<std::pair<std::string, ImageRaster>> imgs = {
      {"checkerboard", images::checkerboard(16, 16, 4, 0, 255)}, {"disk", images::disk(16, 16, 5.5, 255)}};
  for (const auto& [name, img] : imgs) {
    const double v_hat = image_jump_variation(img);
    for (int n : {2, 3}) {
      const std::vector<Kernel1D> bases{Kernel1D::bspline(n), Kernel1D::bspline(n)};
      for (int m : {1, 2, 4}) {
        for (double w : {2.0, 4.0, 8.0}) {
          const double reach = (0.5 * n + 0.5 * m) / w + 0.25;
          const double h = 0.25 / std::max(1.0, w / 4.0);
          const auto count = static_cast<std::size_t>(std::ceil((16.0 + 2.0 * reach) / h)) + 1;
          const GridSpec grid{{-reach, -reach}, {h, h}, {count, count}};
          const GridFunction s = smooth_image_grid(img, bases, w, m, grid);
          const std::vector<std::size_t> cells{count - 1, count - 1};
          const double v = tonelli_variation(s, cells).combined;
          ratio.update(v / (v_hat + 1e-6), name + " M" + std::to_string(n) + " m=" + std::to_string(m) +
                                               " w=" + sci(w));
          best_m_factor = std::max(best_m_factor, m * v / v_hat);
        }
      }
    }
  }
  const bool ok = ratio.value <= 1.0;
  return {"variation-diminishing", ok,
          "max V[S f]/(A V[f]) = " + sci(ratio.value) + " (" + ratio.where + "); max m V[S f]/V[f] = " +
              sci(best_m_factor)};
}

SuiteResult pgm_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int failures = 0;
  std::string first;
  for (int i = 0; i < 50; ++i) {
    const std::uint32_t maxval = (i % 2) ? 65535 : 255;
    ImageRaster img(1 + rng() % 64, 1 + rng() % 64, maxval);
    for (auto& p : img.pixels) p = static_cast<std::uint16_t>(rng() % (maxval + 1));
    const std::string bytes = encode_pgm(img);
    const auto back = decode_pgm(std::span(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
    if (!(back == img)) {
      ++failures;
      if (first.empty()) first = "raster " + std::to_string(i);
    }
  }
  const auto decode_str = [](const std::string& s) {
    return decode_pgm(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
  };
  bool comment_ok = false;
  try {
    const auto img = decode_str(std::string("P5\n# c\n2 1\n255\n") + '\x07' + '\x09');
    comment_ok = img.width == 2 && img.pixels[1] == 9;
  } catch (const FormatError&) {
  }
  bool truncation_caught = false;
  try {
    decode_str("P5\n4 4\n255\nabc");
  } catch (const FormatError& e) {
    truncation_caught = e.offset() == 14;
  }
  const bool ok = failures == 0 && comment_ok && truncation_caught;
  return {"pgm", ok,
          std::to_string(50 - failures) + "/50 round trips" + (first.empty() ? "" : " (first failure " + first + ")") +
              (comment_ok ? ", comments ok" : ", comment parse failed") +
              (truncation_caught ? ", truncation reported" : ", truncation not reported")};
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"kernels",  "partition-of-unity",    "operators",
                                              "derivative-identity", "variation-diminishing", "pgm"};
  return names;
}

std::vector<SuiteResult> run_verify(const VerifyOptions& options) {
  const auto& names = verify_suite_names();
  for (const auto& s : options.suites) {
    if (std::find(names.begin(), names.end(), s) == names.end()) throw ConfigError("unknown suite '" + s + "'");
  }
  const auto wanted = [&](const std::string& s) {
    return options.suites.empty() || std::find(options.suites.begin(), options.suites.end(), s) != options.suites.end();
  };
  std::vector<SuiteResult> out;
  const auto run = [&](const std::string& name, const std::function<SuiteResult()>& fn) {
    if (!wanted(name)) return;
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("error: ") + e.what()});
    }
  };
  run("kernels", kernels_suite);
  run("partition-of-unity", [&] { return partition_suite(options.kernel_perturbation); });
  run("operators", operators_suite);
  run("derivative-identity", derivative_suite);
  run("variation-diminishing", variation_suite);
  run("pgm", [&] { return pgm_suite(options.seed); });
  return out;
}

bool print_verdicts(const std::vector<SuiteResult>& results, std::ostream& out) {
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  return all;
}

}  // namespace varsample
