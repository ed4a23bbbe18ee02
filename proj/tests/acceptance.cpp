// One PASS/FAIL line per acceptance criterion; exits 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "varsample/imaging.hpp"
#include "varsample/kernel1d.hpp"
#include "varsample/operators.hpp"
#include "varsample/studies.hpp"
#include "varsample/test_function.hpp"
#include "varsample/variation.hpp"

using namespace varsample;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> spread(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * (i + 0.5) / n);
  return out;
}

Outcome kernel_identities() {
  double identity = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const Kernel1D base = Kernel1D::bspline(n);
    for (double t : spread(-0.5 * n - 1.0, 0.5 * n + 1.0, 10000)) {
      identity = std::max(identity, std::abs(averaged_eval(base, 1, t) - eval_bspline(n + 1, t)));
    }
  }
  const double fejer = std::abs(Kernel1D::fejer().l1_norm() - 1.0);
  const double m3 = std::abs(Kernel1D::bspline(3).l1_norm() - 1.0);
  return {identity < 1e-12 && fejer < 1e-8 && m3 < 1e-8,
          "avg(M_n,1) vs M_{n+1} max err " + sci(identity) + ", |1-||F||_1| " + sci(fejer) + ", |1-||M3||_1| " +
              sci(m3)};
}

Outcome partition_of_unity() {
  const auto probes = uniform_probes(1000);
  double exact = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const Kernel1D b = Kernel1D::bspline(n);
    exact = std::max(exact, check_partition_of_unity(b, probes, radius_for_tail(b, 0.0) + 1));
    for (int m = 1; m <= 4; ++m) {
      const Kernel1D a = b.averaged(m).as_kernel();
      exact = std::max(exact, check_partition_of_unity(a, probes, radius_for_tail(a, 0.0) + 1));
    }
  }
  const Kernel1D fejer = Kernel1D::fejer();
  const int radius = radius_for_tail(fejer, 4e-7);
  const double fr = check_partition_of_unity(fejer, uniform_probes(64), radius);
  return {exact < 1e-12 && fr < 1e-6, "B-spline residual " + sci(exact) + ", Fejer residual " + sci(fr) +
                                          " at lattice radius " + std::to_string(radius)};
}

Outcome derivative_identity() {
  double exact = 0.0, quad = 0.0;
  const GridSpec probes = GridSpec::nodes(2, -1.2, 1.2, 33);
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
            const GridFunction lhs = Operator::averaged_partial(f, fam, w, j).on_grid(probes);
            const GridFunction rhs = Operator::shifted_kantorovich(g, fam, w, j).on_grid(probes);
            const GridFunction rq = Operator::shifted_kantorovich(g, fam, w, j, q).on_grid(probes);
            for (std::size_t i = 0; i < probes.size(); ++i) {
              exact = std::max(exact, std::abs(lhs[i] - rhs[i]));
              quad = std::max(quad, std::abs(lhs[i] - rq[i]));
            }
          }
        }
      }
    }
  }
  return {exact < 1e-8 && quad < 1e-6, "max gap " + sci(exact) + " exact, " + sci(quad) + " quadrature"};
}

Outcome variation_diminishing() {
  double worst = 0.0, plain = 0.0;
  std::string where;
  const std::vector<std::pair<std::string, ImageRaster>> imgs = {
      {"checkerboard", images::checkerboard(64, 64, 8, 0, 255)}, {"disk", images::disk(64, 64, 20.5, 255)}};
  const int n = 2;
  const std::vector<Kernel1D> bases{Kernel1D::bspline(n), Kernel1D::bspline(n)};
  for (const auto& [name, img] : imgs) {
    const double v_hat = image_jump_variation(img);
    for (int m : {2, 4}) {
      for (double w : {2.0, 4.0}) {
        // Four nodes per lattice spacing, covering the whole support of the series.
        const double h = 1.0 / (4.0 * w);
        const double reach = (0.5 * n + 0.5 * m) / w + h;
        const auto count = static_cast<std::size_t>(std::ceil((64.0 + 2.0 * reach) / h)) + 1;
        const GridSpec grid{{-reach, -reach}, {h, h}, {count, count}};
        const GridFunction s = smooth_image_grid(img, bases, w, m, grid);
        const std::vector<std::size_t> cells{count - 1, count - 1};
        const double v = tonelli_variation(s, cells).combined;
        const double ratio = v / (v_hat / m);
        plain = std::max(plain, v / (bases[0].l1_norm() * bases[1].l1_norm() * v_hat));
        if (ratio > worst) {
          worst = ratio;
          where = name + " m=" + std::to_string(m) + " w=" + sci(w);
        }
      }
    }
  }
  return {worst <= 1.01, "max V[S f]/(V[I_A]/m) = " + sci(worst) + " (" + where +
                             "), limit 1.01; max V[S f]/(A V[I_A]) = " + sci(plain)};
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return !v.empty();
}

Outcome lp_convergence() {
  ExperimentConfig c;
  c.op = "kantorovich:1";
  c.kernel = "bspline:3";
  c.function = "bump";
  c.p = 1;
  c.w_schedule = {2, 4, 8, 16, 32};
  const StudyReport r = run_lp_convergence(c);
  std::vector<double> err;
  bool bounded = true;
  for (const auto& row : r.rows) {
    err.push_back(*row.lp_err_K);
    bounded = bounded && *row.lp_err_K <= *row.bound;
  }
  const double ratio = err.back() / err.front();
  return {strictly_decreasing(err) && ratio < 0.15 && bounded,
          "errors " + sci(err.front()) + " -> " + sci(err.back()) + ", ratio " + sci(ratio) +
              (bounded ? ", all within bound" : ", bound violated")};
}

Outcome variation_convergence() {
  bool ok = true;
  std::string detail;
  for (int m : {1, 4}) {
    ExperimentConfig c;
    c.kernel = "bspline:2";
    c.function = "bump";
    c.m = m;
    c.w_schedule = {2, 4, 8, 16};
    const StudyReport r = run_variation_convergence(c);
    std::vector<double> err;
    for (const auto& row : r.rows) err.push_back(*row.V_err);
    const double ratio = err.back() / err.front();
    ok = ok && strictly_decreasing(err) && ratio < 0.25;
    if (!detail.empty()) detail += "; ";
    detail += "m=" + std::to_string(m) + ": " + sci(err.front()) + " -> " + sci(err.back()) + " ratio " + sci(ratio) +
              (strictly_decreasing(err) ? "" : " (not monotone)");
  }
  return {ok, detail};
}

Outcome variation_agreement() {
  const TestFunction hat = functions::tensor_hat(2);
  const Box box = Box::cube(2, -1.0, 1.0);
  const std::size_t n = 1024;
  const GridSpec grid = GridSpec::nodes(2, -1.0, 1.0, n + 1);
  std::vector<double> v(grid.size());
  std::vector<double> t(2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, t);
    v[i] = hat(t);
  }
  const std::vector<std::size_t> cells{n, n};
  const double tonelli = tonelli_variation(GridFunction(grid, std::move(v)), cells).combined;
  const double ac = ac_variation(hat, box).value;
  const double gap = std::abs(tonelli - ac) / ac;
  return {gap < 0.02, "tonelli " + sci(tonelli) + ", ac " + sci(ac) + ", relative gap " + sci(gap)};
}

Outcome gradient_check() {
  // The averaged M3 kernel with m = 2 is piecewise cubic with knots where w t - 1/2 is an
  // integer; probes sit a quarter lattice step away from them.
  const TestFunction f = functions::bump(2);
  const AveragedFamily fam({Kernel1D::bspline(3), Kernel1D::bspline(3)}, 2);
  const double w = 4.0;
  const auto fd_error = [&](double step) {
    double worst = 0.0;
    for (int a = -4; a < 4; ++a) {
      for (int b = -4; b < 4; ++b) {
        const double p[2] = {(a + 0.25) / w, (b + 0.75) / w};
        for (std::size_t j = 0; j < 2; ++j) {
          double hi[2] = {p[0], p[1]}, lo[2] = {p[0], p[1]};
          hi[j] += step;
          lo[j] -= step;
          const double fd =
              (averaged_sampling_series(f, fam, w, hi) - averaged_sampling_series(f, fam, w, lo)) / (2.0 * step);
          worst = std::max(worst, std::abs(fd - averaged_series_partial(f, fam, w, p, j)));
        }
      }
    }
    return worst;
  };
  const double e1 = fd_error(1e-3);
  const double e2 = fd_error(5e-4);
  const double ratio = e1 / e2;
  return {ratio >= 3.5, "FD error " + sci(e1) + " -> " + sci(e2) + ", reduction " + sci(ratio)};
}

Outcome pgm_round_trip() {
  std::mt19937_64 rng(20240601);
  const auto dir = std::filesystem::temp_directory_path() / ("varsample_acceptance_" + std::to_string(rng()));
  std::filesystem::create_directories(dir);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const std::uint32_t maxval = (i % 2) ? 65535 : 255;
    ImageRaster img(1 + rng() % 64, 1 + rng() % 64, maxval);
    for (auto& p : img.pixels) p = static_cast<std::uint16_t>(rng() % (maxval + 1));
    const auto path = dir / ("r" + std::to_string(i) + ".pgm");
    write_pgm(img, path);
    if (read_pgm(path) == img) ++same;
  }
  std::filesystem::remove_all(dir);
  return {same == 100, std::to_string(same) + "/100 rasters identical after write and read"};
}

struct Criterion {
  int id;
  std::string name;
  double seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "kernel identities", 5, kernel_identities},
      {2, "partition of unity", 5, partition_of_unity},
      {3, "derivative identity", 60, derivative_identity},
      {4, "variation diminishing by 1/m", 120, variation_diminishing},
      {5, "L^p convergence", 60, lp_convergence},
      {6, "convergence in variation", 120, variation_convergence},
      {7, "tonelli vs ac variation", 10, variation_agreement},
      {8, "gradient finite differences", 30, gradient_check},
      {9, "PGM round trip", 5, pgm_round_trip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed < c.seconds;
    const bool ok = o.passed && in_time;
    if (!ok) ++failed;
    std::printf("%s criterion %d (%s): %s [%.2fs, limit %gs%s]\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), elapsed, c.seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
