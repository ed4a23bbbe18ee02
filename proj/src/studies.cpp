#include "varsample/studies.hpp"

#include <cmath>
#include <cstdio>

#include "varsample/errors.hpp"
#include "varsample/kernelnd.hpp"
#include "varsample/operators.hpp"
#include "varsample/test_function.hpp"
#include "varsample/variation.hpp"

namespace varsample {
namespace {

std::size_t parse_axis(const std::string& op, std::size_t dim) {
  const std::string prefix = "kantorovich:";
  if (op == "kantorovich") return 0;
  if (op.rfind(prefix, 0) != 0) throw ConfigError("lp-study supports only kantorovich:<j>, got '" + op + "'");
  const std::string digits = op.substr(prefix.size());
  char* end = nullptr;
  const long j = std::strtol(digits.c_str(), &end, 10);
  if (digits.empty() || *end != '\0' || j < 1 || static_cast<std::size_t>(j) > dim) {
    throw ConfigError("axis in '" + op + "' must be in 1.." + std::to_string(dim));
  }
  return static_cast<std::size_t>(j - 1);
}

Box study_box(const TestFunction& f, double margin) {
  const Box base = f.support_box().value_or(Box::cube(f.dimension(), -1.0, 1.0));
  return base.expanded(margin);
}

GridSpec midpoints_of(const Box& box, std::size_t n) {
  GridSpec g;
  for (std::size_t a = 0; a < box.dimension(); ++a) {
    const double h = (box.upper[a] - box.lower[a]) / static_cast<double>(n);
    g.origin.push_back(box.lower[a] + 0.5 * h);
    g.step.push_back(h);
    g.count.push_back(n);
  }
  return g;
}

GridFunction sample(const TestFunction& f, const GridSpec& grid) {
  std::vector<double> v(grid.size());
  std::vector<double> t(grid.dimension());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, t);
    v[i] = f(t);
  }
  return GridFunction(grid, std::move(v));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void ExperimentConfig::validate() const {
  if (w_schedule.empty()) throw ConfigError("w schedule is empty");
  for (std::size_t i = 0; i < w_schedule.size(); ++i) {
    if (!std::isfinite(w_schedule[i]) || !(w_schedule[i] > 0.0)) throw ConfigError("w values must be positive");
    if (i > 0 && !(w_schedule[i] > w_schedule[i - 1])) throw ConfigError("w schedule must be strictly increasing");
  }
  if (m < 1) throw ConfigError("m must be >= 1");
  if (dimension == 0 || dimension > 8) throw ConfigError("dimension must be in 1..8");
  if (p != 1 && p != 2) throw ConfigError("p must be 1 or 2");
  if (grid_cells < 2 || grid_cells % 2 != 0) throw ConfigError("grid cell count must be even and >= 2");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string StudyReport::to_csv() const {
  std::string out = "w,m,kernel,V_f,V_Swf,bound,lp_err_K,V_err\n";
  const auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : rows) {
    out += format_real(r.w) + "," + (r.m ? std::to_string(*r.m) : std::string()) + "," + csv_field(r.kernel) + "," +
           opt(r.V_f) + "," + opt(r.V_Swf) + "," + opt(r.bound) + "," + opt(r.lp_err_K) + "," + opt(r.V_err) + "\n";
  }
  return out;
}

StudyReport run_lp_convergence(const ExperimentConfig& config) {
  config.validate();
  const std::size_t dim = config.dimension;
  const std::size_t axis = parse_axis(config.op, dim);
  const ProductKernelND kernel = ProductKernelND::parse(config.kernel, dim);
  if (!kernel.is_compact()) {
    throw ConfigError("lp-study needs a compactly supported kernel (some T > 0 with the kernel vanishing "
                      "outside [-T, T]^N); '" + config.kernel + "' has unbounded support");
  }
  const TestFunction f = functions::parse(config.function, dim);
  const double T = kernel.support_radius();
  const double a_chi = kernel.abs_sum_bound();
  const Box box = study_box(f, (T + 1.0) / config.w_schedule.front());
  const GridSpec grid = midpoints_of(box, config.grid_cells);
  const GridFunction exact = sample(f, grid);

  StudyReport report;
  for (double w : config.w_schedule) {
    const GridFunction approx = Operator::kantorovich(f, kernel, w, axis).on_grid(grid, config.threads);
    StudyRow row;
    row.w = w;
    row.kernel = config.kernel;
    row.lp_err_K = lp_error(approx, exact, config.p);
    row.bound = a_chi * tau1_norm(f, 2.0 * T / w, config.p, box, config.grid_cells / 2);
    report.rows.push_back(std::move(row));
  }
  return report;
}

StudyReport run_variation_convergence(const ExperimentConfig& config) {
  config.validate();
  const std::size_t dim = config.dimension;
  const ProductKernelND bases = ProductKernelND::parse(config.kernel, dim);
  if (!bases.is_compact()) throw ConfigError("var-study needs compactly supported base kernels");
  const TestFunction f = functions::parse(config.function, dim);
  if (!f.has_gradient()) throw ConfigError("var-study: function '" + config.function + "' has no gradient");
  const AveragedFamily family(bases.components(), config.m);
  const double reach = bases.support_radius() + 0.5 * config.m;
  const Box box = study_box(f, reach / config.w_schedule.front());
  const std::size_t n = config.grid_cells;

  const auto exact_gradient = [&f](const GridSpec& grid) {
    const std::size_t d = grid.dimension();
    std::vector<std::vector<double>> comps(d, std::vector<double>(grid.size()));
    std::vector<double> t(d), g(d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.point(i, t);
      f.gradient(t, g);
      for (std::size_t a = 0; a < d; ++a) comps[a][i] = g[a];
    }
    return comps;
  };
  const double v_f = ac_variation(f, box, n).value;
  const double l1 = bases.l1_norm_bound();

  StudyReport report;
  for (double w : config.w_schedule) {
    std::vector<Operator> partials;
    for (std::size_t j = 0; j < dim; ++j) partials.push_back(Operator::averaged_partial(f, family, w, j));
    const auto series_gradient = [&](const GridSpec& grid, bool minus_exact) {
      std::vector<std::vector<double>> exact;
      if (minus_exact) exact = exact_gradient(grid);
      std::vector<GridFunction> out;
      for (std::size_t j = 0; j < dim; ++j) {
        GridFunction g = partials[j].on_grid(grid, config.threads);
        if (!minus_exact) {
          out.push_back(std::move(g));
          continue;
        }
        std::vector<double> v(g.values().begin(), g.values().end());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= exact[j][i];
        out.push_back(g.with_values(std::move(v)));
      }
      return out;
    };
    StudyRow row;
    row.w = w;
    row.m = config.m;
    row.kernel = config.kernel;
    row.V_f = v_f;
    row.V_Swf = ac_variation([&](const GridSpec& g) { return series_gradient(g, false); }, box, n).value;
    row.bound = l1 * v_f;
    row.V_err = ac_variation([&](const GridSpec& g) { return series_gradient(g, true); }, box, n).value;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace varsample
