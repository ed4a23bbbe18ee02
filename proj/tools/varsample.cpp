#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "varsample/errors.hpp"
#include "varsample/grid.hpp"
#include "varsample/imaging.hpp"
#include "varsample/kernelnd.hpp"
#include "varsample/operators.hpp"
#include "varsample/studies.hpp"
#include "varsample/test_function.hpp"
#include "varsample/verify.hpp"

using namespace varsample;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfig = 2, kIo = 3 };

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("write error on standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write error on '" + path + "'");
}

std::size_t axis_suffix(const std::string& op, const std::string& prefix, std::size_t dim) {
  const std::string digits = op.substr(prefix.size());
  std::size_t used = 0;
  long j = 0;
  try {
    j = std::stol(digits, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (digits.empty() || used != digits.size() || j < 1 || static_cast<std::size_t>(j) > dim) {
    throw ConfigError("axis in '" + op + "' must be in 1.." + std::to_string(dim));
  }
  return static_cast<std::size_t>(j - 1);
}

struct EvalArgs {
  std::string op, kernel, grid, func, out = "-", inner = "auto";
  double w = 0.0, eps = 1e-2;
  int m = 1;
};

int run_eval(const EvalArgs& a, bool m_given, int threads) {
  const GridSpec grid = GridSpec::parse(a.grid);
  grid.validate();
  const std::size_t dim = grid.dimension();
  const TestFunction f = functions::parse(a.func, dim);
  EvalOptions options;
  options.truncation_eps = a.eps;
  if (a.inner == "quadrature") {
    options.inner = InnerIntegral::quadrature;
  } else if (a.inner != "auto") {
    throw ConfigError("--inner must be auto or quadrature");
  }
  const ProductKernelND kernel = ProductKernelND::parse(a.kernel, dim);

  const bool averaging = a.op == "averaged" || a.op.rfind("partial:", 0) == 0;
  if (!averaging && m_given) throw ConfigError("--m applies only to averaged and partial:<j>");
  Operator op = [&] {
    if (a.op == "sampling") return Operator::sampling(f, kernel, a.w, options);
    if (a.op == "averaged") return Operator::averaged(f, AveragedFamily(kernel.components(), a.m), a.w, options);
    if (a.op.rfind("kantorovich:", 0) == 0) {
      return Operator::kantorovich(f, kernel, a.w, axis_suffix(a.op, "kantorovich:", dim), options);
    }
    if (a.op.rfind("partial:", 0) == 0) {
      return Operator::averaged_partial(f, AveragedFamily(kernel.components(), a.m), a.w,
                                        axis_suffix(a.op, "partial:", dim), options);
    }
    throw ConfigError("unknown operator '" + a.op + "'");
  }();

  const GridFunction values = op.on_grid(grid, threads);
  std::string text;
  for (std::size_t i = 0; i < dim; ++i) text += "t" + std::to_string(i + 1) + ",";
  text += "value\n";
  std::vector<double> t(dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, t);
    for (double x : t) text += format_real(x) + ",";
    text += format_real(values[i]) + "\n";
  }
  emit(text, a.out);
  return kOk;
}

struct SmoothArgs {
  std::string in, out, kernel;
  double w = 0.0, scale = 1.0, eps = 1e-2;
  int m = 1;
};

int run_smooth(const SmoothArgs& a, int threads) {
  if (!(a.scale > 0.0) || !std::isfinite(a.scale)) throw ConfigError("--scale must be positive");
  const ImageRaster img = read_pgm(a.in);
  const ProductKernelND kernel = ProductKernelND::parse(a.kernel, 2);
  const auto size = [&](std::size_t n) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(a.scale * static_cast<double>(n))));
  };
  EvalOptions options;
  options.truncation_eps = a.eps;
  const ImageRaster out =
      smooth_image(img, kernel.components(), a.w, a.m, size(img.width), size(img.height), options, threads);
  write_pgm(out, a.out);
  return kOk;
}

int run_imgvar(const std::string& in, bool header) {
  const ImageRaster img = read_pgm(in);
  const VariationReport r = image_variation(img);
  std::ostringstream line;
  if (header) line << "phi_1,phi_2,combined,cells_x,cells_y,lower_bound\n";
  line << format_real(r.phi[0]) << "," << format_real(r.phi[1]) << "," << format_real(r.combined) << ","
       << r.granularity[0] << "," << r.granularity[1] << "," << (r.is_lower_bound ? 1 : 0) << "\n";
  emit(line.str(), "-");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged sampling series, Kantorovich operators and Tonelli variation"};
  app.require_subcommand(1);
  int threads = 1;
  std::uint64_t seed = 1;
  app.add_option("--threads", threads, "Maximum worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for randomized verification inputs");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate an operator on a grid and write CSV");
  eval->add_option("--op", ev.op, "sampling | averaged | kantorovich:<j> | partial:<j>")->required();
  eval->add_option("--kernel", ev.kernel, "fejer | bspline:<n> | avg:<base>:<m> | prod:<s1>,...")->required();
  eval->add_option("--w", ev.w, "Sampling rate")->required();
  auto* eval_m = eval->add_option("--m", ev.m, "Averaging width");
  eval->add_option("--grid", ev.grid, "origin,step,count per axis, axes separated by ';'")->required();
  eval->add_option("--func", ev.func, "const:<c> | coord:<j> | hat | bump | step")->required();
  eval->add_option("--out", ev.out, "Output CSV path, '-' for stdout");
  eval->add_option("--eps", ev.eps, "Truncation budget for decaying kernels");
  eval->add_option("--inner", ev.inner, "Kantorovich inner integrals: auto | quadrature");

  SmoothArgs sm;
  auto* smooth = app.add_subcommand("smooth", "Smooth a PGM image with the averaged sampling series");
  smooth->add_option("--in", sm.in)->required();
  smooth->add_option("--out", sm.out)->required();
  smooth->add_option("--kernel", sm.kernel, "Base kernel for both axes or prod:<sx>,<sy>")->required();
  smooth->add_option("--w", sm.w)->required();
  smooth->add_option("--m", sm.m);
  smooth->add_option("--scale", sm.scale, "Output size relative to the input");
  smooth->add_option("--eps", sm.eps, "Truncation budget for decaying kernels");

  std::string imgvar_in;
  bool imgvar_header = false;
  auto* imgvar = app.add_subcommand("imgvar", "Print phi_1,phi_2,combined,cells_x,cells_y,lower_bound of a PGM");
  imgvar->add_option("--in", imgvar_in)->required();
  imgvar->add_flag("--header", imgvar_header, "Print a header line first");

  ExperimentConfig lp;
  lp.kernel = "bspline:3";
  std::string lp_out = "-";
  auto* lp_study = app.add_subcommand("lp-study", "L^p convergence of the Kantorovich operator");
  lp_study->add_option("--op", lp.op, "kantorovich:<j>");
  lp_study->add_option("--kernel", lp.kernel);
  lp_study->add_option("--func", lp.function);
  lp_study->add_option("--w", lp.w_schedule, "Strictly increasing sampling rates")->delimiter(',');
  lp_study->add_option("--p", lp.p);
  lp_study->add_option("--dim", lp.dimension);
  lp_study->add_option("--cells", lp.grid_cells, "Midpoint cells per axis");
  lp_study->add_option("--out", lp_out);

  ExperimentConfig vs;
  vs.kernel = "bspline:2";
  vs.w_schedule = {2, 4, 8, 16};
  std::string vs_out = "-";
  auto* var_study = app.add_subcommand("var-study", "Convergence in variation of the averaged series");
  var_study->add_option("--kernel", vs.kernel, "Base kernels");
  var_study->add_option("--func", vs.function);
  var_study->add_option("--w", vs.w_schedule, "Strictly increasing sampling rates")->delimiter(',');
  var_study->add_option("--m", vs.m);
  var_study->add_option("--dim", vs.dimension);
  var_study->add_option("--cells", vs.grid_cells, "Midpoint cells per axis");
  var_study->add_option("--out", vs_out);

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run the built-in verification suites");
  verify->add_option("--suite", vo.suites, "Suite names to run")->delimiter(',');
  verify->add_option("--perturb-kernel", vo.kernel_perturbation)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*eval) return run_eval(ev, eval_m->count() > 0, threads);
    if (*smooth) return run_smooth(sm, threads);
    if (*imgvar) return run_imgvar(imgvar_in, imgvar_header);
    if (*lp_study) {
      lp.threads = threads;
      emit(run_lp_convergence(lp).to_csv(), lp_out);
      return kOk;
    }
    if (*var_study) {
      vs.threads = threads;
      emit(run_variation_convergence(vs).to_csv(), vs_out);
      return kOk;
    }
    if (*verify) {
      vo.seed = seed;
      return print_verdicts(run_verify(vo), std::cout) ? kOk : kVerifyFailed;
    }
  } catch (const IoError& e) {
    std::cerr << "varsample: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "varsample: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "varsample: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "varsample: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "varsample: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kOk;
}
