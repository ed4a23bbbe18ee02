#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace varsample {

struct ExperimentConfig {
  std::string op = "kantorovich:1";  // lp-study only; 1-based axis
  std::string kernel = "bspline:3";
  std::vector<double> w_schedule{2, 4, 8, 16, 32};
  int m = 1;
  std::string function = "bump";
  std::size_t dimension = 2;
  int p = 1;
  std::size_t grid_cells = 160;  // midpoint cells per axis (even)
  int threads = 1;

  // Throws ConfigError.
  void validate() const;
};

// One CSV row; absent values print as empty cells.
struct StudyRow {
  double w = 0.0;
  std::optional<int> m;
  std::string kernel;
  std::optional<double> V_f, V_Swf, bound, lp_err_K, V_err;
};

struct StudyReport {
  std::vector<StudyRow> rows;
  // Header "w,m,kernel,V_f,V_Swf,bound,lp_err_K,V_err"; reals with 17 significant digits.
  std::string to_csv() const;
};

// ||K_{w,j} f - f||_p against A_chi * tau_1(f; 2T/w)_p for each w.
StudyReport run_lp_convergence(const ExperimentConfig& config);
// V[S^m_w f - f] through the gradient of the averaged series, for each w.
StudyReport run_variation_convergence(const ExperimentConfig& config);

std::string format_real(double v);

}  // namespace varsample
