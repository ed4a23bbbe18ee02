#include "varsample/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "varsample/errors.hpp"

namespace varsample {
namespace {

constexpr std::size_t kMaxEvaluations = 4'000'000;

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
  std::size_t evaluations = 0;
  std::size_t depth_limited = 0;
  CompensatedSum value;
  double error = 0.0;

  double eval(double x) {
    const double y = f(x);
    ++evaluations;
    if (!std::isfinite(y)) {
      std::ostringstream msg;
      msg << "adaptive_simpson: integrand is not finite at x=" << x;
      throw NumericError(msg.str());
    }
    return y;
  }

  void recurse(double a, double fa, double m, double fm, double b, double fb, double whole, double tol,
               int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= max_depth || evaluations >= kMaxEvaluations) {
      if (std::abs(delta) > 15.0 * tol) ++depth_limited;
      value += left + right + delta / 15.0;
      error += std::abs(delta) / 15.0;
      return;
    }
    recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1);
    recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("adaptive_simpson: non-finite limits");
  if (!(abs_tol > 0.0)) throw DomainError("adaptive_simpson: tolerance must be positive");
  if (a == b) return {};

  SimpsonState st{f, max_depth, 0, 0, {}, 0.0};
  const double fa = st.eval(a);
  const double fb = st.eval(b);
  const double m = 0.5 * (a + b);
  const double fm = st.eval(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  st.recurse(a, fa, m, fm, b, fb, whole, abs_tol, 0);

  if (st.error > abs_tol) {
    std::ostringstream msg;
    msg << "adaptive_simpson: tolerance " << abs_tol << " not met on [" << a << ", " << b
        << "]: error estimate " << st.error << ", " << st.depth_limited
        << " subintervals hit max depth " << max_depth << " after " << st.evaluations << " evaluations";
    throw NumericError(msg.str());
  }
  return {st.value.value(), st.error, st.evaluations, st.depth_limited};
}

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth) {
  return adaptive_simpson(f, a, b, abs_tol, max_depth).value;
}

}  // namespace varsample
