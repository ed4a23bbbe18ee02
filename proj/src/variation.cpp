#include "varsample/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "varsample/errors.hpp"
#include "varsample/quadrature.hpp"

namespace varsample {
namespace {

void check_p(int p) {
  if (p != 1 && p != 2) throw DomainError("p must be 1 or 2");
}

void check_box(const Box& box) {
  if (box.dimension() == 0 || box.upper.size() != box.dimension()) throw DomainError("malformed box");
  for (std::size_t a = 0; a < box.dimension(); ++a) {
    if (!(box.lower[a] < box.upper[a])) throw DomainError("box must have positive extent on every axis");
  }
}

GridSpec midpoint_grid(const Box& box, std::size_t n) {
  GridSpec g;
  for (std::size_t a = 0; a < box.dimension(); ++a) {
    const double h = (box.upper[a] - box.lower[a]) / static_cast<double>(n);
    g.origin.push_back(box.lower[a] + 0.5 * h);
    g.step.push_back(h);
    g.count.push_back(n);
  }
  return g;
}

}  // namespace

double jordan_variation_1d(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("jordan_variation_1d needs at least 2 samples");
  CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) acc += std::abs(samples[i + 1] - samples[i]);
  return acc.value();
}

VariationReport tonelli_variation(const GridFunction& gf, std::span<const std::size_t> cells_per_axis) {
  const std::size_t dim = gf.dimension();
  if (cells_per_axis.size() != dim) throw DomainError("cells_per_axis must have one entry per axis");
  const auto shape = gf.shape();
  const auto h = gf.spacing();
  std::vector<std::size_t> seg(dim);  // node segments per cell
  std::size_t cells = 1;
  for (std::size_t a = 0; a < dim; ++a) {
    if (shape[a] < 2) throw DomainError("tonelli_variation needs at least 2 nodes per axis");
    const std::size_t c = cells_per_axis[a];
    if (c == 0 || (shape[a] - 1) % c != 0) {
      throw DomainError("cell layout does not divide the grid evenly on axis " + std::to_string(a));
    }
    seg[a] = (shape[a] - 1) / c;
    cells *= c;
  }

  // phi[j][cell]
  std::vector<std::vector<CompensatedSum>> phi(dim, std::vector<CompensatedSum>(cells));
  std::vector<std::size_t> idx(dim, 0);
  std::vector<std::size_t> cell_stride(dim, 1);
  for (std::size_t a = dim; a-- > 1;) cell_stride[a - 1] = cell_stride[a] * cells_per_axis[a];

  // Trapezoid weights of a node along a non-section axis, split between the cells sharing it.
  struct Share {
    std::size_t cell[2];
    double weight[2];
    int count;
  };
  const auto share = [&](std::size_t a, std::size_t p) {
    Share s{};
    const std::size_t last = shape[a] - 1;
    if (p % seg[a] != 0) {
      s.cell[0] = p / seg[a];
      s.weight[0] = h[a];
      s.count = 1;
    } else if (p == 0) {
      s.cell[0] = 0;
      s.weight[0] = 0.5 * h[a];
      s.count = 1;
    } else if (p == last) {
      s.cell[0] = cells_per_axis[a] - 1;
      s.weight[0] = 0.5 * h[a];
      s.count = 1;
    } else {
      s.cell[0] = p / seg[a] - 1;
      s.cell[1] = p / seg[a];
      s.weight[0] = s.weight[1] = 0.5 * h[a];
      s.count = 2;
    }
    return s;
  };

  const auto values = gf.values();
  std::vector<Share> shares(dim);
  for (std::size_t flat = 0; flat < gf.size(); ++flat) {
    for (std::size_t a = 0; a < dim; ++a) shares[a] = share(a, idx[a]);
    for (std::size_t j = 0; j < dim; ++j) {
      if (idx[j] + 1 >= shape[j]) continue;
      const double jump = std::abs(values[flat + gf.stride(j)] - values[flat]);
      if (jump == 0.0) continue;
      const std::size_t cell_j = idx[j] / seg[j];
      // Enumerate the cells sharing this segment across the other axes.
      std::size_t combos = 1;
      for (std::size_t a = 0; a < dim; ++a) {
        if (a != j) combos *= static_cast<std::size_t>(shares[a].count);
      }
      for (std::size_t c = 0; c < combos; ++c) {
        std::size_t rem = c;
        std::size_t cell = cell_j * cell_stride[j];
        double weight = 1.0;
        for (std::size_t a = 0; a < dim; ++a) {
          if (a == j) continue;
          const auto& s = shares[a];
          const std::size_t pick = rem % static_cast<std::size_t>(s.count);
          rem /= static_cast<std::size_t>(s.count);
          cell += s.cell[pick] * cell_stride[a];
          weight *= s.weight[pick];
        }
        phi[j][cell] += weight * jump;
      }
    }
    for (std::size_t a = dim; a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }

  VariationReport report;
  report.granularity.assign(cells_per_axis.begin(), cells_per_axis.end());
  report.phi.assign(dim, 0.0);
  CompensatedSum combined;
  std::vector<CompensatedSum> totals(dim);
  for (std::size_t c = 0; c < cells; ++c) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = phi[j][c].value();
      totals[j] += v;
      sq += v * v;
    }
    combined += std::sqrt(sq);
  }
  for (std::size_t j = 0; j < dim; ++j) report.phi[j] = totals[j].value();
  report.combined = combined.value();
  report.is_lower_bound = true;
  return report;
}

VariationReport tonelli_variation(const GridFunction& gf) {
  const std::vector<std::size_t> one(gf.dimension(), 1);
  return tonelli_variation(gf, one);
}

double ac_variation(std::span<const GridFunction> components) {
  if (components.empty()) throw DomainError("ac_variation needs gradient components");
  const GridFunction& first = components.front();
  if (components.size() != first.dimension()) throw DomainError("ac_variation needs one component per axis");
  for (const auto& c : components) {
    if (c.spec().origin != first.spec().origin || c.spec().step != first.spec().step ||
        c.spec().count != first.spec().count) {
      throw DomainError("gradient components must share one grid");
    }
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < first.size(); ++i) {
    double sq = 0.0;
    for (const auto& c : components) sq += c[i] * c[i];
    acc += std::sqrt(sq);
  }
  return acc.value() * first.cell_volume();
}

AcVariation ac_variation(const GradientSampler& gradient, const Box& box, std::size_t n) {
  check_box(box);
  if (n < 2 || n % 2 != 0) throw DomainError("ac_variation needs an even cell count");
  const auto fine_grid = midpoint_grid(box, n);
  const auto coarse_grid = midpoint_grid(box, n / 2);
  const double fine = ac_variation(gradient(fine_grid));
  const double coarse = ac_variation(gradient(coarse_grid));
  return {fine, std::abs(fine - coarse) / 3.0};
}

AcVariation ac_variation(const TestFunction& f, const Box& box, std::size_t n) {
  if (!f.has_gradient()) throw ConfigError("ac_variation: function '" + f.name() + "' has no gradient");
  if (box.dimension() != f.dimension()) throw DomainError("ac_variation: box dimension mismatch");
  const auto sampler = [&f](const GridSpec& grid) {
    const std::size_t dim = grid.dimension();
    std::vector<std::vector<double>> comps(dim, std::vector<double>(grid.size()));
    std::vector<double> t(dim), g(dim);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid.point(i, t);
      f.gradient(t, g);
      for (std::size_t a = 0; a < dim; ++a) comps[a][i] = g[a];
    }
    std::vector<GridFunction> out;
    for (auto& c : comps) out.emplace_back(grid, std::move(c));
    return out;
  };
  return ac_variation(sampler, box, n);
}

double omega1(const TestFunction& f, std::span<const double> x, double delta, std::size_t probes) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("omega1: delta must be positive");
  if (probes < 2) throw DomainError("omega1: at least 2 probes per axis");
  if (x.size() != f.dimension()) throw DomainError("omega1: point dimension mismatch");
  const std::size_t dim = x.size();
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> t(dim);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const double step = delta / static_cast<double>(probes - 1);
  while (true) {
    for (std::size_t a = 0; a < dim; ++a) t[a] = x[a] - 0.5 * delta + static_cast<double>(idx[a]) * step;
    const double v = f(t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    std::size_t a = dim;
    while (a > 0) {
      --a;
      if (++idx[a] < probes) break;
      idx[a] = 0;
      if (a == 0) return hi - lo;
    }
  }
}

double tau1_norm(const TestFunction& f, double delta, int p, const Box& box, std::size_t n, std::size_t probes) {
  check_p(p);
  check_box(box);
  if (box.dimension() != f.dimension()) throw DomainError("tau1_norm: box dimension mismatch");
  if (n == 0) throw DomainError("tau1_norm: n must be positive");
  const auto grid = midpoint_grid(box, n);
  std::vector<double> t(grid.dimension());
  CompensatedSum acc;
  double volume = 1.0;
  for (double h : grid.step) volume *= h;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, t);
    const double o = omega1(f, t, delta, probes);
    acc += p == 1 ? o : o * o;
  }
  const double s = acc.value() * volume;
  return p == 1 ? s : std::sqrt(s);
}

double lp_error(const GridFunction& a, const GridFunction& b, int p) {
  check_p(p);
  if (a.spec().origin != b.spec().origin || a.spec().step != b.spec().step || a.spec().count != b.spec().count) {
    throw DomainError("lp_error: grids differ");
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    acc += p == 1 ? d : d * d;
  }
  const double s = acc.value() * a.cell_volume();
  return p == 1 ? s : std::sqrt(s);
}

}  // namespace varsample
