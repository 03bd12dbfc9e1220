#include "eikonal/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "eikonal/fmm.hpp"

namespace eikonal {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kZero:
      return "zero";
    case HeuristicKind::kNaive:
      return "naive";
    case HeuristicKind::kCoarseGrid:
      return "coarse_grid";
    case HeuristicKind::kOracle:
      return "oracle";
    case HeuristicKind::kHigherSpeed:
      return "higher_speed";
  }
  return "?";
}

HeuristicKind heuristic_kind_from_string(const std::string& name) {
  if (name == "zero") return HeuristicKind::kZero;
  if (name == "naive") return HeuristicKind::kNaive;
  if (name == "coarse_grid" || name == "coarse") return HeuristicKind::kCoarseGrid;
  if (name == "oracle") return HeuristicKind::kOracle;
  if (name == "higher_speed") return HeuristicKind::kHigherSpeed;
  throw std::invalid_argument("unknown heuristic kind '" + name + "'");
}

Heuristic Heuristic::zero() { return Heuristic{}; }

Heuristic Heuristic::naive(const Point& source, double f2, double lambda, int dim) {
  if (!(f2 > 0.0)) throw std::invalid_argument("naive heuristic needs F2 > 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  Heuristic h;
  h.kind_ = HeuristicKind::kNaive;
  h.lambda_ = lambda;
  h.source_ = source;
  h.f2_ = f2;
  h.dim_ = dim;
  return h;
}

Heuristic Heuristic::oracle(const Grid& grid, std::vector<double> values, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  if (values.size() != static_cast<std::size_t>(grid.size())) {
    throw std::invalid_argument("oracle table does not match the grid");
  }
  Heuristic h;
  h.kind_ = HeuristicKind::kOracle;
  h.lambda_ = lambda;
  h.dim_ = grid.dim();
  h.table_grid_ = grid;
  h.table_ = std::move(values);
  return h;
}

Heuristic Heuristic::coarse_grid(const Grid& fine, const SpeedField& speed, const Point& source,
                                 double ratio, double lambda) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("coarse ratio R must lie in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  const int mc = std::max(2, static_cast<int>(std::lround(ratio * fine.m())));
  const Grid coarse = Grid::make(fine.dim(), mc, fine.bounds());
  const NodeId s = coarse.node_at(source, /*snap=*/true);
  SolverState st = fmm_solve(coarse, speed, ExitSet::single(s));
  Heuristic h;
  h.kind_ = HeuristicKind::kCoarseGrid;
  h.lambda_ = lambda;
  h.source_ = source;
  h.dim_ = fine.dim();
  h.table_grid_ = coarse;
  h.table_ = std::move(st.value);
  return h;
}

Heuristic Heuristic::higher_speed(const Grid& grid, std::vector<double> values) {
  if (values.size() != static_cast<std::size_t>(grid.size())) {
    throw std::invalid_argument("higher-speed table does not match the grid");
  }
  Heuristic h;
  h.kind_ = HeuristicKind::kHigherSpeed;
  h.lambda_ = 1.0;
  h.dim_ = grid.dim();
  h.table_grid_ = grid;
  h.table_ = std::move(values);
  return h;
}

double Heuristic::operator()(const Point& x) const {
  switch (kind_) {
    case HeuristicKind::kZero:
      return 0.0;
    case HeuristicKind::kNaive:
      return lambda_ * distance(x, source_, dim_) / f2_;
    case HeuristicKind::kCoarseGrid:
    case HeuristicKind::kOracle:
    case HeuristicKind::kHigherSpeed:
      if (!table_grid_ || table_.empty()) throw std::logic_error("heuristic table is missing");
      return lambda_ * interpolate(*table_grid_, table_, x);
  }
  return 0.0;
}

double Heuristic::at_node(const Grid& grid, NodeId node) const {
  if (table_grid_ && !table_.empty() && *table_grid_ == grid) return lambda_ * table_[node];
  return (*this)(grid.position(node));
}

double interpolate(const Grid& grid, const std::vector<double>& values, const Point& x) {
  const int dim = grid.dim();
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    const double r = std::clamp((x[a] - grid.bounds().lo[a]) / grid.h(), 0.0,
                                static_cast<double>(grid.m() - 1));
    base[a] = std::min(static_cast<int>(std::floor(r)), grid.m() - 2);
    frac[a] = r - base[a];
  }
  double acc = 0.0;
  double wsum = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    MultiIndex idx{0, 0, 0};
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    const double v = values[grid.linear(idx)];
    if (!std::isfinite(v)) continue;
    acc += w * v;
    wsum += w;
  }
  return wsum > 0.0 ? acc / wsum : kInf;
}

const char* to_string(PsiKind kind) {
  switch (kind) {
    case PsiKind::kPsi1:
      return "Psi1";
    case PsiKind::kPsi2:
      return "Psi2";
    case PsiKind::kPsi3:
      return "Psi3";
    case PsiKind::kCustomPath:
      return "custom_path";
    case PsiKind::kExternal:
      return "external";
  }
  return "?";
}

double OverestimatePack::pointwise(const Point& x) const { return eval_psi(x, source, f1, dim); }

double eval_psi(const Point& x, const Point& s, double f1, int dim) {
  if (!(f1 > 0.0)) throw std::invalid_argument("psi needs F1 > 0");
  return distance(x, s, dim) / f1;
}

double segment_slowness_simpson(const SpeedField& speed, const Point& s, const Point& t, int dim,
                                int intervals) {
  const int n = std::max(2, intervals + (intervals % 2));
  const double len = distance(s, t, dim);
  auto slowness = [&](double r) {
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = s[a] + (t[a] - s[a]) * r;
    const double f = speed(x);
    if (!(f > 0.0)) throw std::domain_error("nonpositive speed sample on the segment");
    return len / f;
  };
  double acc = slowness(0.0) + slowness(1.0);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * slowness(static_cast<double>(i) / n);
  return acc / (3.0 * n);
}

double compute_psi(PsiKind kind, const Grid& grid, const SpeedField& speed, NodeId s, NodeId t,
                   std::optional<int> quadrature_intervals) {
  if (s == t) throw std::invalid_argument("Psi needs distinct source and target");
  const Point xs = grid.position(s);
  const Point xt = grid.position(t);
  const int dim = grid.dim();
  switch (kind) {
    case PsiKind::kPsi1:
      return distance(xs, xt, dim) / speed.bounds().f1;
    case PsiKind::kPsi2: {
      const int n = quadrature_intervals.value_or(4 * grid.m());
      const double fine = segment_slowness_simpson(speed, xs, xt, dim, n);
      const double coarse = segment_slowness_simpson(speed, xs, xt, dim, std::max(2, n / 2));
      // Richardson estimate of Simpson's error on the finer rule.
      const double rel_err = std::abs(fine - coarse) / 15.0 / fine;
      return fine * (1.0 + 10.0 * rel_err);
    }
    case PsiKind::kPsi3: {
      const SolverState st = fmm_solve(grid, speed, ExitSet::single(t), s);
      return st.value[s];
    }
    case PsiKind::kCustomPath:
    case PsiKind::kExternal:
      break;
  }
  throw std::invalid_argument("Psi kind needs an explicit path or value");
}

EllipseAxes ellipse_axes(const Point& s, const Point& t, double f2, double psi, int dim) {
  const double d = distance(s, t, dim);
  const double reach = f2 * psi;
  if (reach < d) throw std::invalid_argument("F2 * Psi < |s - t|: Psi is not an overestimate");
  return {reach / 2.0, 0.5 * std::sqrt(reach * reach - d * d)};
}

bool ellipse_contains(const Point& x, const Point& s, const Point& t, double f2, double psi, int dim) {
  const double reach = f2 * psi;
  if (reach < distance(s, t, dim)) {
    throw std::invalid_argument("F2 * Psi < |s - t|: Psi is not an overestimate");
  }
  return distance(x, s, dim) + distance(x, t, dim) <= reach * (1.0 + 1e-12);
}

double ellipse_volume_fraction(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / (std::pow(2.0, n) * std::tgamma(half + 1.0));
}

ConsistencyReport check_consistency(const Heuristic& phi, const Grid& grid, double lambda_required,
                                    double tol) {
  ConsistencyReport rep;
  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  for (NodeId n = 0; n < grid.size(); ++n) values[n] = phi.at_node(grid, n);
  const double h = grid.h();
  for (NodeId n = 0; n < grid.size(); ++n) {
    for (int a = 0; a < grid.dim(); ++a) {
      const NodeId nb = grid.step(n, a, +1);
      if (nb == kNoNode) continue;
      const double dphi = std::abs(values[n] - values[nb]);
      rep.max_lipschitz = std::max(rep.max_lipschitz, dphi / h);
      const double excess = dphi - lambda_required * h;
      if (excess > tol) {
        ++rep.violating_pairs;
        rep.consistent = false;
      }
      if (excess > rep.max_violation || rep.worst_a == kNoNode) {
        if (excess > rep.max_violation) rep.max_violation = excess;
        if (excess > tol) {
          rep.worst_a = n;
          rep.worst_b = nb;
        }
      }
    }
  }
  return rep;
}

}  // namespace eikonal
