#include "eikonal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "eikonal/config.hpp"

namespace eikonal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Upwind one-sided gradient at a node; nullopt when U is infinite there.
std::optional<std::array<double, 3>> node_gradient(const Grid& g, const std::vector<double>& u, NodeId n) {
  const double un = u[n];
  if (!std::isfinite(un)) return std::nullopt;
  const MultiIndex idx = g.multi_index(n);
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    const double lo = idx[a] > 0 ? u[n - g.stride(a)] : kInf;
    const double hi = idx[a] + 1 < g.m() ? u[n + g.stride(a)] : kInf;
    if (std::min(lo, hi) >= un) continue;
    grad[a] = lo <= hi ? (un - lo) / g.h() : (hi - un) / g.h();
  }
  return grad;
}

/// Cell base index and fractional offsets of x.
void locate(const Grid& g, const Point& x, MultiIndex& base, std::array<double, 3>& frac) {
  base = {0, 0, 0};
  frac = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    const double r = std::clamp((x[a] - g.bounds().lo[a]) / g.h(), 0.0, static_cast<double>(g.m() - 1));
    base[a] = std::min(static_cast<int>(std::floor(r)), g.m() - 2);
    frac[a] = r - base[a];
  }
}

std::optional<std::array<double, 3>> blended_gradient(const Grid& g, const std::vector<double>& u,
                                                      const Point& x) {
  MultiIndex base;
  std::array<double, 3> frac;
  locate(g, x, base, frac);
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  double wsum = 0.0;
  for (int corner = 0; corner < (1 << g.dim()); ++corner) {
    MultiIndex idx{0, 0, 0};
    double w = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    const auto grad = node_gradient(g, u, g.linear(idx));
    if (!grad) continue;
    for (int a = 0; a < g.dim(); ++a) acc[a] += w * (*grad)[a];
    wsum += w;
  }
  if (wsum == 0.0) return std::nullopt;
  for (double& c : acc) c /= wsum;
  return acc;
}

double point_segment_distance(const Point& x, const Point& a, const Point& b, int dim) {
  double len2 = 0.0;
  double dot = 0.0;
  for (int i = 0; i < dim; ++i) {
    len2 += (b[i] - a[i]) * (b[i] - a[i]);
    dot += (x[i] - a[i]) * (b[i] - a[i]);
  }
  const double r = len2 > 0.0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
  Point p{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) p[i] = a[i] + r * (b[i] - a[i]);
  return distance(x, p, dim);
}

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

Trajectory extract_trajectory(const Grid& grid, const std::vector<double>& u, NodeId s, NodeId t,
                              TrajectoryOptions options) {
  if (u.size() != static_cast<std::size_t>(grid.size())) throw std::invalid_argument("value field does not match the grid");
  if (!grid.valid(s) || !grid.valid(t)) throw std::invalid_argument("source or target outside the grid");
  if (!std::isfinite(u[s])) throw std::invalid_argument("U(s) is not finite");
  const double step = options.step > 0.0 ? options.step : 0.5 * grid.h();
  const int max_steps = options.max_steps > 0 ? options.max_steps : 50 * grid.m();
  const int dim = grid.dim();
  const Point xt = grid.position(t);

  Trajectory traj;
  Point x = grid.position(s);
  traj.points.push_back(x);
  for (int k = 0;; ++k) {
    if (distance(x, xt, dim) <= grid.h() * (1.0 + 1e-12)) break;
    if (k >= max_steps) throw std::runtime_error("trajectory did not reach t within the step budget");
    const auto grad = blended_gradient(grid, u, x);
    if (!grad) throw std::runtime_error("gradient undefined along the trajectory");
    double norm = 0.0;
    for (int a = 0; a < dim; ++a) norm += (*grad)[a] * (*grad)[a];
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw std::runtime_error("gradient vanished or is NaN");
    for (int a = 0; a < dim; ++a) {
      x[a] = std::clamp(x[a] - step * (*grad)[a] / norm, grid.bounds().lo[a], grid.bounds().hi[a]);
    }
    traj.arclength += distance(traj.points.back(), x, dim);
    traj.points.push_back(x);
  }
  traj.arclength += distance(x, xt, dim);
  traj.points.push_back(xt);
  return traj;
}

double integrate_cost_along(const Trajectory& traj, const std::function<double(const Point&)>& integrand) {
  if (traj.points.empty()) return 0.0;
  auto sample = [&](const Point& p) {
    const double g = integrand(p);
    if (!(g > 0.0)) throw std::domain_error("nonpositive integrand sample on the trajectory");
    return g;
  };
  double acc = 0.0;
  double prev = sample(traj.points.front());
  for (std::size_t i = 1; i < traj.points.size(); ++i) {
    const double cur = sample(traj.points[i]);
    acc += 0.5 * (prev + cur) * distance(traj.points[i - 1], traj.points[i], 3);
    prev = cur;
  }
  return acc;
}

namespace {

std::vector<Point> resample(const std::vector<Point>& pts, int dim, std::size_t count) {
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i], dim);
  std::vector<Point> out(count);
  out.front() = pts.front();
  out.back() = pts.back();
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const double target = cum.back() * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 1 < pts.size() && cum[seg] < target) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double w = len > 0.0 ? (target - cum[seg - 1]) / len : 0.0;
    for (int a = 0; a < 3; ++a) out[k][a] = (1.0 - w) * pts[seg - 1][a] + w * pts[seg][a];
  }
  return out;
}

double polyline_cost(const std::vector<Point>& pts, const std::vector<double>& c, int dim) {
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) acc += 0.5 * (c[i - 1] + c[i]) * distance(pts[i - 1], pts[i], dim);
  return acc;
}

}  // namespace

namespace {

// Projected descent with backtracking at a fixed vertex count.
void relax_level(std::vector<Point>& pts, const Box& box, int dim, double delta,
                 const std::function<double(const Point&)>& cost, const RelaxOptions& options) {
  const std::size_t count = pts.size();
  auto eval_all = [&](const std::vector<Point>& p) {
    std::vector<double> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) c[i] = cost(p[i]);
    return c;
  };
  std::vector<double> c = eval_all(pts);
  double value = polyline_cost(pts, c, dim);
  const double seg = value > 0.0 ? distance(pts.front(), pts.back(), dim) / static_cast<double>(count - 1) : 0.0;
  double tau = seg * seg;
  std::vector<Point> grad(count);

  for (int it = 0; it < options.max_iters; ++it) {
    for (std::size_t i = 1; i + 1 < count; ++i) {
      const double lm = distance(pts[i - 1], pts[i], dim);
      const double lp = distance(pts[i], pts[i + 1], dim);
      Point g{};
      for (int a = 0; a < dim; ++a) {
        Point hi = pts[i];
        Point lo = pts[i];
        hi[a] += delta;
        lo[a] -= delta;
        g[a] = 0.25 * (cost(hi) - cost(lo)) / delta * (lm + lp);
        if (lm > 0.0) g[a] += 0.5 * (c[i - 1] + c[i]) * (pts[i][a] - pts[i - 1][a]) / lm;
        if (lp > 0.0) g[a] -= 0.5 * (c[i] + c[i + 1]) * (pts[i + 1][a] - pts[i][a]) / lp;
      }
      grad[i] = g;
    }
    bool improved = false;
    for (int tries = 0; tries < 40 && !improved; ++tries) {
      std::vector<Point> trial = pts;
      for (std::size_t i = 1; i + 1 < count; ++i) {
        for (int a = 0; a < dim; ++a) {
          trial[i][a] = std::clamp(pts[i][a] - tau * grad[i][a], box.lo[a], box.hi[a]);
        }
      }
      trial = resample(trial, dim, count);
      std::vector<double> tc = eval_all(trial);
      const double tv = polyline_cost(trial, tc, dim);
      if (tv < value) {
        const double gain = value - tv;
        pts = std::move(trial);
        c = std::move(tc);
        value = tv;
        tau *= 1.5;
        improved = true;
        if (gain <= options.rel_tol * value) return;
      } else {
        tau *= 0.5;
      }
    }
    if (!improved) return;
  }
}

}  // namespace

Trajectory relax_trajectory(const Grid& grid, const Trajectory& initial,
                            const std::function<double(const Point&)>& cost, RelaxOptions options) {
  const int dim = grid.dim();
  if (initial.points.size() < 2) throw std::invalid_argument("relax_trajectory needs at least two points");
  const double spacing = options.spacing > 0.0 ? options.spacing : grid.h();
  double length = 0.0;
  for (std::size_t i = 1; i < initial.points.size(); ++i) {
    length += distance(initial.points[i - 1], initial.points[i], dim);
  }
  const auto target = static_cast<std::size_t>(std::max(3.0, std::ceil(length / spacing) + 1.0));
  std::size_t count = std::min<std::size_t>(9, target);
  std::vector<Point> pts = resample(initial.points, dim, count);
  const double delta = 1e-3 * grid.h();
  while (true) {
    relax_level(pts, grid.bounds(), dim, delta, cost, options);
    if (count == target) break;
    count = std::min(target, 2 * count - 1);
    pts = resample(pts, dim, count);
  }

  Trajectory out;
  out.points = std::move(pts);
  for (std::size_t i = 1; i < out.points.size(); ++i) out.arclength += distance(out.points[i - 1], out.points[i], dim);
  return out;
}

double hausdorff_to_segment(const Trajectory& traj, const Point& a, const Point& b, int dim) {
  double worst = 0.0;
  for (const Point& p : traj.points) worst = std::max(worst, point_segment_distance(p, a, b, dim));
  return worst;
}

double hausdorff(const Trajectory& a, const Trajectory& b, int dim) {
  auto one_way = [dim](const Trajectory& x, const Trajectory& y) {
    double worst = 0.0;
    for (const Point& p : x.points) {
      double best = kInf;
      for (std::size_t i = 0; i + 1 < y.points.size(); ++i) {
        best = std::min(best, point_segment_distance(p, y.points[i], y.points[i + 1], dim));
      }
      if (y.points.size() == 1) best = distance(p, y.points[0], dim);
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

std::string RunReport::csv_header() {
  return "config_hash,instance,method,dim,m,lambda,psi,U_star_s,U_s,u_exact,E_d,E_star,E_star_N,P,"
         "accepted,considered,psi_fallback,wall_time";
}

std::string RunReport::csv_row() const {
  std::ostringstream out;
  out << config_hash << ',' << instance << ',' << method << ',' << dim << ',' << m << ','
      << format_double(lambda) << ',' << format_double(psi) << ',' << format_double(u_star_s) << ','
      << format_double(u_s) << ',' << opt_field(u_exact) << ','
      << (u_exact ? format_double(e_d) : "") << ',' << (u_exact ? format_double(e_star) : "") << ','
      << format_double(e_star_n) << ',' << format_double(p) << ',' << accepted << ',' << considered << ','
      << (psi_fallback ? 1 : 0) << ',' << format_double(wall_time);
  return out.str();
}

std::string RunReport::json() const {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["instance"] = instance;
  j["method"] = method;
  j["dim"] = dim;
  j["m"] = m;
  j["lambda"] = lambda;
  j["psi"] = std::isfinite(psi) ? nlohmann::ordered_json(psi) : nlohmann::ordered_json("inf");
  j["U_star_s"] = u_star_s;
  j["U_s"] = u_s;
  j["u_exact"] = u_exact ? nlohmann::ordered_json(*u_exact) : nlohmann::ordered_json(nullptr);
  j["E_d"] = u_exact ? nlohmann::ordered_json(e_d) : nlohmann::ordered_json(nullptr);
  j["E_star"] = u_exact ? nlohmann::ordered_json(e_star) : nlohmann::ordered_json(nullptr);
  j["E_star_N"] = e_star_n;
  j["P"] = p;
  j["accepted"] = accepted;
  j["considered"] = considered;
  j["psi_fallback"] = psi_fallback;
  j["wall_time"] = wall_time;
  return j.dump();
}

RunReport compute_metrics(double u_star_s, double u_s, std::optional<double> u_exact, std::int64_t accepted,
                          std::int64_t considered, int m, int n) {
  if (!(u_s > 0.0)) throw std::invalid_argument("U(s) must be positive");
  if (u_exact && !(*u_exact > 0.0)) throw std::invalid_argument("u(s) must be positive");
  RunReport r;
  r.dim = n;
  r.m = m;
  r.u_star_s = u_star_s;
  r.u_s = u_s;
  r.u_exact = u_exact;
  if (u_exact) {
    r.e_d = std::abs(u_s - *u_exact) / *u_exact;
    r.e_star = std::abs(u_star_s - *u_exact) / *u_exact;
  }
  r.e_star_n = (u_star_s - u_s) / u_s;
  r.accepted = accepted;
  r.considered = considered;
  r.p = static_cast<double>(accepted + considered) / std::pow(static_cast<double>(m), n);
  return r;
}

DependencyGraph dependency_graph(const SolverState& state, NodeId s) {
  if (!state.grid.valid(s) || !state.accepted(s)) throw std::invalid_argument("source is not accepted");
  DependencyGraph g;
  g.member.assign(state.value.size(), 0);
  g.member[s] = 1;
  // Parents carry smaller ranks, so one descending sweep closes the set.
  for (std::int32_t r = state.accept_rank[s]; r >= 0; --r) {
    const NodeId n = state.accept_order[r];
    if (!g.member[n]) continue;
    g.nodes.push_back(n);
    const UpwindRecord& rec = state.upwind[n];
    for (int i = 0; i < rec.count; ++i) g.member[rec.parents[i]] = 1;
  }
  return g;
}

std::array<double, 3> transition_weights(const SolverState& state, NodeId node) {
  std::array<double, 3> w{0.0, 0.0, 0.0};
  const UpwindRecord& rec = state.upwind[node];
  if (rec.branch == Branch::kExit || rec.count == 0) return w;
  if (rec.count == 1) {
    w[0] = 1.0;
    return w;
  }
  double total = 0.0;
  for (int i = 0; i < rec.count; ++i) {
    w[i] = std::max(state.value[node] - state.value[rec.parents[i]], 0.0);
    total += w[i];
  }
  if (total > 0.0) {
    for (int i = 0; i < rec.count; ++i) w[i] /= total;
  } else {
    for (int i = 0; i < rec.count; ++i) w[i] = 1.0 / rec.count;
  }
  return w;
}

SensitivityField sensitivity_alphas(const SolverState& state, NodeId s) {
  if (!state.grid.valid(s) || !state.accepted(s)) throw std::invalid_argument("source is not accepted");
  SensitivityField out;
  out.alpha.assign(state.value.size(), 0.0);
  out.beta.assign(state.value.size(), {0.0, 0.0, 0.0});
  out.alpha[s] = 1.0;
  for (std::int32_t r = state.accept_rank[s]; r >= 0; --r) {
    const NodeId n = state.accept_order[r];
    const UpwindRecord& rec = state.upwind[n];
    if (rec.branch == Branch::kNone) throw std::invalid_argument("accepted node without an upwind record");
    out.beta[n] = transition_weights(state, n);
    const double a = out.alpha[n];
    if (a == 0.0) continue;
    if (rec.branch == Branch::kExit) {
      out.absorbed += a;
      continue;
    }
    for (int i = 0; i < rec.count; ++i) out.alpha[rec.parents[i]] += a * out.beta[n][i];
  }
  return out;
}

DecayFit conjecture_decay_fit(const Grid& grid, const std::vector<double>& alpha, const Trajectory& traj,
                              DecayOptions options) {
  if (grid.dim() != 2) throw std::invalid_argument("decay fit is defined for planar grids");
  if (alpha.size() != static_cast<std::size_t>(grid.size())) throw std::invalid_argument("alpha does not match the grid");
  if (traj.points.size() < 3) throw std::runtime_error("trajectory too short for probing");
  const double h = grid.h();

  // ln(alpha) interpolated over the cell; nullopt outside the box or where a corner is zero.
  auto log_alpha = [&](const Point& x) -> std::optional<double> {
    if (!grid.contains(x)) return std::nullopt;
    MultiIndex base;
    std::array<double, 3> frac;
    locate(grid, x, base, frac);
    double acc = 0.0;
    for (int corner = 0; corner < 4; ++corner) {
      const MultiIndex idx{base[0] + (corner & 1), base[1] + ((corner >> 1) & 1), 0};
      const double w = ((corner & 1) ? frac[0] : 1.0 - frac[0]) * (((corner >> 1) & 1) ? frac[1] : 1.0 - frac[1]);
      const double a = alpha[grid.linear(idx)];
      if (w == 0.0) continue;
      if (!(a > 0.0)) return std::nullopt;
      acc += w * std::log(a);
    }
    return acc;
  };

  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < traj.points.size(); ++i) {
    cumulative.push_back(cumulative.back() + distance(traj.points[i - 1], traj.points[i], 2));
  }
  const double total = cumulative.back();

  DecayFit fit;
  const double log_floor = std::log(options.floor);
  for (std::size_t probe = 0; probe < options.arc_fractions.size(); ++probe) {
    const double target = options.arc_fractions[probe] * total;
    const std::size_t i = std::clamp<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin(), 1,
        traj.points.size() - 2);
    const Point& p = traj.points[i];
    double tx = traj.points[i + 1][0] - traj.points[i - 1][0];
    double ty = traj.points[i + 1][1] - traj.points[i - 1][1];
    const double tl = std::hypot(tx, ty);
    if (!(tl > 0.0)) continue;
    const double nx = -ty / tl;
    const double ny = tx / tl;
    auto at = [&](int k) { return Point{p[0] + k * h * nx, p[1] + k * h * ny, 0.0}; };

    int peak = 0;
    double peak_val = -kInf;
    for (int k = -3; k <= 3; ++k) {
      const auto v = log_alpha(at(k));
      if (v && *v > peak_val) {
        peak_val = *v;
        peak = k;
      }
    }
    if (!std::isfinite(peak_val)) continue;
    fit.points.push_back({static_cast<int>(probe), 0.0, std::exp(peak_val)});
    for (int dir = -1; dir <= 1; dir += 2) {
      double prev = peak_val;
      for (int j = 1;; ++j) {
        const auto v = log_alpha(at(peak + dir * j));
        if (!v || *v < peak_val + log_floor) break;
        if (*v > prev + 1e-12) fit.monotone = false;
        prev = *v;
        fit.points.push_back({static_cast<int>(probe), j * h, std::exp(*v)});
      }
    }
  }
  if (fit.points.size() < 5) throw std::runtime_error("fewer than 5 usable probe points");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const DecayPoint& q : fit.points) {
    const double x = q.d * q.d / h;
    const double y = std::log(q.alpha);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(fit.points.size());
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw std::runtime_error("probe points do not spread in distance");
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::vector<NodeId> boundary_of(const Grid& grid, const std::vector<std::uint8_t>& mask) {
  if (mask.size() != static_cast<std::size_t>(grid.size())) throw std::invalid_argument("mask does not match the grid");
  std::vector<NodeId> xi;
  for (NodeId n = 0; n < grid.size(); ++n) {
    if (mask[n]) continue;
    const NeighborList nb = grid.neighbors(n);
    for (int i = 0; i < nb.count; ++i) {
      if (mask[nb.ids[i]]) {
        xi.push_back(n);
        break;
      }
    }
  }
  return xi;
}

BoundarySolve restricted_solve_with_boundary(const Grid& grid, std::span<const double> speed, NodeId t,
                                             const std::vector<std::uint8_t>& mask, const std::vector<double>& q) {
  if (mask.size() != static_cast<std::size_t>(grid.size()) || q.size() != mask.size()) {
    throw std::invalid_argument("mask or penalties do not match the grid");
  }
  if (!grid.valid(t) || !mask[t]) throw std::invalid_argument("t must belong to the restricted set");
  BoundarySolve out;
  out.xi = boundary_of(grid, mask);
  std::vector<std::uint8_t> active = mask;
  ExitSet exits = ExitSet::single(t);
  for (NodeId x : out.xi) {
    active[x] = 1;
    exits.nodes.push_back(x);
    exits.q.push_back(q[x]);
  }
  out.state = fmm_solve(grid, speed, exits, std::nullopt, &active);
  return out;
}

double grid_path_bound(const Grid& grid, const std::vector<std::uint8_t>& mask, NodeId t, double f1) {
  if (mask.size() != static_cast<std::size_t>(grid.size())) throw std::invalid_argument("mask does not match the grid");
  if (!grid.valid(t) || !mask[t]) throw std::invalid_argument("t must belong to the restricted set");
  if (!(f1 > 0.0)) throw std::invalid_argument("F1 must be positive");
  std::vector<std::int64_t> hops(mask.size(), -1);
  std::deque<NodeId> queue{t};
  hops[t] = 0;
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    const NeighborList nb = grid.neighbors(n);
    for (int i = 0; i < nb.count; ++i) {
      const NodeId x = nb.ids[i];
      if (!mask[x] || hops[x] >= 0) continue;
      hops[x] = hops[n] + 1;
      queue.push_back(x);
    }
  }
  std::int64_t worst = 0;
  for (NodeId n = 0; n < grid.size(); ++n) {
    if (!mask[n]) continue;
    if (hops[n] < 0) return kInf;
    worst = std::max(worst, hops[n]);
  }
  return static_cast<double>(worst) * grid.h() / f1;
}

double restriction_error_bound(const std::vector<double>& alpha, std::span<const NodeId> xi,
                               const std::vector<double>& q, const std::vector<double>& u) {
  double acc = 0.0;
  for (NodeId x : xi) {
    if (q[x] < u[x]) throw std::invalid_argument("penalty below U on the restriction boundary");
    if (alpha[x] == 0.0) continue;
    acc += alpha[x] * (q[x] - u[x]);
  }
  return acc;
}

double restriction_error_bound(const std::vector<double>& alpha, std::span<const NodeId> xi, double c) {
  double acc = 0.0;
  for (NodeId x : xi) acc += alpha[x];
  return c * acc;
}

}  // namespace eikonal
