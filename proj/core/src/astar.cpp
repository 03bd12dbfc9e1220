#include "eikonal/astar.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace eikonal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_endpoints(const Grid& grid, NodeId t, NodeId s) {
  if (!grid.valid(s) || !grid.valid(t)) throw std::invalid_argument("source or target outside the grid");
}

RestrictedResult finish(Marcher&& marcher, NodeId s, double psi_initial, double psi_final) {
  RestrictedResult out;
  out.state = std::move(marcher).take_state();
  out.initial_psi = psi_initial;
  out.final_psi = psi_final;
  out.fraction = out.state.fraction_computed();
  if (out.state.accepted(s)) {
    out.value_at_source = out.state.value[s];
  } else {
    out.psi_fallback = true;
    out.value_at_source = psi_final;
  }
  return out;
}

}  // namespace

const char* to_string(RestrictionMethod method) {
  return method == RestrictionMethod::kSA ? "sa" : "aa";
}

RestrictionMethod restriction_method_from_string(const std::string& name) {
  if (name == "sa" || name == "SA") return RestrictionMethod::kSA;
  if (name == "aa" || name == "AA") return RestrictionMethod::kAA;
  throw std::invalid_argument("unknown restriction method '" + name + "'");
}

Heuristic build_heuristic(const HeuristicSpec& spec, const Grid& grid, const SpeedField& speed,
                          NodeId s) {
  const Point xs = grid.position(s);
  switch (spec.kind) {
    case HeuristicKind::kZero:
      return Heuristic::zero();
    case HeuristicKind::kNaive:
      return Heuristic::naive(xs, speed.bounds().f2, spec.lambda, grid.dim());
    case HeuristicKind::kCoarseGrid:
      return Heuristic::coarse_grid(grid, speed, xs, spec.ratio, spec.lambda);
    case HeuristicKind::kOracle: {
      SolverState v = fmm_solve(grid, speed, ExitSet::single(s));
      return Heuristic::oracle(grid, std::move(v.value), spec.lambda);
    }
    case HeuristicKind::kHigherSpeed:
      throw std::invalid_argument("higher_speed heuristic needs an explicit v0 table");
  }
  throw std::invalid_argument("unknown heuristic kind");
}

RestrictionConfig RestrictionConfig::defaults(int dim) {
  RestrictionConfig c;
  c.eps_tol = dim == 3 ? 1.0 / 3.0 : 0.25;
  return c;
}

void RestrictionConfig::validate() const {
  if (!(eps_tol >= 0.0) || !std::isfinite(eps_tol)) throw ConfigError("eps_tol", "must be a finite value >= 0");
  if (!(mu >= 0.0 && mu <= 0.5)) throw ConfigError("mu", "must lie in [0, 0.5]");
  if (!(heuristic.lambda >= 0.0 && heuristic.lambda <= 1.0)) {
    throw ConfigError("lambda", "must lie in [0, 1]");
  }
  if (heuristic.kind == HeuristicKind::kCoarseGrid && !(heuristic.ratio > 0.0 && heuristic.ratio <= 1.0)) {
    throw ConfigError("ratio", "must lie in (0, 1]");
  }
  if (std::isnan(psi) || psi <= 0.0) throw ConfigError("psi", "must be positive");
  if (method == RestrictionMethod::kSA && branch_and_bound) {
    throw ConfigError("branch_and_bound", "only applies to method aa");
  }
}

RestrictionConfig RestrictionConfig::read(const ConfigDoc& doc, const std::string& section, int dim) {
  const std::string p = section.empty() ? "" : section + ".";
  RestrictionConfig c = defaults(dim);
  try {
    c.method = restriction_method_from_string(doc.get_or(p + "method", to_string(c.method)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p + "method", e.what());
  }
  try {
    c.heuristic.kind = heuristic_kind_from_string(doc.get_or(p + "heuristic", to_string(c.heuristic.kind)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p + "heuristic", e.what());
  }
  c.heuristic.lambda = doc.get_double_or(p + "lambda", c.heuristic.lambda);
  c.heuristic.ratio = doc.get_double_or(p + "ratio", c.heuristic.ratio);
  c.psi = doc.get_double_or(p + "psi", c.psi);
  c.eps_tol = doc.get_double_or(p + "eps_tol", c.eps_tol);
  c.mu = doc.get_double_or(p + "mu", c.mu);
  c.branch_and_bound = doc.get_bool_or(p + "branch_and_bound", c.branch_and_bound);
  c.cache_phi = doc.get_bool_or(p + "cache_phi", c.cache_phi);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(p + e.key(), e.what());
  }
  return c;
}

void RestrictionConfig::write(ConfigDoc& doc, const std::string& section) const {
  const std::string p = section.empty() ? "" : section + ".";
  doc.set(p + "method", to_string(method));
  doc.set(p + "heuristic", to_string(heuristic.kind));
  doc.set(p + "lambda", format_double(heuristic.lambda));
  doc.set(p + "ratio", format_double(heuristic.ratio));
  doc.set(p + "psi", format_double(psi));
  doc.set(p + "eps_tol", format_double(eps_tol));
  doc.set(p + "mu", format_double(mu));
  doc.set(p + "branch_and_bound", branch_and_bound ? "true" : "false");
  doc.set(p + "cache_phi", cache_phi ? "true" : "false");
}

RestrictedResult sa_star_solve(const Grid& grid, const SpeedField& speed, NodeId t, NodeId s,
                               const Heuristic& phi, bool cache_phi) {
  check_endpoints(grid, t, s);
  const std::vector<double> f = speed.sample(grid);
  std::vector<double> table;
  MarchHooks hooks;
  if (cache_phi) {
    table.resize(static_cast<std::size_t>(grid.size()));
    for (NodeId n = 0; n < grid.size(); ++n) table[n] = phi.at_node(grid, n);
    hooks.key_offset = [&table](NodeId n) { return table[n]; };
  } else {
    hooks.key_offset = [&grid, &phi](NodeId n) { return phi.at_node(grid, n); };
  }
  Marcher marcher(grid, f, ExitSet::single(t), std::move(hooks));
  while (auto node = marcher.step()) {
    if (*node == s) break;
  }
  if (!marcher.state().accepted(s)) throw std::runtime_error("source was never reached");
  return finish(std::move(marcher), s, kInf, kInf);
}

RestrictedResult aa_star_solve(const Grid& grid, const SpeedField& speed, NodeId t, NodeId s,
                               const Heuristic& phi, double psi, double eps_tol, double mu,
                               bool branch_and_bound) {
  check_endpoints(grid, t, s);
  if (std::isnan(psi) || psi <= 0.0) throw std::invalid_argument("Psi must be positive");
  if (!(eps_tol >= 0.0) || !(mu >= 0.0 && mu <= 0.5)) {
    throw std::invalid_argument("eps_tol must be >= 0 and mu in [0, 0.5]");
  }
  const double factor = 1.0 + eps_tol * std::pow(grid.h(), mu);
  if (factor * psi < phi.at_node(grid, t)) {
    throw std::invalid_argument("Psi is below phi(t); it cannot overestimate u(s)");
  }
  const std::vector<double> f = speed.sample(grid);
  const Point xs = grid.position(s);
  const double f1 = speed.bounds().f1;
  double current = psi;

  MarchHooks hooks;
  hooks.admit = [&](NodeId n, double u) { return u + phi.at_node(grid, n) <= factor * current; };
  if (branch_and_bound) {
    hooks.on_accept = [&](NodeId n, double u) {
      current = std::min(current, u + eval_psi(grid.position(n), xs, f1, grid.dim()));
    };
  }
  Marcher marcher(grid, f, ExitSet::single(t), std::move(hooks));
  while (auto node = marcher.step()) {
    if (*node == s) break;
  }
  return finish(std::move(marcher), s, psi, current);
}

RestrictedResult restricted_solve(const Grid& grid, const SpeedField& speed, NodeId t, NodeId s,
                                  const Heuristic& phi, const RestrictionConfig& config) {
  config.validate();
  if (config.method == RestrictionMethod::kSA) {
    return sa_star_solve(grid, speed, t, s, phi, config.cache_phi);
  }
  return aa_star_solve(grid, speed, t, s, phi, config.psi, config.eps_tol, config.mu,
                       config.branch_and_bound);
}

RelevanceMasks relevance_sets(const Grid& grid, const std::vector<double>& u,
                              const std::vector<double>& v, const Heuristic& phi, double psi,
                              NodeId s, NodeId t, double f2) {
  const auto n = static_cast<std::size_t>(grid.size());
  if (u.size() != n || v.size() != n) throw std::invalid_argument("value fields do not match the grid");
  check_endpoints(grid, t, s);
  const Point xs = grid.position(s);
  const Point xt = grid.position(t);
  const double reach = f2 * psi;
  RelevanceMasks out;
  out.c1.assign(n, 0);
  out.c2.assign(n, 0);
  out.c3.assign(n, 0);
  for (NodeId i = 0; i < grid.size(); ++i) {
    const Point x = grid.position(i);
    out.c1[i] = distance(x, xs, grid.dim()) + distance(x, xt, grid.dim()) <= reach * (1.0 + 1e-12);
    out.c2[i] = u[i] + phi.at_node(grid, i) <= psi;
    out.c3[i] = u[i] + v[i] <= psi;
  }
  return out;
}

void write_masks_csv(std::ostream& out, const Grid& grid, const RelevanceMasks& masks) {
  static const char* kAxis[] = {"x", "y", "z"};
  out << "node";
  for (int a = 0; a < grid.dim(); ++a) out << ',' << kAxis[a];
  out << ",C1,C2,C3\n";
  std::ostringstream row;
  row.precision(17);
  for (NodeId n = 0; n < grid.size(); ++n) {
    row.str("");
    const Point x = grid.position(n);
    row << n;
    for (int a = 0; a < grid.dim(); ++a) row << ',' << x[a];
    row << ',' << int{masks.c1[n]} << ',' << int{masks.c2[n]} << ',' << int{masks.c3[n]} << '\n';
    out << row.str();
  }
}

}  // namespace eikonal
