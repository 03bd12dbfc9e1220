#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eikonal/fmm.hpp"
#include "eikonal/grid.hpp"
#include "eikonal/speed.hpp"

namespace eikonal {

struct Trajectory {
  std::vector<Point> points;  // s first, t last
  double arclength = 0.0;
};

struct TrajectoryOptions {
  double step = 0.0;   // 0 means h/2
  int max_steps = 0;   // 0 means 50 * m
};

/// Descends -grad U from s with a fixed step until within h of t, then
/// appends t. The gradient is the multilinear interpolant of per-node upwind
/// one-sided differences; nodes with infinite U are left out of the blend.
/// Throws std::runtime_error when the step budget runs out or the gradient
/// is undefined or vanishes.
Trajectory extract_trajectory(const Grid& grid, const std::vector<double>& u, NodeId s, NodeId t,
                              TrajectoryOptions options = {});

/// Composite trapezoid of `integrand` along the polyline.
/// Throws std::domain_error on a nonpositive sample.
double integrate_cost_along(const Trajectory& traj, const std::function<double(const Point&)>& integrand);

struct RelaxOptions {
  double spacing = 0.0;  // 0 means h
  int max_iters = 4000;
  double rel_tol = 1e-12;
};

/// Locally minimizes the trapezoid cost of `cost` along the polyline with
/// fixed endpoints, starting from `initial`. Vertices stay inside the grid
/// box and are redistributed to equal arclength as the descent proceeds.
Trajectory relax_trajectory(const Grid& grid, const Trajectory& initial,
                            const std::function<double(const Point&)>& cost, RelaxOptions options = {});

/// Largest distance from any trajectory point to the segment [a, b].
double hausdorff_to_segment(const Trajectory& traj, const Point& a, const Point& b, int dim);
/// Symmetric Hausdorff distance between two polylines' vertex sets.
double hausdorff(const Trajectory& a, const Trajectory& b, int dim);

struct RunReport {
  std::string method;
  std::string instance;
  int dim = 2;
  int m = 0;
  double lambda = 0.0;
  double psi = 0.0;
  double u_star_s = 0.0;          // U*(s)
  double u_s = 0.0;               // U(s), full FMM
  std::optional<double> u_exact;  // u(s)
  double e_d = 0.0;
  double e_star = 0.0;
  double e_star_n = 0.0;
  double p = 0.0;
  std::int64_t accepted = 0;
  std::int64_t considered = 0;
  double wall_time = 0.0;
  bool psi_fallback = false;
  std::string config_hash;

  static std::string csv_header();
  std::string csv_row() const;
  std::string json() const;
};

/// Fills E_d and E* (when u_exact is given), E*_N and P = (accepted +
/// considered) / m^n. Throws std::invalid_argument when U(s) <= 0.
RunReport compute_metrics(double u_star_s, double u_s, std::optional<double> u_exact,
                          std::int64_t accepted, std::int64_t considered, int m, int n);

struct DependencyGraph {
  std::vector<std::uint8_t> member;  // 1 on G(s)
  std::vector<NodeId> nodes;         // G(s), decreasing accept rank
};

/// Nodes reachable from s along recorded upwind parents.
/// Throws std::invalid_argument when s is not accepted.
DependencyGraph dependency_graph(const SolverState& state, NodeId s);

struct SensitivityField {
  std::vector<double> alpha;
  /// Transition probabilities to the recorded parents, in parent order.
  std::vector<std::array<double, 3>> beta;
  /// Mass that reached exit nodes (t and any restriction boundary).
  double absorbed = 0.0;
};

/// Routing probabilities at one node, proportional to U - U_parent over its
/// recorded parents. Exits and untouched nodes get all zeros.
std::array<double, 3> transition_weights(const SolverState& state, NodeId node);

/// Forward push of unit mass from s in decreasing accept rank.
/// Throws std::invalid_argument when s is not accepted.
SensitivityField sensitivity_alphas(const SolverState& state, NodeId s);

struct DecayPoint {
  int probe = 0;
  double d = 0.0;      // distance from the peak along the probe line
  double alpha = 0.0;
};

struct DecayFit {
  double slope = 0.0;      // of ln(alpha) against d^2 / h
  double intercept = 0.0;
  bool monotone = true;    // alpha nonincreasing away from the peak on every probe side
  std::vector<DecayPoint> points;
};

struct DecayOptions {
  std::vector<double> arc_fractions{1.0 / 3.0, 2.0 / 3.0};
  double floor = 1e-12;  // stop a probe once alpha falls below floor * peak
};

/// Samples alpha (multilinear in ln alpha) along lines normal to the
/// trajectory at the given arc fractions, spacing h, and regresses.
/// Throws std::runtime_error with fewer than 5 usable points.
DecayFit conjecture_decay_fit(const Grid& grid, const std::vector<double>& alpha,
                              const Trajectory& traj, DecayOptions options = {});

/// Nodes outside `mask` with a stencil neighbor inside it.
std::vector<NodeId> boundary_of(const Grid& grid, const std::vector<std::uint8_t>& mask);

struct BoundarySolve {
  SolverState state;
  std::vector<NodeId> xi;
};

/// FMM on X^ plus its outside neighbors Xi, with t and Xi as exits
/// (`q` read per node on Xi; +inf allowed). Throws std::invalid_argument
/// when t is outside X^.
BoundarySolve restricted_solve_with_boundary(const Grid& grid, std::span<const double> speed, NodeId t,
                                             const std::vector<std::uint8_t>& mask,
                                             const std::vector<double>& q);

/// max over X^ of the shortest grid-aligned path length to t inside X^,
/// divided by F1; +inf if some node of X^ cannot reach t.
double grid_path_bound(const Grid& grid, const std::vector<std::uint8_t>& mask, NodeId t, double f1);

/// Sum over Xi of alpha * (q - U). Throws std::invalid_argument when q < U
/// somewhere on Xi.
double restriction_error_bound(const std::vector<double>& alpha, std::span<const NodeId> xi,
                               const std::vector<double>& q, const std::vector<double>& u);
/// C * sum over Xi of alpha.
double restriction_error_bound(const std::vector<double>& alpha, std::span<const NodeId> xi, double c);

}  // namespace eikonal
