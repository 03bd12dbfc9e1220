#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eikonal/grid.hpp"
#include "eikonal/speed.hpp"

namespace eikonal {

enum class HeuristicKind { kZero, kNaive, kCoarseGrid, kOracle, kHigherSpeed };

const char* to_string(HeuristicKind kind);
HeuristicKind heuristic_kind_from_string(const std::string& name);

/// Underestimate phi(x) <= v(x) of the travel time from the source s to x.
///
/// naive:        lambda * |x - s| / F2
/// coarse_grid:  lambda * (multilinear interpolant of V on a coarser lattice)
/// oracle:       lambda * V(x), V solved on the same lattice
/// higher_speed: v0(x), the value function of a faster speed field
/// zero:         0
class Heuristic {
 public:
  static Heuristic zero();
  static Heuristic naive(const Point& source, double f2, double lambda, int dim);
  /// `values` is V per node of `grid`.
  static Heuristic oracle(const Grid& grid, std::vector<double> values, double lambda);
  /// Solves V from the node nearest `source` on a lattice with round(R*m)
  /// nodes per side (at least 2) and interpolates it.
  static Heuristic coarse_grid(const Grid& fine, const SpeedField& speed, const Point& source,
                               double ratio, double lambda = 0.5);
  static Heuristic higher_speed(const Grid& grid, std::vector<double> values);

  HeuristicKind kind() const { return kind_; }
  double lambda() const { return lambda_; }

  /// phi(x) at an arbitrary point. Throws std::logic_error for a table-backed
  /// kind without a table.
  double operator()(const Point& x) const;
  double eval(const Point& x) const { return (*this)(x); }

  /// phi at a node of `grid`; exact table lookup when the table lives on it.
  double at_node(const Grid& grid, NodeId node) const;

 private:
  Heuristic() = default;

  HeuristicKind kind_ = HeuristicKind::kZero;
  double lambda_ = 0.0;
  Point source_{};
  double f2_ = 1.0;
  int dim_ = 2;
  std::optional<Grid> table_grid_;
  std::vector<double> table_;
};

/// Multilinear interpolation of per-node values at x (clamped to the box).
/// Corners with infinite values are dropped and the weights renormalized.
double interpolate(const Grid& grid, const std::vector<double>& values, const Point& x);

enum class PsiKind { kPsi1, kPsi2, kPsi3, kCustomPath, kExternal };

const char* to_string(PsiKind kind);

/// Scalar overestimate Psi >= u(s) together with the pointwise psi(x) used by
/// branch and bound.
struct OverestimatePack {
  double psi_scalar = 0.0;
  PsiKind provenance = PsiKind::kExternal;
  Point source{};
  double f1 = 1.0;
  int dim = 2;

  /// |x - s| / F1.
  double pointwise(const Point& x) const;
};

/// Psi1 = |s-t|/F1; Psi2 = line integral of the slowness along the segment
/// (composite Simpson, `quadrature_intervals` defaulting to 4*m, inflated by
/// ten times the estimated relative quadrature error); Psi3 = U(s) of a full
/// solve. Throws std::invalid_argument when s == t.
double compute_psi(PsiKind kind, const Grid& grid, const SpeedField& speed, NodeId s, NodeId t,
                   std::optional<int> quadrature_intervals = std::nullopt);

/// Straight-segment slowness integral by composite Simpson with n intervals
/// (n rounded up to even). Throws std::domain_error on a nonpositive sample.
double segment_slowness_simpson(const SpeedField& speed, const Point& s, const Point& t, int dim,
                                int intervals);

/// psi(x) = |x - s| / F1.
double eval_psi(const Point& x, const Point& s, double f1, int dim);

struct EllipseAxes {
  double major = 0.0;  // a = F2 Psi / 2
  double minor = 0.0;  // b = sqrt(F2^2 Psi^2 - d^2) / 2
};

/// Throws std::invalid_argument when F2 * Psi < |s - t|.
EllipseAxes ellipse_axes(const Point& s, const Point& t, double f2, double psi, int dim);
/// |x - s| + |x - t| <= F2 * Psi (with 1e-12 relative slack for rounding).
bool ellipse_contains(const Point& x, const Point& s, const Point& t, double f2, double psi,
                      int dim);

/// Volume of the unit n-ball divided by the volume of its bounding box.
double ellipse_volume_fraction(int n);

struct ConsistencyReport {
  bool consistent = true;
  double max_violation = 0.0;     // max of |dphi| - lambda_required * |dx|
  double max_lipschitz = 0.0;     // max of |dphi| / |dx| over neighbor pairs
  NodeId worst_a = kNoNode;
  NodeId worst_b = kNoNode;
  std::size_t violating_pairs = 0;
};

/// Checks |phi(x_i) - phi(x_j)| <= lambda_required * |x_i - x_j| on every
/// neighbor pair. On the 4-point stencil only lambda_required = 0 guarantees
/// SA* ordering, so that is the default.
ConsistencyReport check_consistency(const Heuristic& phi, const Grid& grid,
                                    double lambda_required = 0.0, double tol = 1e-14);

}  // namespace eikonal
