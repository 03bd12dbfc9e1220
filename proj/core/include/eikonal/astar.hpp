#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "eikonal/config.hpp"
#include "eikonal/fmm.hpp"
#include "eikonal/grid.hpp"
#include "eikonal/heuristics.hpp"
#include "eikonal/speed.hpp"

namespace eikonal {

enum class RestrictionMethod { kSA, kAA };

const char* to_string(RestrictionMethod method);
RestrictionMethod restriction_method_from_string(const std::string& name);

struct HeuristicSpec {
  HeuristicKind kind = HeuristicKind::kNaive;
  double lambda = 1.0;
  double ratio = 0.1;  // coarse_grid only
};

/// Builds phi for source s. The oracle kind runs a full solve from s.
Heuristic build_heuristic(const HeuristicSpec& spec, const Grid& grid, const SpeedField& speed,
                          NodeId s);

struct RestrictionConfig {
  RestrictionMethod method = RestrictionMethod::kAA;
  HeuristicSpec heuristic;
  double psi = std::numeric_limits<double>::infinity();  // AA only
  double eps_tol = 0.25;
  double mu = 0.5;
  bool branch_and_bound = false;  // AA only
  bool cache_phi = true;          // SA only

  /// Defaults for the given dimension (eps_tol = 1/4 in 2D, 1/3 in 3D).
  static RestrictionConfig defaults(int dim);

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// Reads and writes keys under `section`.
  static RestrictionConfig read(const ConfigDoc& doc, const std::string& section, int dim);
  void write(ConfigDoc& doc, const std::string& section) const;
};

struct RestrictedResult {
  SolverState state;
  double value_at_source = 0.0;  // U*(s)
  bool psi_fallback = false;     // queue emptied first; U*(s) is the final Psi
  double initial_psi = 0.0;
  double final_psi = 0.0;        // after branch and bound
  double fraction = 0.0;         // P
};

/// FMM from exit t keyed by U + phi, stopping once s is accepted.
RestrictedResult sa_star_solve(const Grid& grid, const SpeedField& speed, NodeId t, NodeId s,
                               const Heuristic& phi, bool cache_phi = true);

/// FMM from exit t keyed by U; a node may become CONSIDERED only while
/// U + phi <= (1 + eps_tol * h^mu) * Psi. With branch and bound, each
/// acceptance lowers Psi to U(x) + |x - s| / F1 when smaller.
/// Throws std::invalid_argument if the bound already excludes t.
RestrictedResult aa_star_solve(const Grid& grid, const SpeedField& speed, NodeId t, NodeId s,
                               const Heuristic& phi, double psi, double eps_tol, double mu,
                               bool branch_and_bound = false);

/// Dispatches on `config.method`.
RestrictedResult restricted_solve(const Grid& grid, const SpeedField& speed, NodeId t, NodeId s,
                                  const Heuristic& phi, const RestrictionConfig& config);

struct RelevanceMasks {
  std::vector<std::uint8_t> c1;  // |x - s| + |x - t| <= F2 Psi
  std::vector<std::uint8_t> c2;  // u + phi <= Psi
  std::vector<std::uint8_t> c3;  // u + v <= Psi
};

/// `u` solved from t and `v` from s, both over the whole grid.
RelevanceMasks relevance_sets(const Grid& grid, const std::vector<double>& u,
                              const std::vector<double>& v, const Heuristic& phi, double psi,
                              NodeId s, NodeId t, double f2);

/// CSV: node,x,y[,z],C1,C2,C3.
void write_masks_csv(std::ostream& out, const Grid& grid, const RelevanceMasks& masks);

}  // namespace eikonal
