#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eikonal/analysis.hpp"
#include "eikonal/astar.hpp"
#include "eikonal/config.hpp"
#include "eikonal/fmm.hpp"
#include "eikonal/grid.hpp"
#include "eikonal/heuristics.hpp"
#include "eikonal/speed.hpp"

namespace harness {

using eikonal::ConfigDoc;
using eikonal::Grid;
using eikonal::NodeId;
using eikonal::Point;
using eikonal::SpeedField;

enum class Method { kFmm, kFmmStop, kBidir, kSA, kAA, kAABB };

const char* to_string(Method m);
Method method_from_string(const std::string& name);

struct ExperimentConfig {
  std::string instance = "const2d";  // const2d, const3d, sin2d, sin3d, sampled, observers
  double amplitude = 0.35;           // sin3d
  std::string sampled_path;
  std::optional<Point> s;
  std::optional<Point> t;
  std::vector<Method> methods{Method::kFmm, Method::kSA, Method::kAA};
  std::vector<int> m{101};
  std::vector<double> lambda{1.0};
  eikonal::HeuristicKind heuristic = eikonal::HeuristicKind::kNaive;
  double ratio = 0.1;
  std::string psi = "psi1";  // psi1, psi2, psi3, oracle, path, path_base, path_local, inf, or a number
  /// Pass (1 + eps_tol h^mu) * Psi to the solver, which applies the same factor
  /// again in its admission test.
  bool psi_inflate = true;
  std::optional<double> eps_tol;  // dimension default when empty
  double mu = 0.5;
  bool cache_phi = true;
  int repeat = 1;
  bool timing = true;
  int truth_m = 0;  // fine-grid reference for E_d on instances without a closed form
  std::uint64_t seed = 1;
  std::string csv_path;
  std::string json_path;

  static ExperimentConfig from_doc(const ConfigDoc& doc);
  ConfigDoc to_doc() const;
  /// FNV-1a of the canonical text.
  std::string hash() const;
  int dim() const { return instance == "const3d" || instance == "sin3d" ? 3 : 2; }
  void validate() const;
};

/// Grid, speed and endpoints of one instance at resolution m.
struct Instance {
  Grid grid;
  SpeedField speed;
  SpeedField base_speed;  // f0 before any running cost
  NodeId s = eikonal::kNoNode;
  NodeId t = eikonal::kNoNode;
  std::optional<double> exact;  // u(s) when known in closed form
};

Instance make_instance(const ExperimentConfig& cfg, int m);

/// Resolves the Psi spec for an instance (before any inflation).
double resolve_psi(const ExperimentConfig& cfg, const Instance& inst);
/// The Psi handed to the AA* solver.
double solver_psi(const ExperimentConfig& cfg, const Instance& inst);
double eps_for(const ExperimentConfig& cfg, int dim);

eikonal::Heuristic make_heuristic(const ExperimentConfig& cfg, const Instance& inst, double lambda);

struct MethodRun {
  eikonal::RunReport report;
  eikonal::SolverState state;  // empty grid for bidir
};

/// Runs one method and fills its report (without config hash).
MethodRun run_method(const ExperimentConfig& cfg, const Instance& inst, Method method, double lambda,
                     double u_s, double psi);

std::vector<eikonal::RunReport> run_experiment(const ExperimentConfig& cfg);

void write_reports_csv(std::ostream& out, const std::vector<eikonal::RunReport>& rows);
void write_reports_json(std::ostream& out, const std::vector<eikonal::RunReport>& rows);

/// Writes U/labels, alpha and mask CSVs into `dir`; returns the written paths.
std::vector<std::string> dump_fields(const ExperimentConfig& cfg, const std::vector<std::string>& which,
                                     const std::string& dir);

}  // namespace harness
