#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eikonal/grid.hpp"
#include "eikonal/indexed_heap.hpp"
#include "eikonal/speed.hpp"

namespace eikonal {

enum class Label : std::uint8_t { kFar = 0, kConsidered = 1, kAccepted = 2 };

const char* to_string(Label label);

/// How a node's value was produced.
enum class Branch : std::uint8_t {
  kNone = 0,      // never updated
  kExit = 1,      // boundary value q
  kOneSided = 2,  // single upwind neighbor
  kTwoSided = 3,  // quadratic in two axis minima
  kThreeSided = 4 // quadratic in three axis minima
};

/// Upwind neighbors whose values produced U at a node. The values themselves
/// are the parents' final U, since parents are accepted first.
struct UpwindRecord {
  std::array<NodeId, 3> parents{kNoNode, kNoNode, kNoNode};
  std::uint8_t count = 0;
  Branch branch = Branch::kNone;
};

/// Exit nodes and their penalties q (0 by default, +inf allowed).
struct ExitSet {
  std::vector<NodeId> nodes;
  std::vector<double> q;

  static ExitSet single(NodeId node, double penalty = 0.0) { return {{node}, {penalty}}; }
  /// Throws std::invalid_argument if empty, mismatched, or any q is negative/NaN.
  void validate(const Grid& grid) const;
};

/// Result of one marching run.
struct SolverState {
  Grid grid;
  std::vector<double> value;          // U, +inf where untouched
  std::vector<Label> label;
  std::vector<std::int32_t> accept_rank;  // -1 when not accepted
  std::vector<UpwindRecord> upwind;
  std::vector<NodeId> accept_order;
  std::int64_t considered_count = 0;  // CONSIDERED at termination
  std::int64_t accepted_count = 0;

  bool accepted(NodeId n) const { return label[n] == Label::kAccepted; }
  /// (accepted + considered) / m^n.
  double fraction_computed() const {
    return static_cast<double>(accepted_count + considered_count) / static_cast<double>(grid.size());
  }
};

/// Outcome of the upwind update at one node.
struct LocalUpdate {
  double value = 0.0;
  int terms = 0;                   // 1: one-sided, 2/3: quadratic
  std::array<int, 3> axes{-1, -1, -1};  // indices into the input span, ascending by value
};

/// Solves the upwind discretization at one node from per-axis minimum neighbor
/// values (+inf where absent). Uses the largest set of smallest values whose
/// quadratic root stays above all of them, falling back to the one-sided
/// update min + h/f. Throws std::invalid_argument if every value is infinite.
LocalUpdate local_update(std::span<const double> axis_values, double h, double f);

/// Policy hooks for a marching run. Defaults give plain FMM.
struct MarchHooks {
  /// Added to U to form the heap key (SA* ordering).
  std::function<double(NodeId)> key_offset;
  /// Gate for FAR -> CONSIDERED with the candidate value (AA* condition).
  std::function<bool(NodeId, double)> admit;
  /// Called right after a node is accepted.
  std::function<void(NodeId, double)> on_accept;
};

/// Dijkstra-structured upwind solver, advanced one acceptance at a time.
class Marcher {
 public:
  /// `speed` holds f sampled at every lattice node. `active`, if given, marks
  /// the nodes that exist; the rest are absent from every stencil. Both must
  /// outlive the marcher.
  Marcher(const Grid& grid, std::span<const double> speed, const ExitSet& exits,
          MarchHooks hooks = {}, const std::vector<std::uint8_t>* active = nullptr);

  /// Accepts the next node; nullopt once the queue is empty.
  std::optional<NodeId> step();
  bool exhausted() const { return heap_.empty(); }

  const SolverState& state() const { return state_; }
  SolverState take_state() &&;

 private:
  void relax(NodeId node);
  bool is_active(NodeId n) const { return active_ == nullptr || (*active_)[n] != 0; }

  const Grid* grid_;
  std::span<const double> speed_;
  MarchHooks hooks_;
  const std::vector<std::uint8_t>* active_;
  std::vector<std::uint8_t> fixed_;
  IndexedHeap heap_;
  SolverState state_;
};

/// Full sweep when `stop_at` is empty; otherwise stops right after that node
/// is accepted. Throws std::runtime_error if the stop node is never reached.
SolverState fmm_solve(const Grid& grid, const SpeedField& speed, const ExitSet& exits,
                      std::optional<NodeId> stop_at = std::nullopt);
SolverState fmm_solve(const Grid& grid, std::span<const double> speed, const ExitSet& exits,
                      std::optional<NodeId> stop_at = std::nullopt,
                      const std::vector<std::uint8_t>* active = nullptr);

struct BidirectionalResult {
  NodeId meeting_node = kNoNode;
  double value = 0.0;  // u(meeting) + v(meeting)
  SolverState from_target;  // u, exit {t}
  SolverState from_source;  // v, exit {s}
  std::int64_t accepted_union = 0;
};

/// Two FMM fronts, one from t and one from s, strictly alternating single
/// acceptances (target side first) until some node is accepted by both.
BidirectionalResult bidirectional_solve(const Grid& grid, const SpeedField& speed, NodeId s,
                                        NodeId t);

/// Residual of the discrete equation at an accepted node, measured in time
/// units: | sqrt(sum over axes of max(U - U_axis, 0)^2) - h/f |, with U_axis the
/// smallest accepted neighbor value on that axis.
double discretization_residual(const SolverState& state, std::span<const double> speed,
                               NodeId node);

/// CSV: node,x,y[,z],U,label,accept_rank plus any extra named columns.
struct ExtraColumn {
  std::string name;
  const std::vector<double>* values;
};
void write_state_csv(std::ostream& out, const SolverState& state,
                     std::span<const ExtraColumn> extra = {});

/// Reads the U column of a state CSV back into a per-node table. Nodes absent
/// from the file are +inf. Throws on a header mismatch or out-of-range node.
std::vector<double> read_value_table_csv(std::istream& in, const Grid& grid,
                                         const std::string& column = "U");

}  // namespace eikonal
