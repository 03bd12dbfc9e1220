#include "eikonal/fmm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace eikonal {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(Label label) {
  switch (label) {
    case Label::kFar:
      return "far";
    case Label::kConsidered:
      return "considered";
    case Label::kAccepted:
      return "accepted";
  }
  return "?";
}

void ExitSet::validate(const Grid& grid) const {
  if (nodes.empty()) throw std::invalid_argument("exit set is empty");
  if (nodes.size() != q.size()) throw std::invalid_argument("exit set penalties mismatch nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!grid.valid(nodes[i])) throw std::invalid_argument("exit node outside the grid");
    if (std::isnan(q[i]) || q[i] < 0.0) throw std::invalid_argument("exit penalty must be >= 0");
  }
}

LocalUpdate local_update(std::span<const double> axis_values, double h, double f) {
  if (axis_values.empty() || axis_values.size() > 3) {
    throw std::invalid_argument("local_update expects 1 to 3 axis values");
  }
  if (!(h > 0.0) || !(f > 0.0)) throw std::invalid_argument("local_update needs h > 0 and f > 0");

  std::array<int, 3> order{0, 1, 2};
  int finite = 0;
  for (int i = 0; i < static_cast<int>(axis_values.size()); ++i) {
    if (std::isfinite(axis_values[i])) order[finite++] = i;
  }
  if (finite == 0) throw std::invalid_argument("local_update needs a finite upwind value");
  std::sort(order.begin(), order.begin() + finite, [&](int a, int b) {
    return axis_values[a] < axis_values[b] || (axis_values[a] == axis_values[b] && a < b);
  });

  const double step = h / f;
  LocalUpdate out;
  for (int k = finite; k >= 2; --k) {
    // Shift by the largest value used so the root is W = U - top >= 0.
    const double top = axis_values[order[k - 1]];
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < k; ++i) {
      const double d = top - axis_values[order[i]];
      sum += d;
      sum_sq += d * d;
    }
    if (sum_sq < step * step) {
      const double disc = sum * sum - k * (sum_sq - step * step);
      out.value = top + (std::sqrt(disc) - sum) / k;
      out.terms = k;
      for (int i = 0; i < k; ++i) out.axes[i] = order[i];
      return out;
    }
  }
  out.value = axis_values[order[0]] + step;
  out.terms = 1;
  out.axes[0] = order[0];
  return out;
}

Marcher::Marcher(const Grid& grid, std::span<const double> speed, const ExitSet& exits,
                 MarchHooks hooks, const std::vector<std::uint8_t>* active)
    : grid_(&grid),
      speed_(speed),
      hooks_(std::move(hooks)),
      active_(active),
      fixed_(static_cast<std::size_t>(grid.size()), 0),
      heap_(grid.size()),
      state_{grid, {}, {}, {}, {}, {}, 0, 0} {
  exits.validate(grid);
  if (speed.size() != static_cast<std::size_t>(grid.size())) {
    throw std::invalid_argument("speed samples do not match the grid");
  }
  if (active != nullptr && active->size() != static_cast<std::size_t>(grid.size())) {
    throw std::invalid_argument("active mask does not match the grid");
  }
  const auto n = static_cast<std::size_t>(grid.size());
  state_.value.assign(n, kInf);
  state_.label.assign(n, Label::kFar);
  state_.accept_rank.assign(n, -1);
  state_.upwind.assign(n, UpwindRecord{});

  for (std::size_t i = 0; i < exits.nodes.size(); ++i) {
    const NodeId node = exits.nodes[i];
    fixed_[node] = 1;
    if (!std::isfinite(exits.q[i]) || !is_active(node)) continue;
    if (heap_.contains(node)) {
      if (exits.q[i] < state_.value[node]) {
        state_.value[node] = exits.q[i];
        heap_.update(node, exits.q[i] + (hooks_.key_offset ? hooks_.key_offset(node) : 0.0));
      }
      continue;
    }
    state_.value[node] = exits.q[i];
    state_.label[node] = Label::kConsidered;
    state_.upwind[node].branch = Branch::kExit;
    ++state_.considered_count;
    heap_.push(node, exits.q[i] + (hooks_.key_offset ? hooks_.key_offset(node) : 0.0));
  }
}

std::optional<NodeId> Marcher::step() {
  if (heap_.empty()) return std::nullopt;
  const NodeId node = heap_.pop().first;
  state_.label[node] = Label::kAccepted;
  state_.accept_rank[node] = static_cast<std::int32_t>(state_.accepted_count);
  state_.accept_order.push_back(node);
  ++state_.accepted_count;
  --state_.considered_count;
  if (hooks_.on_accept) hooks_.on_accept(node, state_.value[node]);
  relax(node);
  return node;
}

void Marcher::relax(NodeId node) {
  const Grid& g = *grid_;
  const int dim = g.dim();
  const int m = g.m();
  const MultiIndex base = g.multi_index(node);

  for (int axis = 0; axis < dim; ++axis) {
    for (int dir = -1; dir <= 1; dir += 2) {
      const int c = base[axis] + dir;
      if (c < 0 || c >= m) continue;
      const NodeId nb = node + dir * g.stride(axis);
      if (state_.label[nb] == Label::kAccepted || fixed_[nb] || !is_active(nb)) continue;

      MultiIndex idx = base;
      idx[axis] = c;
      std::array<double, 3> vals{kInf, kInf, kInf};
      std::array<NodeId, 3> who{kNoNode, kNoNode, kNoNode};
      for (int a = 0; a < dim; ++a) {
        for (int d = -1; d <= 1; d += 2) {
          const int cc = idx[a] + d;
          if (cc < 0 || cc >= m) continue;
          const NodeId n2 = nb + d * g.stride(a);
          if (state_.label[n2] != Label::kAccepted) continue;
          const double v = state_.value[n2];
          if (v < vals[a]) {
            vals[a] = v;
            who[a] = n2;
          }
        }
      }
      const LocalUpdate up = local_update(std::span<const double>(vals.data(), dim), g.h(), speed_[nb]);
      if (!(up.value < state_.value[nb])) continue;

      if (state_.label[nb] == Label::kFar) {
        if (hooks_.admit && !hooks_.admit(nb, up.value)) continue;
        state_.label[nb] = Label::kConsidered;
        ++state_.considered_count;
      }
      state_.value[nb] = up.value;
      UpwindRecord& rec = state_.upwind[nb];
      rec = UpwindRecord{};
      rec.count = static_cast<std::uint8_t>(up.terms);
      rec.branch = static_cast<Branch>(static_cast<int>(Branch::kOneSided) + up.terms - 1);
      for (int i = 0; i < up.terms; ++i) rec.parents[i] = who[up.axes[i]];

      const double key = up.value + (hooks_.key_offset ? hooks_.key_offset(nb) : 0.0);
      if (heap_.contains(nb)) {
        heap_.update(nb, key);
      } else {
        heap_.push(nb, key);
      }
    }
  }
}

SolverState Marcher::take_state() && { return std::move(state_); }

SolverState fmm_solve(const Grid& grid, std::span<const double> speed, const ExitSet& exits,
                      std::optional<NodeId> stop_at, const std::vector<std::uint8_t>* active) {
  if (stop_at && !grid.valid(*stop_at)) throw std::invalid_argument("stop node outside the grid");
  Marcher marcher(grid, speed, exits, {}, active);
  while (auto node = marcher.step()) {
    if (stop_at && *node == *stop_at) break;
  }
  if (stop_at && !marcher.state().accepted(*stop_at)) {
    throw std::runtime_error("stop node was never reached");
  }
  return std::move(marcher).take_state();
}

SolverState fmm_solve(const Grid& grid, const SpeedField& speed, const ExitSet& exits,
                      std::optional<NodeId> stop_at) {
  const std::vector<double> f = speed.sample(grid);
  return fmm_solve(grid, std::span<const double>(f), exits, stop_at);
}

BidirectionalResult bidirectional_solve(const Grid& grid, const SpeedField& speed, NodeId s,
                                        NodeId t) {
  if (!grid.valid(s) || !grid.valid(t)) throw std::invalid_argument("node outside the grid");
  if (s == t) throw std::invalid_argument("bidirectional solve needs distinct source and target");
  const std::vector<double> f = speed.sample(grid);
  const ExitSet from_t = ExitSet::single(t);
  const ExitSet from_s = ExitSet::single(s);
  Marcher forward(grid, f, from_t);
  Marcher backward(grid, f, from_s);

  NodeId meet = kNoNode;
  bool target_turn = true;
  while (meet == kNoNode) {
    Marcher& self = target_turn ? forward : backward;
    const Marcher& other = target_turn ? backward : forward;
    const auto node = self.step();
    if (!node) {
      if (forward.exhausted() && backward.exhausted()) {
        throw std::runtime_error("fronts never met");
      }
    } else if (other.state().accepted(*node)) {
      meet = *node;
    }
    target_turn = !target_turn;
  }

  BidirectionalResult out;
  out.meeting_node = meet;
  out.from_target = std::move(forward).take_state();
  out.from_source = std::move(backward).take_state();
  out.value = out.from_target.value[meet] + out.from_source.value[meet];
  std::int64_t both = 0;
  for (NodeId n = 0; n < grid.size(); ++n) {
    if (out.from_target.accepted(n) && out.from_source.accepted(n)) ++both;
  }
  out.accepted_union = out.from_target.accepted_count + out.from_source.accepted_count - both;
  return out;
}

double discretization_residual(const SolverState& state, std::span<const double> speed,
                               NodeId node) {
  const Grid& g = state.grid;
  const double u = state.value[node];
  const MultiIndex idx = g.multi_index(node);
  double sum_sq = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    double best = kInf;
    for (int d = -1; d <= 1; d += 2) {
      const int c = idx[a] + d;
      if (c < 0 || c >= g.m()) continue;
      const NodeId n2 = node + d * g.stride(a);
      if (state.accepted(n2)) best = std::min(best, state.value[n2]);
    }
    if (best < u) sum_sq += (u - best) * (u - best);
  }
  return std::abs(std::sqrt(sum_sq) - g.h() / speed[node]);
}

void write_state_csv(std::ostream& out, const SolverState& state, std::span<const ExtraColumn> extra) {
  const Grid& g = state.grid;
  static const char* kAxis[] = {"x", "y", "z"};
  out << "node";
  for (int a = 0; a < g.dim(); ++a) out << ',' << kAxis[a];
  out << ",U,label,accept_rank";
  for (const auto& col : extra) out << ',' << col.name;
  out << '\n';
  std::ostringstream row;
  row.precision(17);
  for (NodeId n = 0; n < g.size(); ++n) {
    row.str("");
    const Point x = g.position(n);
    row << n;
    for (int a = 0; a < g.dim(); ++a) row << ',' << x[a];
    row << ',';
    if (std::isfinite(state.value[n])) {
      row << state.value[n];
    } else {
      row << "inf";
    }
    row << ',' << to_string(state.label[n]) << ',' << state.accept_rank[n];
    for (const auto& col : extra) row << ',' << (*col.values)[n];
    row << '\n';
    out << row.str();
  }
}

std::vector<double> read_value_table_csv(std::istream& in, const Grid& grid, const std::string& column) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty value table");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "node") throw std::invalid_argument("value table lacks a node column");
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw std::invalid_argument("value table lacks column '" + column + "'");
  const auto col = static_cast<std::size_t>(it - header.begin());

  std::vector<double> table(static_cast<std::size_t>(grid.size()), kInf);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() <= col) throw std::invalid_argument("short row in value table");
    const long node = std::stol(cells[0]);
    if (node < 0 || node >= grid.size()) throw std::invalid_argument("node index out of range in value table");
    table[node] = cells[col] == "inf" ? kInf : std::stod(cells[col]);
  }
  return table;
}

}  // namespace eikonal
