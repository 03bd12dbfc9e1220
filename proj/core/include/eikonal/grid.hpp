#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace eikonal {

/// Linear node index into a Grid, row-major over (i, j[, k]).
using NodeId = std::int32_t;

inline constexpr NodeId kNoNode = -1;

/// Coordinates in domain units. Components past Grid::dim() are zero.
using Point = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

/// Axis-aligned box. Only the first `dim` components are meaningful.
struct Box {
  Point lo{0.0, 0.0, 0.0};
  Point hi{1.0, 1.0, 1.0};
};

/// Up to 2*dim axis neighbors in the order (-x, +x, -y, +y[, -z, +z]).
struct NeighborList {
  std::array<NodeId, 6> ids{};
  int count = 0;

  const NodeId* begin() const { return ids.data(); }
  const NodeId* end() const { return ids.data() + count; }
  int size() const { return count; }
};

/// Uniform Cartesian lattice with m nodes per side over a cubic box.
/// Immutable after construction.
class Grid {
 public:
  /// Throws std::invalid_argument for dim not in {2,3}, m < 2, a degenerate or
  /// non-cubic box, or a node count that does not fit NodeId.
  static Grid make(int dim, int m, std::optional<Box> bounds = std::nullopt);

  int dim() const { return dim_; }
  int m() const { return m_; }
  double h() const { return h_; }
  const Box& bounds() const { return bounds_; }
  double side() const { return bounds_.hi[0] - bounds_.lo[0]; }
  NodeId size() const { return size_; }

  bool valid(NodeId node) const { return node >= 0 && node < size_; }
  bool valid(const MultiIndex& idx) const;

  MultiIndex multi_index(NodeId node) const;
  NodeId linear(const MultiIndex& idx) const;

  Point position(NodeId node) const;
  bool contains(const Point& x, double tol = 1e-12) const;

  /// Node at lattice point x. Throws std::out_of_range if x is outside the box,
  /// and std::invalid_argument if x is farther than snap_tol*h from a lattice
  /// point unless `snap` is set, in which case the nearest node is returned.
  NodeId node_at(const Point& x, bool snap = false, double snap_tol = 1e-9) const;

  NeighborList neighbors(NodeId node) const;

  /// Neighbor of `node` one step along `axis` in direction `dir` (-1 or +1),
  /// or kNoNode when that would leave the grid.
  NodeId step(NodeId node, int axis, int dir) const {
    const MultiIndex idx = multi_index(node);
    const int c = idx[axis] + dir;
    if (c < 0 || c >= m_) return kNoNode;
    return node + dir * stride_[axis];
  }

  NodeId stride(int axis) const { return stride_[axis]; }

  bool operator==(const Grid& other) const;

 /// The 2x2 lattice on the unit square.
  Grid() = default;

 private:
  int dim_ = 2;
  int m_ = 2;
  double h_ = 1.0;
  Box bounds_{};
  NodeId size_ = 4;
  std::array<NodeId, 3> stride_{2, 1, 1};
};

/// Euclidean distance using the first `dim` components.
double distance(const Point& a, const Point& b, int dim);

}  // namespace eikonal
