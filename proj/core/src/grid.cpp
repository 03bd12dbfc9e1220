#include "eikonal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eikonal {

Grid Grid::make(int dim, int m, std::optional<Box> bounds) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (m < 2) {
    throw std::invalid_argument("grid needs at least 2 nodes per side, got " + std::to_string(m));
  }
  const double total = std::pow(static_cast<double>(m), dim);
  if (total > static_cast<double>(std::numeric_limits<NodeId>::max())) {
    throw std::invalid_argument("grid too large for 32-bit node indices");
  }

  Grid g;
  g.dim_ = dim;
  g.m_ = m;
  g.bounds_ = bounds.value_or(Box{});
  for (int a = dim; a < 3; ++a) {
    g.bounds_.lo[a] = 0.0;
    g.bounds_.hi[a] = 0.0;
  }
  const double side = g.bounds_.hi[0] - g.bounds_.lo[0];
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw std::invalid_argument("grid bounds are degenerate");
  }
  for (int a = 1; a < dim; ++a) {
    const double s = g.bounds_.hi[a] - g.bounds_.lo[a];
    if (std::abs(s - side) > 1e-12 * side) {
      throw std::invalid_argument("grid bounds must be a cube (equal side lengths)");
    }
  }
  g.h_ = side / static_cast<double>(m - 1);
  g.size_ = static_cast<NodeId>(total);
  // Row-major over (i, j, k): i is the slowest index.
  g.stride_ = {0, 0, 0};
  NodeId s = 1;
  for (int a = dim - 1; a >= 0; --a) {
    g.stride_[a] = s;
    s *= m;
  }
  return g;
}

bool Grid::valid(const MultiIndex& idx) const {
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] < 0 || idx[a] >= m_) return false;
  }
  return true;
}

MultiIndex Grid::multi_index(NodeId node) const {
  MultiIndex idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = (node / stride_[a]) % m_;
  }
  return idx;
}

NodeId Grid::linear(const MultiIndex& idx) const {
  NodeId n = 0;
  for (int a = 0; a < dim_; ++a) n += idx[a] * stride_[a];
  return n;
}

Point Grid::position(NodeId node) const {
  const MultiIndex idx = multi_index(node);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    // Pin the last node to hi exactly so round trips are exact at the border.
    x[a] = idx[a] == m_ - 1 ? bounds_.hi[a] : bounds_.lo[a] + h_ * idx[a];
  }
  return x;
}

bool Grid::contains(const Point& x, double tol) const {
  for (int a = 0; a < dim_; ++a) {
    const double slack = tol * side();
    if (x[a] < bounds_.lo[a] - slack || x[a] > bounds_.hi[a] + slack) return false;
  }
  return true;
}

NodeId Grid::node_at(const Point& x, bool snap, double snap_tol) const {
  if (!contains(x)) {
    throw std::out_of_range("point lies outside the grid bounds");
  }
  MultiIndex idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    const double r = (x[a] - bounds_.lo[a]) / h_;
    const double nearest = std::round(r);
    if (!snap && std::abs(r - nearest) > snap_tol) {
      throw std::invalid_argument("point is not a lattice point (enable snapping to round)");
    }
    idx[a] = static_cast<int>(std::clamp(nearest, 0.0, static_cast<double>(m_ - 1)));
  }
  return linear(idx);
}

NeighborList Grid::neighbors(NodeId node) const {
  if (!valid(node)) throw std::out_of_range("invalid node index " + std::to_string(node));
  const MultiIndex idx = multi_index(node);
  NeighborList out;
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] > 0) out.ids[out.count++] = node - stride_[a];
    if (idx[a] < m_ - 1) out.ids[out.count++] = node + stride_[a];
  }
  return out;
}

bool Grid::operator==(const Grid& other) const {
  return dim_ == other.dim_ && m_ == other.m_ && bounds_.lo == other.bounds_.lo &&
         bounds_.hi == other.bounds_.hi;
}

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace eikonal
