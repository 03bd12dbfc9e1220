#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eikonal/grid.hpp"

namespace eikonal {

/// Binary min-heap over node ids with decrease-key. Ties on key are broken by
/// the smaller node id, so pop order is fully deterministic.
class IndexedHeap {
 public:
  explicit IndexedHeap(NodeId capacity) : pos_(static_cast<std::size_t>(capacity), kAbsent) {}

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  bool contains(NodeId node) const { return pos_[node] != kAbsent; }

  double key(NodeId node) const { return heap_[pos_[node]].key; }

  void push(NodeId node, double key) {
    if (contains(node)) throw std::logic_error("node already queued");
    pos_[node] = static_cast<std::int32_t>(heap_.size());
    heap_.push_back({key, node});
    sift_up(heap_.size() - 1);
  }

  /// Moves `node` to `key`; the key may go either way.
  void update(NodeId node, double key) {
    const std::size_t i = pos_[node];
    const double old = heap_[i].key;
    heap_[i].key = key;
    if (key < old) {
      sift_up(i);
    } else {
      sift_down(i);
    }
  }

  std::pair<NodeId, double> top() const { return {heap_.front().node, heap_.front().key}; }

  std::pair<NodeId, double> pop() {
    const Entry e = heap_.front();
    pos_[e.node] = kAbsent;
    const Entry last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      pos_[last.node] = 0;
      sift_down(0);
    }
    return {e.node, e.key};
  }

 private:
  static constexpr std::int32_t kAbsent = -1;

  struct Entry {
    double key;
    NodeId node;
  };

  static bool less(const Entry& a, const Entry& b) {
    return a.key < b.key || (a.key == b.key && a.node < b.node);
  }

  void place(std::size_t i, const Entry& e) {
    heap_[i] = e;
    pos_[e.node] = static_cast<std::int32_t>(i);
  }

  void sift_up(std::size_t i) {
    const Entry e = heap_[i];
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!less(e, heap_[parent])) break;
      place(i, heap_[parent]);
      i = parent;
    }
    place(i, e);
  }

  void sift_down(std::size_t i) {
    const Entry e = heap_[i];
    const std::size_t n = heap_.size();
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && less(heap_[child + 1], heap_[child])) ++child;
      if (!less(heap_[child], e)) break;
      place(i, heap_[child]);
      i = child;
    }
    place(i, e);
  }

  std::vector<Entry> heap_;
  std::vector<std::int32_t> pos_;
};

}  // namespace eikonal
