#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eikonal/indexed_heap.hpp"

using eikonal::IndexedHeap;
using eikonal::NodeId;

TEST(IndexedHeap, PopsInKeyOrderWithIdTieBreak) {
  IndexedHeap h(10);
  h.push(5, 1.0);
  h.push(2, 1.0);
  h.push(7, 0.5);
  h.push(1, 2.0);
  EXPECT_EQ(h.pop().first, 7);
  EXPECT_EQ(h.pop().first, 2);
  EXPECT_EQ(h.pop().first, 5);
  EXPECT_EQ(h.pop().first, 1);
  EXPECT_TRUE(h.empty());
}

TEST(IndexedHeap, UpdateMovesBothWays) {
  IndexedHeap h(4);
  for (NodeId n = 0; n < 4; ++n) h.push(n, static_cast<double>(n));
  h.update(3, -1.0);
  h.update(0, 10.0);
  EXPECT_EQ(h.key(3), -1.0);
  EXPECT_EQ(h.pop().first, 3);
  EXPECT_EQ(h.pop().first, 1);
  EXPECT_EQ(h.pop().first, 2);
  EXPECT_EQ(h.pop().first, 0);
}

TEST(IndexedHeap, RejectsDuplicatePush) {
  IndexedHeap h(3);
  h.push(1, 0.0);
  EXPECT_TRUE(h.contains(1));
  EXPECT_THROW(h.push(1, 2.0), std::logic_error);
  h.pop();
  EXPECT_FALSE(h.contains(1));
}

TEST(IndexedHeap, MatchesSortedOrderUnderRandomUpdates) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> key(0.0, 1.0);
  constexpr NodeId kN = 500;
  IndexedHeap h(kN);
  std::vector<double> keys(kN);
  for (NodeId n = 0; n < kN; ++n) h.push(n, keys[n] = std::floor(key(rng) * 50));
  for (int i = 0; i < 2000; ++i) {
    const NodeId n = static_cast<NodeId>(rng() % kN);
    keys[n] = std::floor(key(rng) * 50);
    h.update(n, keys[n]);
  }
  std::vector<std::pair<double, NodeId>> expect;
  for (NodeId n = 0; n < kN; ++n) expect.emplace_back(keys[n], n);
  std::sort(expect.begin(), expect.end());
  for (const auto& [k, n] : expect) {
    const auto [got, gk] = h.pop();
    EXPECT_EQ(got, n);
    EXPECT_EQ(gk, k);
  }
}
