#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "eikonal/fmm.hpp"

using namespace eikonal;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(LocalUpdate, OneSidedWhenNeighborsAreFarApart) {
  const double v[2] = {0.0, 1.0};
  const LocalUpdate u = local_update(v, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(u.value, 0.1);
  EXPECT_EQ(u.terms, 1);
  EXPECT_EQ(u.axes[0], 0);
}

TEST(LocalUpdate, SymmetricTwoSided) {
  const double v[2] = {0.0, 0.0};
  const LocalUpdate u = local_update(v, 0.1, 2.0);
  EXPECT_NEAR(u.value, 0.05 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(u.terms, 2);
}

TEST(LocalUpdate, ThreeSidedSymmetric) {
  const double v[3] = {1.0, 1.0, 1.0};
  const LocalUpdate u = local_update(v, 0.3, 1.0);
  EXPECT_NEAR(u.value, 1.0 + 0.3 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(u.terms, 3);
}

TEST(LocalUpdate, IgnoresInfiniteAxes) {
  const double v[3] = {kInf, 0.5, kInf};
  const LocalUpdate u = local_update(v, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(u.value, 0.6);
  EXPECT_EQ(u.axes[0], 1);
  const double none[2] = {kInf, kInf};
  EXPECT_THROW(local_update(none, 0.1, 1.0), std::invalid_argument);
}

TEST(LocalUpdate, RootExceedsEveryUsedValue) {
  const double v[2] = {0.2, 0.25};
  const LocalUpdate u = local_update(v, 0.1, 1.0);
  EXPECT_EQ(u.terms, 2);
  EXPECT_GT(u.value, 0.25);
  EXPECT_NEAR((u.value - 0.2) * (u.value - 0.2) + (u.value - 0.25) * (u.value - 0.25), 0.01, 1e-15);
}

TEST(Fmm, AxisDistancesAreExactForUnitSpeed) {
  const Grid g = Grid::make(2, 21);
  const SolverState st = fmm_solve(g, SpeedField::constant(1.0), ExitSet::single(0));
  for (int i = 0; i < 21; ++i) {
    EXPECT_NEAR(st.value[g.linear({i, 0, 0})], i * g.h(), 1e-14);
    EXPECT_NEAR(st.value[g.linear({0, i, 0})], i * g.h(), 1e-14);
  }
  EXPECT_EQ(st.accepted_count, g.size());
  EXPECT_EQ(st.considered_count, 0);
  EXPECT_DOUBLE_EQ(st.fraction_computed(), 1.0);
}

TEST(Fmm, AcceptOrderIsMonotoneInValue) {
  const Grid g = Grid::make(2, 41);
  const SolverState st = fmm_solve(g, SpeedField::sinusoid2d(), ExitSet::single(g.linear({20, 20, 0})));
  for (std::size_t k = 1; k < st.accept_order.size(); ++k) {
    EXPECT_LE(st.value[st.accept_order[k - 1]], st.value[st.accept_order[k]]);
    EXPECT_EQ(st.accept_rank[st.accept_order[k]], static_cast<std::int32_t>(k));
  }
}

TEST(Fmm, ConvergesToEuclideanDistance) {
  double prev = kInf;
  for (int m : {41, 81, 161}) {
    const Grid g = Grid::make(2, m);
    const SolverState st = fmm_solve(g, SpeedField::constant(1.0), ExitSet::single(0));
    const double err = std::abs(st.value[g.size() - 1] - std::sqrt(2.0));
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Fmm, StopAtSourceLeavesTheRestUnaccepted) {
  const Grid g = Grid::make(2, 31);
  const NodeId s = g.linear({15, 15, 0});
  const SolverState st = fmm_solve(g, SpeedField::constant(1.0), ExitSet::single(0), s);
  EXPECT_TRUE(st.accepted(s));
  EXPECT_EQ(st.accept_order.back(), s);
  EXPECT_LT(st.accepted_count, g.size());
  const SolverState full = fmm_solve(g, SpeedField::constant(1.0), ExitSet::single(0));
  EXPECT_EQ(st.value[s], full.value[s]);
}

TEST(Fmm, ExitPenaltiesShiftValues) {
  const Grid g = Grid::make(2, 11);
  const SolverState st = fmm_solve(g, SpeedField::constant(1.0), ExitSet{{0, g.size() - 1}, {0.0, 5.0}});
  EXPECT_EQ(st.value[g.size() - 1], 5.0);
  EXPECT_EQ(st.upwind[0].branch, Branch::kExit);
  EXPECT_THROW((ExitSet{{0}, {-1.0}}).validate(g), std::invalid_argument);
  EXPECT_THROW((ExitSet{{}, {}}).validate(g), std::invalid_argument);
  EXPECT_THROW((ExitSet{{0}, {0.0, 1.0}}).validate(g), std::invalid_argument);
}

TEST(Fmm, InactiveNodesAreWalls) {
  const Grid g = Grid::make(2, 11);
  std::vector<std::uint8_t> active(static_cast<std::size_t>(g.size()), 1);
  for (int j = 0; j < 10; ++j) active[g.linear({5, j, 0})] = 0;
  const auto f = SpeedField::constant(1.0).sample(g);
  const SolverState st = fmm_solve(g, std::span<const double>(f), ExitSet::single(0), std::nullopt, &active);
  EXPECT_EQ(st.value[g.linear({5, 3, 0})], kInf);
  EXPECT_GT(st.value[g.linear({6, 0, 0})], 1.0);
}

TEST(Fmm, UnreachableStopThrows) {
  const Grid g = Grid::make(2, 5);
  std::vector<std::uint8_t> active(static_cast<std::size_t>(g.size()), 1);
  active[g.size() - 1] = 0;
  const auto f = SpeedField::constant(1.0).sample(g);
  EXPECT_THROW(fmm_solve(g, std::span<const double>(f), ExitSet::single(0), g.size() - 1, &active),
               std::runtime_error);
}

TEST(Fmm, UpwindRecordsPointAtAcceptedParents) {
  const Grid g = Grid::make(2, 31);
  const SolverState st = fmm_solve(g, SpeedField::sinusoid2d(), ExitSet::single(g.linear({3, 7, 0})));
  for (NodeId n = 0; n < g.size(); ++n) {
    const UpwindRecord& r = st.upwind[n];
    for (int k = 0; k < r.count; ++k) EXPECT_LT(st.accept_rank[r.parents[k]], st.accept_rank[n]);
  }
}

TEST(Fmm, ResidualVanishesAtAcceptedNodes) {
  const Grid g = Grid::make(3, 21);
  const auto f = SpeedField::sinusoid3d(0.35).sample(g);
  const SolverState st = fmm_solve(g, std::span<const double>(f), ExitSet::single(g.linear({10, 4, 9})));
  for (NodeId n = 0; n < g.size(); ++n) {
    if (st.upwind[n].branch == Branch::kExit) continue;
    EXPECT_LE(discretization_residual(st, f, n), 1e-10 * g.h() / f[n]);
  }
}

TEST(Fmm, BidirectionalMeetsNearTheTrueValue) {
  const Grid g = Grid::make(2, 101);
  const NodeId s = g.size() - 1;
  const BidirectionalResult r = bidirectional_solve(g, SpeedField::constant(1.0), s, 0);
  const SolverState full = fmm_solve(g, SpeedField::constant(1.0), ExitSet::single(0));
  EXPECT_NE(r.meeting_node, kNoNode);
  EXPECT_NEAR(r.value, full.value[s], 0.02);
  EXPECT_LT(r.accepted_union, g.size());
}

TEST(Fmm, StateCsvRoundTrip) {
  const Grid g = Grid::make(2, 6);
  const SolverState st = fmm_solve(g, SpeedField::constant(1.0), ExitSet::single(0), 7);
  std::stringstream buf;
  write_state_csv(buf, st);
  const std::string text = buf.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "node,x,y,U,label,accept_rank");
  const auto back = read_value_table_csv(buf, g);
  for (NodeId n = 0; n < g.size(); ++n) {
    EXPECT_EQ(back[n], std::isfinite(st.value[n]) ? st.value[n] : kInf);
  }
}
