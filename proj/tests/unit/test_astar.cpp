#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "eikonal/astar.hpp"

using namespace eikonal;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Scene {
  Grid grid = Grid::make(2, 81);
  SpeedField speed = SpeedField::sinusoid2d();
  NodeId s = grid.linear({76, 56, 0});
  NodeId t = grid.linear({40, 40, 0});
  double f2() const { return speed.bounds().f2; }
  Heuristic naive(double lambda) const { return Heuristic::naive(grid.position(s), f2(), lambda, 2); }
};

}  // namespace

TEST(SaStar, ZeroHeuristicReproducesStopAtSource) {
  const Scene k;
  const auto f = k.speed.sample(k.grid);
  const SolverState fmm = fmm_solve(k.grid, std::span<const double>(f), ExitSet::single(k.t), k.s);
  for (bool cache : {true, false}) {
    const RestrictedResult r = sa_star_solve(k.grid, k.speed, k.t, k.s, Heuristic::zero(), cache);
    EXPECT_EQ(r.state.value, fmm.value);
    EXPECT_EQ(r.state.accept_order, fmm.accept_order);
    EXPECT_EQ(r.value_at_source, fmm.value[k.s]);
  }
}

TEST(SaStar, CachingDoesNotChangeTheResult) {
  const Scene k;
  const RestrictedResult a = sa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(0.8), true);
  const RestrictedResult b = sa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(0.8), false);
  EXPECT_EQ(a.state.value, b.state.value);
}

TEST(SaStar, RestrictsAndNeverUndershoots) {
  const Scene k;
  const double u_s = fmm_solve(k.grid, k.speed, ExitSet::single(k.t), k.s).value[k.s];
  double prev_fraction = 2.0;
  for (double lambda : {0.0, 0.5, 1.0}) {
    const RestrictedResult r = sa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(lambda));
    EXPECT_GE(r.value_at_source, u_s);
    EXPECT_LE(r.fraction, prev_fraction);
    prev_fraction = r.fraction;
  }
}

TEST(AaStar, InfinitePsiIsPlainFmm) {
  const Scene k;
  const SolverState fmm = fmm_solve(k.grid, k.speed, ExitSet::single(k.t), k.s);
  const RestrictedResult r = aa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(1.0), kInf, 0.25, 0.5);
  EXPECT_EQ(r.state.value, fmm.value);
  EXPECT_EQ(r.state.label, fmm.label);
  EXPECT_FALSE(r.psi_fallback);
}

TEST(AaStar, AcceptedValuesNeverUndercutTheFullSolve) {
  const Scene k;
  const SolverState full = fmm_solve(k.grid, k.speed, ExitSet::single(k.t));
  const RestrictedResult r =
      aa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(1.0), full.value[k.s], 0.25, 0.5);
  for (NodeId n = 0; n < k.grid.size(); ++n) {
    if (r.state.accepted(n)) {
      EXPECT_GE(r.state.value[n], full.value[n]);
    }
  }
  EXPECT_LT(r.fraction, 1.0);
}

TEST(AaStar, FallsBackToPsiWhenTheQueueEmpties) {
  const Scene k;
  const double psi = 1.01 * k.naive(1.0).at_node(k.grid, k.t);
  const RestrictedResult r = aa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(1.0), psi, 0.0, 0.5);
  EXPECT_TRUE(r.psi_fallback);
  EXPECT_EQ(r.value_at_source, psi);
  EXPECT_FALSE(r.state.accepted(k.s));
}

TEST(AaStar, RejectsPsiBelowPhiAtTarget) {
  const Scene k;
  EXPECT_THROW(aa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(1.0), 0.2, 0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(aa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(1.0), -1.0, 0.0, 0.5), std::invalid_argument);
}

TEST(AaStar, BranchAndBoundOnlyShrinksTheComputedSet) {
  const Scene k;
  const double psi1 = compute_psi(PsiKind::kPsi1, k.grid, k.speed, k.s, k.t);
  const RestrictedResult plain = aa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(1.0), psi1, 0.25, 0.5);
  const RestrictedResult bb = aa_star_solve(k.grid, k.speed, k.t, k.s, k.naive(1.0), psi1, 0.25, 0.5, true);
  EXPECT_LE(bb.fraction, plain.fraction);
  EXPECT_LE(bb.final_psi, bb.initial_psi);
  for (NodeId n = 0; n < k.grid.size(); ++n) {
    if (bb.state.accepted(n)) {
      EXPECT_TRUE(plain.state.accepted(n));
    }
  }
}

TEST(RestrictionConfig, DimensionDefaults) {
  EXPECT_DOUBLE_EQ(RestrictionConfig::defaults(2).eps_tol, 0.25);
  EXPECT_DOUBLE_EQ(RestrictionConfig::defaults(3).eps_tol, 1.0 / 3.0);
}

TEST(RestrictionConfig, ValidateNamesTheKey) {
  RestrictionConfig c = RestrictionConfig::defaults(2);
  c.mu = 0.7;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "mu");
  }
  c = RestrictionConfig::defaults(2);
  c.method = RestrictionMethod::kSA;
  c.branch_and_bound = true;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RestrictionConfig, DocRoundTrip) {
  RestrictionConfig c = RestrictionConfig::defaults(2);
  c.method = RestrictionMethod::kAA;
  c.heuristic.kind = HeuristicKind::kCoarseGrid;
  c.heuristic.lambda = 0.5;
  c.psi = 1.25;
  c.branch_and_bound = true;
  ConfigDoc doc;
  c.write(doc, "solver");
  const RestrictionConfig back = RestrictionConfig::read(doc, "solver", 2);
  EXPECT_EQ(back.method, c.method);
  EXPECT_EQ(back.heuristic.kind, c.heuristic.kind);
  EXPECT_EQ(back.heuristic.lambda, 0.5);
  EXPECT_EQ(back.psi, 1.25);
  EXPECT_TRUE(back.branch_and_bound);
  doc.set("solver.method", "bogus");
  EXPECT_THROW(RestrictionConfig::read(doc, "solver", 2), ConfigError);
}

TEST(RestrictedSolve, DispatchesOnMethod) {
  const Scene k;
  RestrictionConfig c = RestrictionConfig::defaults(2);
  c.method = RestrictionMethod::kSA;
  const Heuristic phi = k.naive(0.5);
  EXPECT_EQ(restricted_solve(k.grid, k.speed, k.t, k.s, phi, c).state.value,
            sa_star_solve(k.grid, k.speed, k.t, k.s, phi).state.value);
}

TEST(BuildHeuristic, OracleAndNaive) {
  const Scene k;
  const Heuristic o = build_heuristic({HeuristicKind::kOracle, 0.5, 0.1}, k.grid, k.speed, k.s);
  EXPECT_EQ(o.at_node(k.grid, k.s), 0.0);
  const Heuristic n = build_heuristic({HeuristicKind::kNaive, 1.0, 0.1}, k.grid, k.speed, k.s);
  EXPECT_DOUBLE_EQ(n.at_node(k.grid, k.t), distance(k.grid.position(k.s), k.grid.position(k.t), 2) / k.f2());
  EXPECT_THROW(build_heuristic({HeuristicKind::kHigherSpeed, 1.0, 0.1}, k.grid, k.speed, k.s), std::invalid_argument);
}

TEST(RelevanceSets, NestedAndWritten) {
  const Scene k;
  const SolverState u = fmm_solve(k.grid, k.speed, ExitSet::single(k.t));
  const SolverState v = fmm_solve(k.grid, k.speed, ExitSet::single(k.s));
  const RelevanceMasks m = relevance_sets(k.grid, u.value, v.value, k.naive(1.0), 1.1 * u.value[k.s], k.s, k.t, k.f2());
  std::size_t n1 = 0, n3 = 0;
  for (NodeId n = 0; n < k.grid.size(); ++n) {
    EXPECT_LE(m.c3[n], m.c2[n]);
    EXPECT_LE(m.c2[n], m.c1[n]);
    n1 += m.c1[n];
    n3 += m.c3[n];
  }
  EXPECT_GT(n1, n3);
  EXPECT_TRUE(m.c3[k.s]);
  std::ostringstream out;
  write_masks_csv(out, k.grid, m);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "node,x,y,C1,C2,C3");
}
