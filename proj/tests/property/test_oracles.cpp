#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eikonal/analysis.hpp"
#include "eikonal/fmm.hpp"
#include "oracles.hpp"

using namespace eikonal;

TEST(SemiLagrangian, LocalUpdateMatchesBruteForce2D) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double h = 1e-3 + 0.1 * u(rng);
    const double f = 0.2 + 1.8 * u(rng);
    const double a = 4 * h * u(rng);
    const double b = 4 * h * u(rng);
    const double v[2] = {a, b};
    EXPECT_NEAR(local_update(v, h, f).value, oracle::semi_lagrangian_2d(a, b, h, f), 1e-8);
  }
}

TEST(SemiLagrangian, LocalUpdateMatchesBruteForce3D) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double h = 1e-3 + 0.1 * u(rng);
    const double f = 0.2 + 1.8 * u(rng);
    const double v[3] = {3 * h * u(rng), 3 * h * u(rng), 3 * h * u(rng)};
    EXPECT_NEAR(local_update(v, h, f).value, oracle::semi_lagrangian_3d(v[0], v[1], v[2], h, f), 1e-8);
  }
}

TEST(SemiLagrangian, GoldenSectionFindsAQuadraticMinimum) {
  EXPECT_NEAR(oracle::golden_min([](double x) { return (x - 0.3) * (x - 0.3) + 2.0; }, 0.0, 1.0), 2.0, 1e-14);
}

// Routing rebuilt from U alone must agree with the recorded upwind branches.
TEST(MonteCarlo, RoutingOracleAgreesWithRecordedWeights) {
  const Grid g = Grid::make(2, 31);
  const SolverState st = fmm_solve(g, SpeedField::constant(1.0), ExitSet::single(g.linear({4, 9, 0})));
  for (NodeId n = 0; n < g.size(); n += 7) {
    if (st.value[n] == 0.0) continue;
    const auto r = oracle::routing_from_values(g, st.value, n, 1.0);
    const auto w = transition_weights(st, n);
    const UpwindRecord& rec = st.upwind[n];
    ASSERT_EQ(r.parents.size(), rec.count) << "node " << n;
    for (std::size_t k = 0; k < r.parents.size(); ++k) {
      for (int j = 0; j < rec.count; ++j) {
        if (rec.parents[j] != r.parents[k]) continue;
        EXPECT_NEAR(w[j], r.probs[k], 1e-12);
      }
    }
  }
}

TEST(MonteCarlo, AlphaWithinThreeStandardErrors) {
  const Grid g = Grid::make(2, 31);
  const NodeId s = g.linear({27, 20, 0});
  const SolverState st = fmm_solve(g, SpeedField::constant(1.0), ExitSet::single(g.linear({3, 6, 0})));
  const auto alpha = sensitivity_alphas(st, s).alpha;
  constexpr std::int64_t kWalks = 100'000;
  const auto mc = oracle::monte_carlo_visits(g, st.value, s, 1.0, kWalks, 17);
  int checked = 0;
  for (NodeId n = 0; n < g.size(); ++n) {
    if (alpha[n] < 0.05 || alpha[n] > 0.95) continue;
    const double se = std::sqrt(alpha[n] * (1 - alpha[n]) / kWalks);
    EXPECT_LE(std::abs(mc[n] - alpha[n]), 4.5 * se) << "node " << n;
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(Quadrature, TrapezoidOracleOnConstantSpeed) {
  EXPECT_NEAR(oracle::trapezoid_slowness([](const Point&) { return 2.0; }, {0, 0, 0}, {0.3, 0.4, 0}, 2, 10), 0.25,
              1e-15);
}
