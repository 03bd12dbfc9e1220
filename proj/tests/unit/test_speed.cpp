#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "eikonal/speed.hpp"

using namespace eikonal;

TEST(Speed, ConstantAndBounds) {
  const SpeedField f = SpeedField::constant(2.5);
  EXPECT_EQ(f({0.3, 0.2, 0}), 2.5);
  EXPECT_EQ(f.bounds().f1, 2.5);
  EXPECT_EQ(f.bounds().f2, 2.5);
  EXPECT_THROW(SpeedField::constant(0.0), std::invalid_argument);
}

TEST(Speed, Sinusoid2DFormula) {
  const SpeedField f = SpeedField::sinusoid2d(0.5, 20.0);
  const Point x{0.013, 0.77, 0};
  EXPECT_NEAR(f(x), 1.0 + 0.5 * std::sin(20 * std::numbers::pi * 0.013) * std::sin(20 * std::numbers::pi * 0.77), 1e-15);
  EXPECT_DOUBLE_EQ(f.bounds().f1, 0.5);
  EXPECT_DOUBLE_EQ(f.bounds().f2, 1.5);
}

TEST(Speed, Sinusoid3DFormula) {
  const SpeedField f = SpeedField::sinusoid3d(0.35, 10.0);
  const Point x{0.21, 0.33, 0.47};
  const double pi = std::numbers::pi;
  EXPECT_NEAR(f(x), 1.0 + 0.35 * std::sin(10 * pi * 0.21) * std::sin(10 * pi * 0.33) * std::sin(10 * pi * 0.47), 1e-15);
  EXPECT_DOUBLE_EQ(f.bounds().f1, 0.65);
}

TEST(Speed, SampledMapsIntensityToSpeed) {
  IntensityMatrix m{2, 2, {0, 755, 377.5, 100}};
  const SpeedField f = SpeedField::sampled(m);
  EXPECT_DOUBLE_EQ(f({0.25, 0.25, 0}), 0.001);
  EXPECT_DOUBLE_EQ(f({0.75, 0.25, 0}), 1.001);
  EXPECT_DOUBLE_EQ(f({0.25, 0.75, 0}), 0.001 + 0.5);
  EXPECT_THROW(f({1.5, 0.5, 0}), std::out_of_range);
  EXPECT_THROW(SpeedField::sampled(IntensityMatrix{1, 1, {800}}), std::invalid_argument);
  EXPECT_THROW(SpeedField::sampled(IntensityMatrix{}), std::invalid_argument);
}

TEST(Speed, ReadsCsvIntensities) {
  std::istringstream in("1,2,3\n\n4,5,6\n");
  const IntensityMatrix m = read_intensity_csv(in);
  EXPECT_EQ(m.rows, 2);
  EXPECT_EQ(m.cols, 3);
  EXPECT_EQ(m.at(1, 2), 6);
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_intensity_csv(ragged), std::invalid_argument);
}

TEST(Speed, AsciiPgmIsFlippedToPutRowZeroAtTheBottom) {
  std::istringstream in("P2\n# comment\n2 2\n255\n10 20\n30 40\n");
  const IntensityMatrix m = read_intensity_pgm(in);
  EXPECT_EQ(m.at(0, 0), 30);
  EXPECT_EQ(m.at(1, 1), 20);
}

TEST(Speed, BinaryPgm) {
  std::string data = "P5 3 1 255\n";
  data += static_cast<char>(0);
  data += static_cast<char>(128);
  data += static_cast<char>(255);
  std::istringstream in(data);
  const IntensityMatrix m = read_intensity_pgm(in);
  EXPECT_EQ(m.cols, 3);
  EXPECT_EQ(m.at(0, 1), 128);
  std::istringstream cut("P5 3 1 255\n\x01");
  EXPECT_THROW(read_intensity_pgm(cut), std::invalid_argument);
}

TEST(Speed, CostModifiedDividesByK) {
  const Grid g = Grid::make(2, 11);
  const SpeedField f = cost_modified_speed(SpeedField::constant(2.0), CostField::constant(4.0), g);
  EXPECT_DOUBLE_EQ(f({0.4, 0.4, 0}), 0.5);
  EXPECT_DOUBLE_EQ(f.bounds().f1, 0.5);
  EXPECT_DOUBLE_EQ(f.bounds().f2, 0.5);
  EXPECT_THROW(cost_modified_speed(SpeedField::constant(1.0), CostField::constant(0.0), g), std::invalid_argument);
}

TEST(Speed, ObserverCost) {
  const CostField k = CostField::observers({{{0.5, 0.77, 0}, 2.0, 0.01}, {{0.33, 0.45, 0}, 8.0, 0.002}});
  EXPECT_NEAR(k({0.5, 0.77, 0}), 1.0 + 2.0 + 8.0 * std::exp(-(0.17 * 0.17 + 0.32 * 0.32) / 0.002), 1e-12);
  EXPECT_NEAR(k({5, 5, 0}), 1.0, 1e-12);
}

TEST(Speed, SampleVisitsEveryNode) {
  const Grid g = Grid::make(2, 5);
  const auto v = SpeedField::sinusoid2d().sample(g);
  ASSERT_EQ(v.size(), 25u);
  EXPECT_EQ(v[7], SpeedField::sinusoid2d()(g.position(7)));
}
