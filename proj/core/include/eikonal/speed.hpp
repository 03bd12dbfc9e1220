#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eikonal/grid.hpp"

namespace eikonal {

/// Global speed bounds 0 < F1 <= f(x) <= F2.
struct SpeedBounds {
  double f1 = 1.0;
  double f2 = 1.0;
};

/// Dense row-major matrix of grayscale intensities. Row r runs along the
/// y-axis (row 0 at the lower y bound), column c along the x-axis.
struct IntensityMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

inline constexpr double kMaxIntensity = 755.0;

/// Positive running cost K(x) of a cost-weighted Eikonal problem.
class CostField {
 public:
  explicit CostField(std::function<double(const Point&)> k) : k_(std::move(k)) {}

  static CostField constant(double value);

  /// K(x) = 1 + sum_i w_i exp(-|x - c_i|^2 / sigma_i), one bump per observer.
  struct Observer {
    Point center;
    double weight;
    double sigma;
  };
  static CostField observers(std::vector<Observer> obs, int dim = 2);

  double operator()(const Point& x) const { return k_(x); }

 private:
  std::function<double(const Point&)> k_;
};

/// Speed profile f(x) with known bounds. Immutable; copies share state.
class SpeedField {
 public:
  enum class Kind { kConstant, kSinusoid2D, kSinusoid3D, kSampled, kCostModified, kCustom };

  static SpeedField constant(double value);
  /// f = 1 + amplitude * sin(frequency*pi*x) * sin(frequency*pi*y).
  static SpeedField sinusoid2d(double amplitude = 0.5, double frequency = 20.0);
  /// f = 1 + amplitude * sin(frequency*pi*x) sin(frequency*pi*y) sin(frequency*pi*z).
  static SpeedField sinusoid3d(double amplitude, double frequency = 10.0);
  /// Piecewise-constant speed f = 0.001 + i/755 from the pixel containing x.
  /// Pixels tile `domain`. Throws on an empty matrix or intensities outside [0, 755].
  static SpeedField sampled(IntensityMatrix intensities, Box domain = Box{});
  /// Arbitrary callable; the caller vouches for the bounds.
  static SpeedField custom(std::function<double(const Point&)> fn, SpeedBounds bounds,
                           std::string label = "custom");

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  /// f(x). Sampled fields throw std::out_of_range outside their pixel domain;
  /// analytic fields are defined everywhere.
  double operator()(const Point& x) const;
  double eval(const Point& x) const { return (*this)(x); }

  SpeedBounds bounds() const { return bounds_; }

  /// f sampled once per lattice node.
  std::vector<double> sample(const Grid& grid) const;

 private:
  struct Constant {
    double value;
  };
  struct Sinusoid {
    double amplitude;
    double frequency;
    int dim;
  };
  struct Sampled {
    std::shared_ptr<const IntensityMatrix> pixels;
    Box domain;
  };
  struct Custom {
    std::function<double(const Point&)> fn;
  };
  using Impl = std::variant<Constant, Sinusoid, Sampled, Custom>;

  SpeedField(Kind kind, Impl impl, SpeedBounds bounds, std::string label)
      : kind_(kind), impl_(std::move(impl)), bounds_(bounds), label_(std::move(label)) {}

  friend SpeedField cost_modified_speed(const SpeedField&, const CostField&, const Grid&);

  Kind kind_;
  Impl impl_;
  SpeedBounds bounds_;
  std::string label_;
};

/// Analytic bounds when known, lattice extremes for sampled fields.
SpeedBounds speed_bounds(const SpeedField& field);

/// f0 / K, with bounds taken as min/max over the lattice of `grid`.
/// Throws std::invalid_argument if K <= 0 at any lattice node.
SpeedField cost_modified_speed(const SpeedField& f0, const CostField& cost, const Grid& grid);

SpeedField load_sampled_speed(IntensityMatrix intensities, Box domain = Box{});

/// Rows of comma-separated numbers; blank lines ignored.
IntensityMatrix read_intensity_csv(std::istream& in);
/// Binary (P5) 8- or 16-bit or ASCII (P2) PGM. The first image row is the top
/// of the picture, so rows are flipped to put row 0 at the lower y bound.
IntensityMatrix read_intensity_pgm(std::istream& in);
/// Dispatches on extension (.pgm vs anything else as CSV).
IntensityMatrix read_intensity_file(const std::string& path);

}  // namespace eikonal
