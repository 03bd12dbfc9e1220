#include "eikonal/speed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace eikonal {

CostField CostField::constant(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("running cost must be positive");
  return CostField([value](const Point&) { return value; });
}

CostField CostField::observers(std::vector<Observer> obs, int dim) {
  return CostField([obs = std::move(obs), dim](const Point& x) {
    double k = 1.0;
    for (const auto& o : obs) {
      const double d = distance(x, o.center, dim);
      k += o.weight * std::exp(-d * d / o.sigma);
    }
    return k;
  });
}

SpeedField SpeedField::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("constant speed must be positive and finite");
  }
  return SpeedField(Kind::kConstant, Constant{value}, {value, value}, "constant");
}

SpeedField SpeedField::sinusoid2d(double amplitude, double frequency) {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw std::invalid_argument("sinusoid amplitude must lie in [0, 1)");
  }
  return SpeedField(Kind::kSinusoid2D, Sinusoid{amplitude, frequency, 2},
                    {1.0 - amplitude, 1.0 + amplitude}, "sinusoid2d");
}

SpeedField SpeedField::sinusoid3d(double amplitude, double frequency) {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw std::invalid_argument("sinusoid amplitude must lie in [0, 1)");
  }
  return SpeedField(Kind::kSinusoid3D, Sinusoid{amplitude, frequency, 3},
                    {1.0 - amplitude, 1.0 + amplitude}, "sinusoid3d");
}

namespace {

double intensity_to_speed(double i) { return 0.001 + i / kMaxIntensity; }

void validate_intensities(const IntensityMatrix& m) {
  if (m.rows <= 0 || m.cols <= 0 || m.values.empty()) {
    throw std::invalid_argument("intensity matrix is empty");
  }
  if (m.values.size() != static_cast<std::size_t>(m.rows) * m.cols) {
    throw std::invalid_argument("intensity matrix is not rectangular");
  }
  for (double v : m.values) {
    if (!(v >= 0.0 && v <= kMaxIntensity)) {
      throw std::invalid_argument("intensity " + std::to_string(v) + " outside [0, 755]");
    }
  }
}

}  // namespace

SpeedField SpeedField::sampled(IntensityMatrix intensities, Box domain) {
  validate_intensities(intensities);
  const auto [lo, hi] = std::minmax_element(intensities.values.begin(), intensities.values.end());
  const SpeedBounds b{intensity_to_speed(*lo), intensity_to_speed(*hi)};
  auto pixels = std::make_shared<const IntensityMatrix>(std::move(intensities));
  return SpeedField(Kind::kSampled, Sampled{std::move(pixels), domain}, b, "sampled");
}

SpeedField SpeedField::custom(std::function<double(const Point&)> fn, SpeedBounds bounds,
                              std::string label) {
  if (!(bounds.f1 > 0.0) || bounds.f2 < bounds.f1) {
    throw std::invalid_argument("custom speed bounds must satisfy 0 < F1 <= F2");
  }
  return SpeedField(Kind::kCustom, Custom{std::move(fn)}, bounds, std::move(label));
}

double SpeedField::operator()(const Point& x) const {
  using std::numbers::pi;
  return std::visit(
      [&x](const auto& impl) -> double {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return impl.value;
        } else if constexpr (std::is_same_v<T, Sinusoid>) {
          const double w = impl.frequency * pi;
          double prod = std::sin(w * x[0]) * std::sin(w * x[1]);
          if (impl.dim == 3) prod *= std::sin(w * x[2]);
          return 1.0 + impl.amplitude * prod;
        } else if constexpr (std::is_same_v<T, Sampled>) {
          const IntensityMatrix& px = *impl.pixels;
          const Box& d = impl.domain;
          const double tol = 1e-12 * (d.hi[0] - d.lo[0]);
          for (int a = 0; a < 2; ++a) {
            if (x[a] < d.lo[a] - tol || x[a] > d.hi[a] + tol) {
              throw std::out_of_range("point lies outside the sampled speed domain");
            }
          }
          const double u = (x[0] - d.lo[0]) / (d.hi[0] - d.lo[0]);
          const double v = (x[1] - d.lo[1]) / (d.hi[1] - d.lo[1]);
          const int c = std::clamp(static_cast<int>(std::floor(u * px.cols)), 0, px.cols - 1);
          const int r = std::clamp(static_cast<int>(std::floor(v * px.rows)), 0, px.rows - 1);
          return intensity_to_speed(px.at(r, c));
        } else {
          return impl.fn(x);
        }
      },
      impl_);
}

std::vector<double> SpeedField::sample(const Grid& grid) const {
  std::vector<double> f(static_cast<std::size_t>(grid.size()));
  for (NodeId n = 0; n < grid.size(); ++n) {
    f[n] = (*this)(grid.position(n));
    if (!(f[n] > 0.0) || !std::isfinite(f[n])) {
      throw std::domain_error("speed is not positive at node " + std::to_string(n));
    }
  }
  return f;
}

SpeedBounds speed_bounds(const SpeedField& field) { return field.bounds(); }

SpeedField cost_modified_speed(const SpeedField& f0, const CostField& cost, const Grid& grid) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (NodeId n = 0; n < grid.size(); ++n) {
    const Point x = grid.position(n);
    const double k = cost(x);
    if (!(k > 0.0)) {
      throw std::invalid_argument("running cost must be positive on the lattice");
    }
    const double f = f0(x) / k;
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  auto fn = [f0, cost](const Point& x) { return f0(x) / cost(x); };
  return SpeedField(SpeedField::Kind::kCostModified, SpeedField::Custom{std::move(fn)}, {lo, hi},
                    "cost_modified(" + f0.label() + ")");
}

SpeedField load_sampled_speed(IntensityMatrix intensities, Box domain) {
  return SpeedField::sampled(std::move(intensities), domain);
}

IntensityMatrix read_intensity_csv(std::istream& in) {
  IntensityMatrix m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("malformed intensity value '" + cell + "'");
      }
      m.values.push_back(v);
      ++cols;
    }
    if (m.rows == 0) {
      m.cols = cols;
    } else if (cols != m.cols) {
      throw std::invalid_argument("intensity CSV rows have differing lengths");
    }
    ++m.rows;
  }
  if (m.rows == 0) throw std::invalid_argument("intensity matrix is empty");
  return m;
}

namespace {

std::string next_pgm_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return tok;
  }
  throw std::invalid_argument("truncated PGM header");
}

}  // namespace

IntensityMatrix read_intensity_pgm(std::istream& in) {
  const std::string magic = next_pgm_token(in);
  if (magic != "P5" && magic != "P2") throw std::invalid_argument("not a PGM file");
  IntensityMatrix m;
  m.cols = std::stoi(next_pgm_token(in));
  m.rows = std::stoi(next_pgm_token(in));
  const int maxval = std::stoi(next_pgm_token(in));
  if (m.rows <= 0 || m.cols <= 0 || maxval <= 0 || maxval > 65535) {
    throw std::invalid_argument("invalid PGM dimensions");
  }
  const std::size_t count = static_cast<std::size_t>(m.rows) * m.cols;
  std::vector<double> raw(count);
  if (magic == "P2") {
    for (auto& v : raw) v = std::stod(next_pgm_token(in));
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(count * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw std::invalid_argument("truncated PGM pixel data");
    }
    for (std::size_t i = 0; i < count; ++i) {
      raw[i] = bytes == 1 ? buf[i] : static_cast<double>((buf[2 * i] << 8) | buf[2 * i + 1]);
    }
  }
  m.values.resize(count);
  for (int r = 0; r < m.rows; ++r) {
    const int src = m.rows - 1 - r;
    std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>(src) * m.cols, m.cols,
                m.values.begin() + static_cast<std::ptrdiff_t>(r) * m.cols);
  }
  return m;
}

IntensityMatrix read_intensity_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open intensity file '" + path + "'");
  const bool pgm = path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0;
  return pgm ? read_intensity_pgm(in) : read_intensity_csv(in);
}

}  // namespace eikonal
