#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace harness {

using eikonal::ConfigError;
using eikonal::ExitSet;
using eikonal::format_double;
using eikonal::HeuristicKind;
using eikonal::RunReport;
using eikonal::SolverState;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Observer example: f0 = 1 + 0.99 sin(4 pi x) sin(4 pi y) on [-0.05, 0.85] x [0, 0.9].
constexpr double kObsLoX = -0.05;
constexpr double kObsLoY = 0.0;
constexpr double kObsSide = 0.9;
const Point kObsSource{0.235, 0.8, 0.0};
const Point kObsTarget{0.48, 0.535, 0.0};

std::optional<Point> parse_point(const ConfigDoc& doc, const std::string& key) {
  if (!doc.has(key)) return std::nullopt;
  const auto parts = eikonal::split_list(doc.get(key));
  if (parts.size() < 2 || parts.size() > 3) throw ConfigError(key, "expected 2 or 3 coordinates");
  Point p{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < parts.size(); ++i) p[i] = eikonal::parse_double(key, parts[i]);
  return p;
}

std::string point_text(const Point& p, int dim) {
  std::string out;
  for (int a = 0; a < dim; ++a) {
    if (a) out += ",";
    out += format_double(p[a]);
  }
  return out;
}

template <typename F>
double timed_median(int repeat, bool timing, F&& fn) {
  std::vector<double> samples;
  for (int r = 0; r < std::max(1, repeat); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  if (!timing) return 0.0;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

double slowness_path_cost(const Grid& grid, const SpeedField& field_for_u, const SpeedField& cost_speed,
                          NodeId s, NodeId t) {
  const SolverState st = eikonal::fmm_solve(grid, field_for_u, ExitSet::single(t));
  const eikonal::Trajectory traj = eikonal::extract_trajectory(grid, st.value, s, t);
  return eikonal::integrate_cost_along(traj, [&](const Point& x) { return 1.0 / cost_speed(x); });
}

double local_path_cost(const Instance& inst) {
  const SolverState st = eikonal::fmm_solve(inst.grid, inst.base_speed, ExitSet::single(inst.t));
  const auto slowness = [&](const Point& x) { return 1.0 / inst.speed(x); };
  const eikonal::Trajectory seed = eikonal::extract_trajectory(inst.grid, st.value, inst.s, inst.t);
  return eikonal::integrate_cost_along(eikonal::relax_trajectory(inst.grid, seed, slowness), slowness);
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::kFmm:
      return "fmm";
    case Method::kFmmStop:
      return "fmm_stop";
    case Method::kBidir:
      return "bidir";
    case Method::kSA:
      return "sa";
    case Method::kAA:
      return "aa";
    case Method::kAABB:
      return "aa_bb";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::kFmm, Method::kFmmStop, Method::kBidir, Method::kSA, Method::kAA, Method::kAABB}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_doc(const ConfigDoc& doc) {
  ExperimentConfig c;
  c.instance = doc.get_or("instance.name", c.instance);
  c.amplitude = doc.get_double_or("instance.amplitude", c.amplitude);
  c.sampled_path = doc.get_or("instance.path", c.sampled_path);
  c.s = parse_point(doc, "instance.s");
  c.t = parse_point(doc, "instance.t");

  if (doc.has("run.methods")) {
    c.methods.clear();
    for (const auto& name : doc.get_list_or("run.methods", {})) {
      try {
        c.methods.push_back(method_from_string(name));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("run.methods", e.what());
      }
    }
  }
  if (doc.has("run.m")) {
    c.m.clear();
    for (const auto& v : doc.get_list_or("run.m", {})) c.m.push_back(static_cast<int>(eikonal::parse_int("run.m", v)));
  }
  if (doc.has("run.lambda")) {
    c.lambda.clear();
    for (const auto& v : doc.get_list_or("run.lambda", {})) c.lambda.push_back(eikonal::parse_double("run.lambda", v));
  }
  if (doc.has("run.heuristic")) {
    try {
      c.heuristic = eikonal::heuristic_kind_from_string(doc.get("run.heuristic"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("run.heuristic", e.what());
    }
  }
  c.ratio = doc.get_double_or("run.ratio", c.ratio);
  c.psi = doc.get_or("run.psi", c.psi);
  c.psi_inflate = doc.get_bool_or("run.psi_inflate", c.psi_inflate);
  if (doc.has("run.eps_tol")) c.eps_tol = doc.get_double("run.eps_tol");
  c.mu = doc.get_double_or("run.mu", c.mu);
  c.cache_phi = doc.get_bool_or("run.cache_phi", c.cache_phi);
  c.repeat = static_cast<int>(doc.get_int_or("run.repeat", c.repeat));
  c.timing = doc.get_bool_or("run.timing", c.timing);
  c.truth_m = static_cast<int>(doc.get_int_or("run.truth_m", c.truth_m));
  c.seed = static_cast<std::uint64_t>(doc.get_int_or("run.seed", static_cast<long>(c.seed)));
  c.csv_path = doc.get_or("output.csv", c.csv_path);
  c.json_path = doc.get_or("output.json", c.json_path);
  c.validate();
  return c;
}

ConfigDoc ExperimentConfig::to_doc() const {
  ConfigDoc doc;
  doc.set("instance.name", instance);
  if (instance == "sin3d") doc.set("instance.amplitude", format_double(amplitude));
  if (instance == "sampled") doc.set("instance.path", sampled_path);
  if (s) doc.set("instance.s", point_text(*s, dim()));
  if (t) doc.set("instance.t", point_text(*t, dim()));
  std::string list;
  for (Method mm : methods) list += (list.empty() ? "" : ",") + std::string(to_string(mm));
  doc.set("run.methods", list);
  list.clear();
  for (int v : m) list += (list.empty() ? "" : ",") + std::to_string(v);
  doc.set("run.m", list);
  list.clear();
  for (double v : lambda) list += (list.empty() ? "" : ",") + format_double(v);
  doc.set("run.lambda", list);
  doc.set("run.heuristic", eikonal::to_string(heuristic));
  doc.set("run.ratio", format_double(ratio));
  doc.set("run.psi", psi);
  doc.set("run.psi_inflate", psi_inflate ? "true" : "false");
  if (eps_tol) doc.set("run.eps_tol", format_double(*eps_tol));
  doc.set("run.mu", format_double(mu));
  doc.set("run.cache_phi", cache_phi ? "true" : "false");
  doc.set("run.repeat", std::to_string(repeat));
  doc.set("run.timing", timing ? "true" : "false");
  doc.set("run.truth_m", std::to_string(truth_m));
  doc.set("run.seed", std::to_string(seed));
  return doc;
}

std::string ExperimentConfig::hash() const { return eikonal::fnv1a_hex(to_doc().serialize()); }

void ExperimentConfig::validate() const {
  static const std::vector<std::string> kInstances{"const2d", "const3d", "sin2d", "sin3d", "sampled", "observers"};
  if (std::find(kInstances.begin(), kInstances.end(), instance) == kInstances.end()) {
    throw ConfigError("instance.name", "unknown instance '" + instance + "'");
  }
  if (instance == "sampled" && sampled_path.empty()) throw ConfigError("instance.path", "sampled instance needs a file");
  if (instance == "sampled" && (!s || !t)) throw ConfigError("instance.s", "sampled instance needs s and t");
  if (instance == "sin3d" && !(amplitude >= 0.0 && amplitude < 1.0)) {
    throw ConfigError("instance.amplitude", "must lie in [0, 1)");
  }
  if (methods.empty()) throw ConfigError("run.methods", "no methods given");
  if (m.empty()) throw ConfigError("run.m", "no resolutions given");
  for (int v : m) {
    if (v < 3) throw ConfigError("run.m", "each m must be >= 3");
  }
  if (lambda.empty()) throw ConfigError("run.lambda", "no lambda given");
  for (double l : lambda) {
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("run.lambda", "each lambda must lie in [0, 1]");
  }
  if (heuristic == HeuristicKind::kHigherSpeed && instance != "observers") {
    throw ConfigError("run.heuristic", "higher_speed needs a base speed (observers instance)");
  }
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("run.ratio", "must lie in (0, 1]");
  static const std::vector<std::string> kPsi{"psi1", "psi2", "psi3", "oracle", "path", "path_base", "path_local", "inf"};
  if (std::find(kPsi.begin(), kPsi.end(), psi) == kPsi.end()) {
    const double v = eikonal::parse_double("run.psi", psi);
    if (!(v > 0.0)) throw ConfigError("run.psi", "an explicit Psi must be positive");
  }
  if (eps_tol && !(*eps_tol >= 0.0 && std::isfinite(*eps_tol))) throw ConfigError("run.eps_tol", "must be >= 0");
  if (!(mu >= 0.0 && mu <= 0.5)) throw ConfigError("run.mu", "must lie in [0, 0.5]");
  if (repeat < 1) throw ConfigError("run.repeat", "must be >= 1");
  if (truth_m < 0) throw ConfigError("run.truth_m", "must be >= 0");
}

Instance make_instance(const ExperimentConfig& cfg, int m) {
  const int dim = cfg.dim();
  std::optional<Grid> grid;
  std::optional<SpeedField> speed;
  std::optional<SpeedField> base;
  Point s{}, t{};
  if (cfg.instance == "const2d" || cfg.instance == "const3d") {
    grid = Grid::make(dim, m);
    speed = SpeedField::constant(1.0);
    s = {1.0, 1.0, dim == 3 ? 1.0 : 0.0};
    t = {0.0, 0.0, 0.0};
  } else if (cfg.instance == "sin2d") {
    grid = Grid::make(2, m);
    speed = SpeedField::sinusoid2d(0.5, 20.0);
    s = {0.95, 0.7, 0.0};
    t = {0.5, 0.5, 0.0};
  } else if (cfg.instance == "sin3d") {
    grid = Grid::make(3, m);
    speed = SpeedField::sinusoid3d(cfg.amplitude, 10.0);
    s = {0.72, 0.6, 0.8};
    t = {0.32, 0.4, 0.36};
  } else if (cfg.instance == "sampled") {
    grid = Grid::make(2, m);
    speed = eikonal::load_sampled_speed(eikonal::read_intensity_file(cfg.sampled_path));
  } else {
    eikonal::Box box;
    box.lo = {kObsLoX, kObsLoY, 0.0};
    box.hi = {kObsLoX + kObsSide, kObsLoY + kObsSide, 1.0};
    grid = Grid::make(2, m, box);
    base = SpeedField::sinusoid2d(0.99, 4.0);
    const auto cost = eikonal::CostField::observers(
        {{{0.50, 0.77, 0.0}, 2.0, 0.01}, {{0.33, 0.45, 0.0}, 8.0, 0.002}}, 2);
    speed = eikonal::cost_modified_speed(*base, cost, *grid);
    s = kObsSource;
    t = kObsTarget;
  }
  if (cfg.s) s = *cfg.s;
  if (cfg.t) t = *cfg.t;
  Instance inst{*grid, *speed, base ? *base : *speed, eikonal::kNoNode, eikonal::kNoNode, std::nullopt};
  inst.s = inst.grid.node_at(s, /*snap=*/true);
  inst.t = inst.grid.node_at(t, /*snap=*/true);
  if (inst.s == inst.t) throw ConfigError("instance.s", "s and t snap to the same node");
  if (cfg.instance == "const2d" || cfg.instance == "const3d") {
    inst.exact = eikonal::distance(inst.grid.position(inst.s), inst.grid.position(inst.t), dim);
  }
  return inst;
}

double resolve_psi(const ExperimentConfig& cfg, const Instance& inst) {
  const auto& g = inst.grid;
  if (cfg.psi == "inf") return kInf;
  if (cfg.psi == "psi1") return eikonal::compute_psi(eikonal::PsiKind::kPsi1, g, inst.speed, inst.s, inst.t);
  if (cfg.psi == "psi2") return eikonal::compute_psi(eikonal::PsiKind::kPsi2, g, inst.speed, inst.s, inst.t);
  if (cfg.psi == "psi3") return eikonal::compute_psi(eikonal::PsiKind::kPsi3, g, inst.speed, inst.s, inst.t);
  if (cfg.psi == "oracle") {
    const SolverState v = eikonal::fmm_solve(g, inst.speed, ExitSet::single(inst.s), inst.t);
    return v.value[inst.t];
  }
  if (cfg.psi == "path") return slowness_path_cost(g, inst.speed, inst.speed, inst.s, inst.t);
  if (cfg.psi == "path_base") return slowness_path_cost(g, inst.base_speed, inst.speed, inst.s, inst.t);
  if (cfg.psi == "path_local") return local_path_cost(inst);
  return eikonal::parse_double("run.psi", cfg.psi);
}

double eps_for(const ExperimentConfig& cfg, int dim) { return cfg.eps_tol.value_or(dim == 3 ? 1.0 / 3.0 : 0.25); }

double solver_psi(const ExperimentConfig& cfg, const Instance& inst) {
  const double psi = resolve_psi(cfg, inst);
  if (!cfg.psi_inflate) return psi;
  return (1.0 + eps_for(cfg, inst.grid.dim()) * std::pow(inst.grid.h(), cfg.mu)) * psi;
}

eikonal::Heuristic make_heuristic(const ExperimentConfig& cfg, const Instance& inst, double lambda) {
  if (cfg.heuristic == HeuristicKind::kHigherSpeed) {
    SolverState v0 = eikonal::fmm_solve(inst.grid, inst.base_speed, ExitSet::single(inst.s));
    return eikonal::Heuristic::higher_speed(inst.grid, std::move(v0.value));
  }
  return eikonal::build_heuristic({cfg.heuristic, lambda, cfg.ratio}, inst.grid, inst.speed, inst.s);
}

MethodRun run_method(const ExperimentConfig& cfg, const Instance& inst, Method method, double lambda,
                     double u_s, double psi) {
  const Grid& g = inst.grid;
  const double eps = eps_for(cfg, g.dim());
  MethodRun out;
  double u_star = 0.0;
  std::int64_t accepted = 0;
  std::int64_t considered = 0;
  bool fallback = false;
  double wall = 0.0;
  double psi_used = 0.0;

  switch (method) {
    case Method::kFmm:
    case Method::kFmmStop: {
      const auto f = inst.speed.sample(g);
      const std::optional<NodeId> stop = method == Method::kFmmStop ? std::optional<NodeId>(inst.s) : std::nullopt;
      wall = timed_median(cfg.repeat, cfg.timing, [&] {
        out.state = eikonal::fmm_solve(g, std::span<const double>(f), ExitSet::single(inst.t), stop);
      });
      u_star = out.state.value[inst.s];
      accepted = out.state.accepted_count;
      considered = out.state.considered_count;
      break;
    }
    case Method::kBidir: {
      eikonal::BidirectionalResult r;
      wall = timed_median(cfg.repeat, cfg.timing, [&] { r = eikonal::bidirectional_solve(g, inst.speed, inst.s, inst.t); });
      u_star = r.value;
      for (NodeId n = 0; n < g.size(); ++n) {
        const bool acc = r.from_target.accepted(n) || r.from_source.accepted(n);
        const bool touched = r.from_target.label[n] != eikonal::Label::kFar ||
                             r.from_source.label[n] != eikonal::Label::kFar;
        accepted += acc;
        considered += touched && !acc;
      }
      break;
    }
    case Method::kSA:
    case Method::kAA:
    case Method::kAABB: {
      const eikonal::Heuristic phi = make_heuristic(cfg, inst, lambda);
      eikonal::RestrictedResult r;
      wall = timed_median(cfg.repeat, cfg.timing, [&] {
        if (method == Method::kSA) {
          r = eikonal::sa_star_solve(g, inst.speed, inst.t, inst.s, phi, cfg.cache_phi);
        } else {
          r = eikonal::aa_star_solve(g, inst.speed, inst.t, inst.s, phi, psi, eps, cfg.mu, method == Method::kAABB);
        }
      });
      u_star = r.value_at_source;
      fallback = r.psi_fallback;
      accepted = r.state.accepted_count;
      considered = r.state.considered_count;
      psi_used = method == Method::kSA ? 0.0 : psi;
      out.state = std::move(r.state);
      break;
    }
  }
  out.report = eikonal::compute_metrics(u_star, u_s, inst.exact, accepted, considered, g.m(), g.dim());
  out.report.method = to_string(method);
  out.report.instance = cfg.instance;
  out.report.lambda = (method == Method::kSA || method == Method::kAA || method == Method::kAABB) ? lambda : 0.0;
  out.report.psi = psi_used;
  out.report.psi_fallback = fallback;
  out.report.wall_time = wall;
  return out;
}

std::vector<RunReport> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string hash = cfg.hash();
  std::vector<RunReport> rows;
  for (int m : cfg.m) {
    Instance inst = make_instance(cfg, m);
    const SolverState full = eikonal::fmm_solve(inst.grid, inst.speed, ExitSet::single(inst.t), inst.s);
    const double u_s = full.value[inst.s];
    if (!inst.exact && cfg.truth_m > 0) {
      const Instance fine = make_instance(cfg, cfg.truth_m);
      inst.exact = eikonal::fmm_solve(fine.grid, fine.speed, ExitSet::single(fine.t), fine.s).value[fine.s];
    }
    const bool needs_psi = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                       [](Method mm) { return mm == Method::kAA || mm == Method::kAABB; });
    const double psi = needs_psi ? solver_psi(cfg, inst) : kInf;
    for (Method method : cfg.methods) {
      const bool uses_lambda = method == Method::kSA || method == Method::kAA || method == Method::kAABB;
      const std::vector<double> lambdas = uses_lambda ? cfg.lambda : std::vector<double>{0.0};
      for (double lambda : lambdas) {
        MethodRun run = run_method(cfg, inst, method, lambda, u_s, psi);
        run.report.config_hash = hash;
        rows.push_back(std::move(run.report));
      }
    }
  }
  return rows;
}

void write_reports_csv(std::ostream& out, const std::vector<RunReport>& rows) {
  out << RunReport::csv_header() << '\n';
  for (const auto& r : rows) out << r.csv_row() << '\n';
}

void write_reports_json(std::ostream& out, const std::vector<RunReport>& rows) {
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) out << "  " << rows[i].json() << (i + 1 < rows.size() ? ",\n" : "\n");
  out << "]\n";
}

std::vector<std::string> dump_fields(const ExperimentConfig& cfg, const std::vector<std::string>& which,
                                     const std::string& dir) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const int m = cfg.m.front();
  const double lambda = cfg.lambda.front();
  const Method method = cfg.methods.front();
  const Instance inst = make_instance(cfg, m);
  const std::string stem = cfg.instance + "_m" + std::to_string(m) + "_";
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(dir) / (stem + name)).string();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    written.push_back(path);
    return f;
  };

  bool state_written = false;
  for (const std::string& what : which) {
    if (what == "U" || what == "labels") {
      if (state_written) continue;
      state_written = true;
      if (method == Method::kBidir) throw std::invalid_argument("field U is not available for bidir");
      const SolverState full = eikonal::fmm_solve(inst.grid, inst.speed, ExitSet::single(inst.t), inst.s);
      const double psi = (method == Method::kAA || method == Method::kAABB) ? solver_psi(cfg, inst) : kInf;
      MethodRun run = run_method(cfg, inst, method, lambda, full.value[inst.s], psi);
      auto f = open(std::string(to_string(method)) + "_state.csv");
      eikonal::write_state_csv(f, run.state);
    } else if (what == "alpha") {
      const SolverState st = eikonal::fmm_solve(inst.grid, inst.speed, ExitSet::single(inst.t), inst.s);
      const eikonal::SensitivityField sf = eikonal::sensitivity_alphas(st, inst.s);
      const eikonal::ExtraColumn col{"alpha", &sf.alpha};
      auto f = open("alpha.csv");
      eikonal::write_state_csv(f, st, std::span<const eikonal::ExtraColumn>(&col, 1));
      if (inst.grid.dim() == 2) {
        const eikonal::Trajectory traj = eikonal::extract_trajectory(inst.grid, st.value, inst.s, inst.t);
        const eikonal::DecayFit fit = eikonal::conjecture_decay_fit(inst.grid, sf.alpha, traj);
        auto g = open("alpha_probes.csv");
        g << "probe,d,alpha\n";
        g.precision(17);
        for (const auto& p : fit.points) g << p.probe << ',' << p.d << ',' << p.alpha << '\n';
        auto h = open("alpha_fit.txt");
        h.precision(17);
        h << "slope = " << fit.slope << "\nintercept = " << fit.intercept << "\nmonotone = "
          << (fit.monotone ? "true" : "false") << "\npoints = " << fit.points.size() << '\n';
      }
    } else if (what == "masks") {
      const SolverState u = eikonal::fmm_solve(inst.grid, inst.speed, ExitSet::single(inst.t));
      const SolverState v = eikonal::fmm_solve(inst.grid, inst.speed, ExitSet::single(inst.s));
      const eikonal::Heuristic phi = make_heuristic(cfg, inst, lambda);
      const double psi = resolve_psi(cfg, inst);
      const auto masks = eikonal::relevance_sets(inst.grid, u.value, v.value, phi, psi, inst.s, inst.t,
                                                 inst.speed.bounds().f2);
      auto f = open("masks_" + cfg.psi + ".csv");
      eikonal::write_masks_csv(f, inst.grid, masks);
    } else {
      throw std::invalid_argument("unknown field '" + what + "' (expected U, labels, alpha, masks)");
    }
  }
  return written;
}

}  // namespace harness
