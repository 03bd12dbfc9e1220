#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harness.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSelftest = 3;

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "key=value config file");
  cmd->add_option("--set", args.overrides, "override one key, e.g. --set run.m=101,201")->take_all();
}

eikonal::ConfigDoc load_doc(const CommonArgs& args) {
  eikonal::ConfigDoc doc = args.config.empty() ? eikonal::ConfigDoc{} : eikonal::ConfigDoc::load(args.config);
  for (const auto& o : args.overrides) doc.apply_override(o);
  return doc;
}

int emit(const harness::ExperimentConfig& cfg, const std::vector<eikonal::RunReport>& rows) {
  if (cfg.csv_path.empty()) {
    harness::write_reports_csv(std::cout, rows);
  } else {
    std::ofstream f(cfg.csv_path);
    if (!f) throw std::runtime_error("cannot write '" + cfg.csv_path + "'");
    harness::write_reports_csv(f, rows);
  }
  if (!cfg.json_path.empty()) {
    std::ofstream f(cfg.json_path);
    if (!f) throw std::runtime_error("cannot write '" + cfg.json_path + "'");
    harness::write_reports_json(f, rows);
  }
  return 0;
}

bool same_values(const eikonal::SolverState& a, const eikonal::SolverState& b) {
  if (a.value.size() != b.value.size()) return false;
  for (std::size_t i = 0; i < a.value.size(); ++i) {
    if (a.label[i] != b.label[i]) return false;
    if (a.label[i] == eikonal::Label::kAccepted && a.value[i] != b.value[i]) return false;
  }
  return true;
}

int selftest() {
  using namespace eikonal;
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    if (!ok) ++failures;
  };
  const Grid g = Grid::make(2, 101);
  const SpeedField f1 = SpeedField::constant(1.0);
  const NodeId s = g.node_at({1.0, 1.0, 0.0});
  const NodeId t = g.node_at({0.0, 0.0, 0.0});
  const SolverState stop = fmm_solve(g, f1, ExitSet::single(t), s);

  const RestrictedResult aa_inf = aa_star_solve(g, f1, t, s, Heuristic::naive(g.position(s), 1.0, 1.0, 2),
                                                std::numeric_limits<double>::infinity(), 0.25, 0.5);
  report("aa_star with infinite Psi matches stop-at-source FMM", same_values(aa_inf.state, stop));

  const RestrictedResult sa0 = sa_star_solve(g, f1, t, s, Heuristic::zero());
  report("sa_star with zero heuristic matches stop-at-source FMM", same_values(sa0.state, stop));

  const SensitivityField sf = sensitivity_alphas(stop, s);
  report("sensitivity mass is conserved", std::abs(sf.absorbed - 1.0) < 1e-10 && sf.alpha[s] == 1.0);

  const SpeedField sin = SpeedField::sinusoid2d();
  const auto samples = sin.sample(g);
  const SolverState full = fmm_solve(g, sin, ExitSet::single(t));
  double worst = 0.0;
  for (NodeId n = 0; n < g.size(); ++n) {
    if (n == t) continue;
    worst = std::max(worst, discretization_residual(full, samples, n) / (g.h() / samples[n]));
  }
  report("discretization residual below 1e-10 h/f", worst <= 1e-10);

  const SolverState v = fmm_solve(g, f1, ExitSet::single(s));
  const SolverState u = fmm_solve(g, f1, ExitSet::single(t));
  const double psi = 1.1 * u.value[s];
  const RelevanceMasks masks = relevance_sets(g, u.value, v.value, Heuristic::naive(g.position(s), 1.0, 1.0, 2), psi, s, t, 1.0);
  bool nested = true;
  for (NodeId n = 0; n < g.size(); ++n) nested = nested && (!masks.c3[n] || masks.c2[n]) && (!masks.c2[n] || masks.c1[n]);
  report("relevance sets are nested", nested);

  return failures == 0 ? 0 : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast marching with A*-style domain restriction"};
  app.require_subcommand(1);

  CommonArgs solve_args, bench_args, fields_args, alpha_args;
  std::vector<std::string> which{"U"};
  std::string fields_dir = "fields";
  std::string alpha_dir = "fields";

  auto* solve = app.add_subcommand("solve", "run a battery and write one CSV row per run");
  add_common(solve, solve_args);
  auto* bench = app.add_subcommand("bench", "like solve, timing on with a median of 10 repeats");
  add_common(bench, bench_args);
  auto* fields = app.add_subcommand("fields", "dump per-node CSV fields for the first m, lambda and method");
  add_common(fields, fields_args);
  fields->add_option("--which", which, "U, labels, alpha, masks")->delimiter(',');
  fields->add_option("--dir", fields_dir, "output directory")->capture_default_str();
  auto* alpha = app.add_subcommand("alpha", "sensitivity field and probe-line decay fit");
  add_common(alpha, alpha_args);
  alpha->add_option("--dir", alpha_dir, "output directory")->capture_default_str();
  auto* self = app.add_subcommand("selftest", "quick consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*self) return selftest();
    if (*solve || *bench) {
      eikonal::ConfigDoc doc = load_doc(*solve ? solve_args : bench_args);
      if (!doc.has("run.timing")) doc.set("run.timing", *bench ? "true" : "false");
      if (*bench && !doc.has("run.repeat")) doc.set("run.repeat", "10");
      const auto cfg = harness::ExperimentConfig::from_doc(doc);
      return emit(cfg, harness::run_experiment(cfg));
    }
    if (*fields || *alpha) {
      const auto cfg = harness::ExperimentConfig::from_doc(load_doc(*fields ? fields_args : alpha_args));
      const auto paths = *fields ? harness::dump_fields(cfg, which, fields_dir)
                                 : harness::dump_fields(cfg, {"alpha"}, alpha_dir);
      for (const auto& p : paths) std::cout << p << '\n';
      return 0;
    }
  } catch (const eikonal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
