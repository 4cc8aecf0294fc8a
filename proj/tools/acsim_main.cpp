// Command-line front end: simulate | ensemble | verify | convergence.
// Exit codes: 0 success, 2 config error, 3 step failure, 4 verify failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "acsim/config.hpp"
#include "acsim/ensemble.hpp"
#include "acsim/io.hpp"
#include "acsim/stepper.hpp"
#include "acsim/verify.hpp"

namespace fs = std::filesystem;
using namespace acsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStepFailure = 3;
constexpr int kExitVerifyFailure = 4;

std::vector<double> parse_time_list(const std::string& csv) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

RunConfig load_and_override(const std::string& config_path,
                            const std::string& seed_override,
                            const std::string& snapshots_override) {
  RunConfig cfg = load_config(config_path);
  if (!seed_override.empty()) cfg.seed = std::stoull(seed_override);
  if (!snapshots_override.empty())
    cfg.snapshot_times = parse_time_list(snapshots_override);
  std::sort(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
  validate_config(cfg);
  return cfg;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::string& seed_override,
                 const std::string& snapshots_override) {
  RunConfig cfg;
  try {
    cfg = load_and_override(config_path, seed_override, snapshots_override);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  fs::create_directories(out_dir);
  const FemSystem fem = build_fem_system(cfg.n, cfg.bc);
  const PotentialSplit pot = make_potential(cfg);
  const RunParams params = make_run_params(cfg);

  std::ofstream events;
  if (cfg.write_events) {
    events.open(fs::path(out_dir) / "events.csv", std::ios::binary);
    events << "step,t,z1,z2\n";
  }
  RunSinks sinks;
  sinks.snapshot = [&](double t, const Field& u) {
    const fs::path base = fs::path(out_dir) / snapshot_basename(t);
    write_snapshot_csv(base.string(), fem.mesh, u);
    if (cfg.write_pgm)
      write_snapshot_pgm((fs::path(out_dir) /
                          ("snap_t" + format_double(t) + ".pgm")).string(),
                         fem.mesh, u);
    if (cfg.write_vtk)
      write_snapshot_vtk((fs::path(out_dir) /
                          ("snap_t" + format_double(t) + ".vtk")).string(),
                         fem.mesh, u, t);
  };
  if (cfg.write_events)
    sinks.jump_event = [&](int step, double t, double x, double y) {
      events << step << ',' << format_double(t) << ',' << format_double(x)
             << ',' << format_double(y) << '\n';
    };

  write_manifest((fs::path(out_dir) / "manifest.txt").string(), cfg);
  try {
    const RunRecord record =
        run_realization(fem, pot, params, cfg.seed, 0, &sinks);
    write_run_record_csv((fs::path(out_dir) / "observables.csv").string(),
                         record);
  } catch (const StepFailure& e) {
    std::cerr << "step failure at step " << e.step
              << " (residual " << e.residual << ")\n";
    return kExitStepFailure;
  }
  std::cout << "wrote " << out_dir << "\n";
  return kExitOk;
}

int run_ensemble_cmd(const std::string& config_path, const std::string& out_dir,
                     int realizations, const std::string& seed_override) {
  RunConfig cfg;
  try {
    cfg = load_and_override(config_path, seed_override, "");
    if (realizations < 1) throw ConfigError("config: --realizations must be >= 1");
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  fs::create_directories(out_dir);
  const FemSystem fem = build_fem_system(cfg.n, cfg.bc);
  const PotentialSplit pot = make_potential(cfg);
  RunParams params = make_run_params(cfg);
  params.snapshot_times.clear();  // per-realization snapshots off in ensembles

  write_manifest((fs::path(out_dir) / "manifest.txt").string(), cfg);
  const EnsembleStats stats =
      run_ensemble(fem, pot, params, realizations, cfg.seed);
  write_stats_csv((fs::path(out_dir) / "stats.csv").string(), stats);
  for (std::size_t id = 0; id < stats.records.size(); ++id) {
    if (stats.records[id].times.empty()) continue;
    write_run_record_csv(
        (fs::path(out_dir) / ("observables_r" + std::to_string(id) + ".csv"))
            .string(),
        stats.records[id]);
  }
  if (!stats.failed_realizations.empty()) {
    std::cerr << stats.failed_realizations.size()
              << " realization(s) aborted with step failures:";
    for (int id : stats.failed_realizations) std::cerr << ' ' << id;
    std::cerr << "\n";
    return kExitStepFailure;
  }
  std::cout << "wrote " << out_dir << "\n";
  return kExitOk;
}

int run_verify(const std::string& suite) {
  std::vector<CheckResult> results;
  try {
    results = verify_suite(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << "\n";
    if (!r.pass) ++failures;
  }
  std::cout << results.size() - failures << "/" << results.size()
            << " checks passed\n";
  return failures == 0 ? kExitOk : kExitVerifyFailure;
}

int run_convergence(const std::string& config_path, const std::string& out_dir,
                    const std::string& lambda_csv, int tau_levels,
                    const std::string& seed_override) {
  RunConfig cfg;
  std::vector<double> lambdas;
  try {
    cfg = load_and_override(config_path, seed_override, "");
    lambdas = parse_time_list(lambda_csv);
    if (lambdas.size() < 2)
      throw ConfigError("config: --lambdas needs at least two values");
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config: bad --lambdas list: " << e.what() << "\n";
    return kExitConfig;
  }

  fs::create_directories(out_dir);
  const FemSystem fem = build_fem_system(cfg.n, cfg.bc);
  const PotentialSplit pot = make_potential(cfg);
  RunParams params = make_run_params(cfg);
  params.snapshot_times.clear();
  write_manifest((fs::path(out_dir) / "manifest.txt").string(), cfg);

  // lambda-Cauchy trend against the exact-barrier reference
  const CauchyReport report =
      yosida_cauchy_check(fem, pot, params, lambdas, cfg.seed);
  {
    std::ofstream out(fs::path(out_dir) / "yosida_cauchy.csv",
                      std::ios::binary);
    out << "lambda,sup_diff_sq_vs_exact\n";
    for (std::size_t i = 0; i < report.lambdas.size(); ++i)
      out << format_double(report.lambdas[i]) << ','
          << format_double(report.sup_diff_sq_exact[i]) << '\n';
  }
  std::cout << "lambda-Cauchy sup-differences vs exact barrier:";
  for (double d : report.sup_diff_sq_exact) std::cout << ' ' << d;
  std::cout << "\n  monotone decreasing: "
            << (report.decreasing_vs_exact ? "yes" : "no")
            << "  fitted scale c=" << report.fitted_scale << "\n";

  // tau-refinement contraction order with noise and jumps off
  RunParams det = params;
  det.wiener.c_noise = 0.0;
  det.jump.lambda_jump = 0.0;
  det.scheme.t_final = std::min(det.scheme.t_final, 1.0);
  std::vector<Field> finals;
  for (int level = 0; level < std::max(2, tau_levels); ++level) {
    RunParams p = det;
    p.scheme.tau = det.scheme.tau / (1 << level);
    std::vector<Field> captured;
    RunSinks sinks;
    sinks.snapshot = [&captured](double, const Field& u) {
      captured.push_back(u);
    };
    p.snapshot_times = {p.scheme.t_final};
    run_realization(fem, pot, p, cfg.seed, 0, &sinks);
    finals.push_back(captured.back());
  }
  {
    std::ofstream out(fs::path(out_dir) / "tau_refinement.csv",
                      std::ios::binary);
    out << "tau,diff_inf_to_next\n";
    std::cout << "tau-refinement differences:";
    for (std::size_t level = 0; level + 1 < finals.size(); ++level) {
      double diff = 0.0;
      for (std::size_t i = 0; i < finals[level].size(); ++i)
        diff = std::max(diff,
                        std::abs(finals[level][i] - finals[level + 1][i]));
      out << format_double(det.scheme.tau / (1 << level)) << ','
          << format_double(diff) << '\n';
      std::cout << ' ' << diff;
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Allen-Cahn simulator with jump-diffusion noise"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", seed_override, snapshots_override;
  int realizations = 8;
  std::string suite = "all";
  std::string lambda_csv = "1e-2,1e-3,1e-4";
  int tau_levels = 3;

  auto* simulate = app.add_subcommand("simulate", "run one realization");
  simulate->add_option("--config", config_path, "config file")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--seed", seed_override, "override seed");
  simulate->add_option("--snapshots", snapshots_override,
                       "comma-separated snapshot times");

  auto* ensemble = app.add_subcommand("ensemble", "run an ensemble");
  ensemble->add_option("--config", config_path, "config file")->required();
  ensemble->add_option("--out", out_dir, "output directory");
  ensemble->add_option("--realizations", realizations, "realization count");
  ensemble->add_option("--seed", seed_override, "override seed");

  auto* verify = app.add_subcommand("verify", "run property suites");
  verify->add_option("suite", suite,
                     "mesh|potential|wiener|jump|energy|all");

  auto* convergence =
      app.add_subcommand("convergence", "tau refinement and lambda-Cauchy");
  convergence->add_option("--config", config_path, "config file")->required();
  convergence->add_option("--out", out_dir, "output directory");
  convergence->add_option("--lambdas", lambda_csv, "lambda list");
  convergence->add_option("--tau-levels", tau_levels, "refinement levels");
  convergence->add_option("--seed", seed_override, "override seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return run_simulate(config_path, out_dir, seed_override,
                          snapshots_override);
    if (ensemble->parsed())
      return run_ensemble_cmd(config_path, out_dir, realizations,
                              seed_override);
    if (verify->parsed()) return run_verify(suite);
    if (convergence->parsed())
      return run_convergence(config_path, out_dir, lambda_csv, tau_levels,
                             seed_override);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const StepFailure& e) {
    std::cerr << "step failure at step " << e.step << "\n";
    return kExitStepFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
