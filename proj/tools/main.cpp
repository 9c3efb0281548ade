// Command-line front end.
//
//   bohmgrid simulate  --config <path|paper_polyfit|paper_lsq>
//                      [--output <dir>] [--snapshot-every <k>] [--method exact|lsq]
//   bohmgrid fields    --record <dir> --times <t1,t2,...>
//   bohmgrid init-grid --config <path> --kind uniform|quantile|random --out <file>
//
// Exit codes: 0 completed, 2 config/usage error, 3 trajectory crossing,
// 4 run failure. A crossing is a reported result, not a crash.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bohmgrid/config.hpp"
#include "bohmgrid/csvio.hpp"
#include "bohmgrid/errors.hpp"
#include "bohmgrid/experiment.hpp"

namespace {

std::vector<double> parse_times(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(bohm::csv::parse_double(item));
  }
  if (out.empty()) {
    throw bohm::InvalidInputError("--times needs at least one value");
  }
  return out;
}

int run_simulate(const std::string& config, const std::string& output,
                 int snapshot_every, const std::string& method) {
  bohm::RunConfig cfg = bohm::load_config(config);
  if (!output.empty()) cfg.output.directory = output;
  if (snapshot_every > 0) cfg.output.snapshot_stride = snapshot_every;
  if (method == "exact") {
    cfg.amp_policy.estimator = bohm::Estimator::ExactPolynomial;
    cfg.phase_policy.estimator = bohm::Estimator::ExactPolynomial;
  } else if (method == "lsq") {
    cfg.amp_policy.estimator = bohm::Estimator::LeastSquares;
    cfg.phase_policy.estimator = bohm::Estimator::LeastSquares;
  } else if (!method.empty()) {
    throw bohm::ConfigError("--method must be exact or lsq");
  }
  cfg.validate();

  const bohm::ExperimentResult result = bohm::run_experiment(cfg);
  if (cfg.output.emit_summary) {
    const auto& o = result.record.outcome;
    switch (o.kind) {
      case bohm::Outcome::Kind::Completed:
        std::cout << "completed " << o.step << " steps, t = " << o.time << "\n";
        break;
      case bohm::Outcome::Kind::Crossed:
        std::cout << "trajectory crossing at step " << o.step << ", t = " << o.time
                  << " (pair index " << o.pair_index << ")\n";
        break;
      case bohm::Outcome::Kind::Failed:
        std::cout << "failed at step " << o.step << ": " << o.reason << "\n";
        break;
    }
    std::cout << "outputs in " << result.output_dir.string() << "\n";
  }
  return result.exit_code;
}

int run_fields(const std::string& record_dir, const std::string& times) {
  const bohm::RunConfig cfg =
      bohm::load_config(bohm::resolved_config_path(record_dir).string());
  const bohm::RunRecord record = bohm::load_record(record_dir);
  try {
    bohm::emit_fitted_fields(record, cfg, parse_times(times), record_dir);
  } catch (const bohm::InvalidInputError& e) {
    // a time outside the snapshot set is a usage problem, not a run failure
    throw bohm::ConfigError(e.what());
  }
  return 0;
}

int run_init_grid(const std::string& config, const std::string& kind,
                  const std::string& out_file) {
  bohm::RunConfig cfg = bohm::load_config(config);
  if (kind == "uniform") cfg.grid.kind = bohm::GridSpec::Kind::Uniform;
  else if (kind == "quantile") cfg.grid.kind = bohm::GridSpec::Kind::Quantile;
  else if (kind == "random") cfg.grid.kind = bohm::GridSpec::Kind::RandomSampled;
  else if (!kind.empty()) throw bohm::ConfigError("--kind must be uniform, quantile or random");

  const bohm::AnalyticState state = cfg.analytic_state();
  const std::vector<double> grid = bohm::build_grid(cfg.grid, state, cfg.dt);
  std::ofstream out(out_file);
  if (!out) {
    throw bohm::InvalidInputError("cannot write " + out_file);
  }
  out << "index,q\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out << j << ',' << bohm::csv::format_double(grid[j]) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-D quantum trajectory-grid simulator"};
  app.require_subcommand(1);

  std::string config, output, method;
  int snapshot_every = 0;
  auto* simulate = app.add_subcommand("simulate", "run a configured experiment");
  simulate->add_option("--config", config, "config file or bundled name")->required();
  simulate->add_option("--output", output, "override the output directory");
  simulate->add_option("--snapshot-every", snapshot_every, "override the snapshot stride");
  simulate->add_option("--method", method, "override both fit estimators (exact|lsq)");

  std::string record_dir, times;
  auto* fields = app.add_subcommand("fields", "sample fitted fields from a finished run");
  fields->add_option("--record", record_dir, "output directory of a previous run")->required();
  fields->add_option("--times", times, "comma-separated snapshot times")->required();

  std::string grid_config, grid_kind, grid_out;
  auto* init_grid = app.add_subcommand("init-grid", "construct and write initial grid points");
  init_grid->add_option("--config", grid_config, "config file or bundled name")->required();
  init_grid->add_option("--kind", grid_kind, "grid kind override (uniform|quantile|random)");
  init_grid->add_option("--out", grid_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bohm::kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(config, output, snapshot_every, method);
    if (fields->parsed()) return run_fields(record_dir, times);
    if (init_grid->parsed()) return run_init_grid(grid_config, grid_kind, grid_out);
  } catch (const bohm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bohm::kExitUsage;
  } catch (const bohm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bohm::kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bohm::kExitFailed;
  }
  return bohm::kExitUsage;
}
