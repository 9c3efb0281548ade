// End-to-end experiment orchestration: file outputs, exact round-trips,
// determinism, and the CLI exit-code contract.

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "bohmgrid/csvio.hpp"
#include "bohmgrid/errors.hpp"
#include "bohmgrid/experiment.hpp"

using namespace bohm;

namespace {

std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("bohmgrid_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Small single-packet experiment that completes in well under a second.
RunConfig tiny_config(const std::filesystem::path& out_dir) {
  RunConfig cfg;
  cfg.packets = {GaussianPacket{{1.0, 0.0}, 0.0, 4.0}};
  cfg.grid.kind = GridSpec::Kind::Uniform;
  cfg.grid.count = 21;
  cfg.grid.lo = -6.0;
  cfg.grid.hi = 6.0;
  cfg.dt = 0.01;
  cfg.num_steps = 20;
  cfg.amp_policy.estimator = Estimator::ExactPolynomial;
  cfg.amp_policy.basis_count = 7;
  cfg.amp_policy.interior_half_width = 3;
  cfg.amp_policy.boundary_degree = 2;
  cfg.amp_policy.boundary_extension = 3;
  cfg.phase_policy = cfg.amp_policy;
  cfg.output.directory = out_dir;
  cfg.output.snapshot_stride = 5;
  return cfg;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("doubles round-trip through the 17-digit format") {
  for (const double x : {0.1, -8.0, 1.0 / 3.0, 3.8000000000000007, 1e-30, -2.5e17}) {
    CHECK(csv::parse_double(csv::format_double(x)) == x);
  }
}

TEST_CASE("run_experiment writes the expected files and they round-trip") {
  const auto dir = fresh_dir("roundtrip");
  const RunConfig cfg = tiny_config(dir);
  const ExperimentResult result = run_experiment(cfg);

  CHECK(result.exit_code == kExitCompleted);
  CHECK(result.record.outcome.kind == Outcome::Kind::Completed);
  CHECK(std::filesystem::exists(dir / "trajectories.csv"));
  CHECK(std::filesystem::exists(dir / "diagnostics.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(resolved_config_path(dir)));

  // trajectories.csv reconstructs the snapshots exactly
  const RunRecord reloaded = load_record(dir);
  REQUIRE(reloaded.snapshots.size() == result.record.snapshots.size());
  CHECK(reloaded.snapshot_steps == result.record.snapshot_steps);
  for (std::size_t s = 0; s < reloaded.snapshots.size(); ++s) {
    const WaveState& a = result.record.snapshots[s];
    const WaveState& b = reloaded.snapshots[s];
    REQUIRE(a.size() == b.size());
    CHECK(a.time == b.time);
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a.positions[j] == b.positions[j]);
      CHECK(a.velocity[j] == b.velocity[j]);
      CHECK(a.log_amp[j] == b.log_amp[j]);
      CHECK(a.phase[j] == b.phase[j]);
    }
  }

  // the resolved config reparses to an equivalent experiment
  const RunConfig resolved = load_config(resolved_config_path(dir).string());
  CHECK(resolved.dt == cfg.dt);
  CHECK(resolved.num_steps == cfg.num_steps);
  CHECK(resolved.grid.count == cfg.grid.count);
  CHECK(resolved.packets.size() == cfg.packets.size());

  std::filesystem::remove_all(dir);
}

TEST_CASE("identical configs produce byte-identical CSV outputs") {
  const auto dir1 = fresh_dir("det1");
  const auto dir2 = fresh_dir("det2");
  (void)run_experiment(tiny_config(dir1));
  (void)run_experiment(tiny_config(dir2));
  CHECK(slurp(dir1 / "trajectories.csv") == slurp(dir2 / "trajectories.csv"));
  CHECK(slurp(dir1 / "diagnostics.csv") == slurp(dir2 / "diagnostics.csv"));
  CHECK(!slurp(dir1 / "trajectories.csv").empty());
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("emit flags control the optional files; the summary always exists") {
  const auto dir = fresh_dir("flags");
  RunConfig cfg = tiny_config(dir);
  cfg.output.emit_trajectories = false;
  cfg.output.emit_errors = false;
  cfg.output.emit_summary = false;
  (void)run_experiment(cfg);
  CHECK(!std::filesystem::exists(dir / "trajectories.csv"));
  CHECK(!std::filesystem::exists(dir / "diagnostics.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("fitted fields at t = 0 match the analytic density away from the edges") {
  const auto dir = fresh_dir("fields");
  RunConfig cfg = tiny_config(dir);
  cfg.num_steps = 1;
  cfg.output.snapshot_stride = 1;
  const ExperimentResult result = run_experiment(cfg);

  const double times[] = {0.0};
  emit_fitted_fields(result.record, cfg, times, dir);
  const auto path = dir / "fields_0.csv";
  REQUIRE(std::filesystem::exists(path));

  const csv::Table table = csv::read_table(path);
  REQUIRE(table.header.size() == 5);
  const AnalyticState state = cfg.analytic_state();
  int checked = 0;
  for (const auto& row : table.rows) {
    const double x = csv::parse_double(row[0]);
    if (std::abs(x) > 3.0) continue;  // stay clear of the boundary stencils
    const double fit_density = csv::parse_double(row[1]);
    const double ref_density = csv::parse_double(row[3]);
    CHECK(std::abs(fit_density - ref_density) < 1e-6);
    CHECK(ref_density == doctest::Approx(analytic_density(state, 0.0, x)).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked > 100);

  // requesting an absent time lists what is available
  const double missing[] = {0.123};
  try {
    emit_fitted_fields(result.record, cfg, missing, dir);
    FAIL("expected InvalidInputError");
  } catch (const InvalidInputError& e) {
    CHECK(std::string(e.what()).find("available times") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("fitted fields of the reference run stay close to the solution") {
  // 400 steps of the bundled polynomial-fit experiment, then the merged
  // per-point field curves at t = 3.8 (the time the central compression is
  // fully developed).
  const auto dir = fresh_dir("fields_ref");
  RunConfig cfg = load_config("paper_polyfit");
  cfg.num_steps = 400;
  cfg.output.directory = dir;
  cfg.output.snapshot_stride = 10;
  cfg.output.emit_trajectories = false;
  cfg.output.emit_errors = false;
  const ExperimentResult result = run_experiment(cfg);
  REQUIRE(result.record.outcome.kind == Outcome::Kind::Completed);

  const double times[] = {3.8};
  emit_fitted_fields(result.record, cfg, times, dir);
  const csv::Table table = csv::read_table(dir / "fields_380.csv");
  const AnalyticState state = cfg.analytic_state();
  int checked = 0;
  for (const auto& row : table.rows) {
    const double x = csv::parse_double(row[0]);
    if (std::abs(x) > 4.0) continue;
    const double fit_density = csv::parse_double(row[1]);
    const double ref_density = analytic_density(state, 3.8, x);
    CHECK(fit_density == doctest::Approx(ref_density).epsilon(0.05));
    CHECK(std::isfinite(csv::parse_double(row[2])));  // merged velocity field
    ++checked;
  }
  CHECK(checked > 500);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes distinguish the scientific outcomes") {
  Outcome completed;
  completed.kind = Outcome::Kind::Completed;
  CHECK(exit_code_for(completed) == 0);
  Outcome crossed;
  crossed.kind = Outcome::Kind::Crossed;
  CHECK(exit_code_for(crossed) == 3);
  Outcome failed;
  failed.kind = Outcome::Kind::Failed;
  CHECK(exit_code_for(failed) == 4);
}

#if defined(BOHMGRID_CLI_PATH)

TEST_CASE("the CLI binary runs a config end to end") {
  const auto dir = fresh_dir("cli");
  const auto cfg_path = dir / "tiny.cfg";
  {
    std::ofstream out(cfg_path);
    out << "[packets]\npacket = 1.0 0.0 0.0 4.0\n"
        << "[grid]\nkind = uniform\nlo = -6.0\nhi = 6.0\ncount = 21\n"
        << "[step]\ndt = 0.01\nnum_steps = 20\n"
        << "[amp_fit]\nestimator = exact\nbasis_count = 7\ninterior_half_width = 3\n"
        << "boundary_degree = 2\nboundary_extension = 3\n"
        << "[phase_fit]\nestimator = exact\nbasis_count = 7\ninterior_half_width = 3\n"
        << "boundary_degree = 2\nboundary_extension = 3\n"
        << "[output]\ndirectory = " << (dir / "out").string() << "\nsnapshot_stride = 5\n";
  }
  const std::string cmd = std::string(BOHMGRID_CLI_PATH) + " simulate --config " +
                          cfg_path.string() + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "trajectories.csv"));

  // fields subcommand on the finished record
  const std::string fields_cmd = std::string(BOHMGRID_CLI_PATH) + " fields --record " +
                                 (dir / "out").string() + " --times 0.1 > /dev/null 2>&1";
  const int fstatus = std::system(fields_cmd.c_str());
  CHECK(WIFEXITED(fstatus));
  CHECK(WEXITSTATUS(fstatus) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "fields_10.csv"));

  // a bad config exits with the usage code
  const std::string bad_cmd = std::string(BOHMGRID_CLI_PATH) +
                              " simulate --config /nonexistent.cfg > /dev/null 2>&1";
  const int bstatus = std::system(bad_cmd.c_str());
  CHECK(WIFEXITED(bstatus));
  CHECK(WEXITSTATUS(bstatus) == 2);

  // --method swaps both estimators (window 7 >= m keeps lsq valid here)
  const std::string method_cmd = std::string(BOHMGRID_CLI_PATH) +
                                 " simulate --config " + cfg_path.string() +
                                 " --method lsq --output " + (dir / "out_lsq").string() +
                                 " > /dev/null 2>&1";
  const int mstatus = std::system(method_cmd.c_str());
  CHECK(WIFEXITED(mstatus));
  CHECK(WEXITSTATUS(mstatus) == 0);
  {
    std::ifstream resolved(bohm::resolved_config_path(dir / "out_lsq"));
    std::ostringstream text;
    text << resolved.rdbuf();
    CHECK(text.str().find("estimator = lsq") != std::string::npos);
  }

  // init-grid writes the requested grid
  const std::string grid_cmd = std::string(BOHMGRID_CLI_PATH) + " init-grid --config " +
                               cfg_path.string() + " --kind quantile --out " +
                               (dir / "grid.csv").string() + " > /dev/null 2>&1";
  const int gstatus = std::system(grid_cmd.c_str());
  CHECK(WIFEXITED(gstatus));
  CHECK(WEXITSTATUS(gstatus) == 0);
  const csv::Table grid = csv::read_table(dir / "grid.csv");
  CHECK(grid.rows.size() == 21);

  std::filesystem::remove_all(dir);
}

TEST_CASE("the bundled crossing experiment exits with the crossing code") {
  const auto dir = fresh_dir("cli_lsq");
  const std::string cmd = std::string(BOHMGRID_CLI_PATH) +
                          " simulate --config paper_lsq --output " + dir.string() +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 3);
  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("\"outcome\": \"crossed\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}

#endif  // BOHMGRID_CLI_PATH
