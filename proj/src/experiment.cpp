#include "bohmgrid/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bohmgrid/csvio.hpp"
#include "bohmgrid/errors.hpp"
#include "bohmgrid/kernels.hpp"

namespace bohm {

namespace {

void write_trajectories(const RunRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << "step,time,index,q,v,C,S\n";
  for (std::size_t s = 0; s < record.snapshots.size(); ++s) {
    const WaveState& ws = record.snapshots[s];
    const int step = record.snapshot_steps[s];
    const std::string time = csv::format_double(ws.time);
    for (std::size_t j = 0; j < ws.size(); ++j) {
      out << step << ',' << time << ',' << j << ','
          << csv::format_double(ws.positions[j]) << ','
          << csv::format_double(ws.velocity[j]) << ','
          << csv::format_double(ws.log_amp[j]) << ','
          << csv::format_double(ws.phase[j]) << '\n';
    }
  }
}

void write_diagnostics(const RunRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << "step,time,min_spacing,l2_error,norm,equivariance_residual\n";
  // min_spacing is per step; the other series exist only at snapshot steps.
  std::map<int, std::size_t> snapshot_of_step;
  for (std::size_t s = 0; s < record.snapshot_steps.size(); ++s) {
    snapshot_of_step[record.snapshot_steps[s]] = s;
  }
  for (std::size_t k = 0; k < record.min_spacing_series.size(); ++k) {
    const auto& ms = record.min_spacing_series[k];
    out << k << ',' << csv::format_double(ms.time) << ','
        << csv::format_double(ms.value) << ',';
    const auto it = snapshot_of_step.find(static_cast<int>(k));
    if (it != snapshot_of_step.end()) {
      const std::size_t s = it->second;
      if (s < record.l2_error_series.size()) {
        out << csv::format_double(record.l2_error_series[s].value);
      }
      out << ',' << csv::format_double(record.norm_series[s].value) << ','
          << csv::format_double(record.equivariance_series[s].value);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

void write_summary(const ExperimentResult& result, const RunRecord& record,
                   const std::filesystem::path& path) {
  nlohmann::json j;
  switch (record.outcome.kind) {
    case Outcome::Kind::Completed: j["outcome"] = "completed"; break;
    case Outcome::Kind::Crossed: j["outcome"] = "crossed"; break;
    case Outcome::Kind::Failed: j["outcome"] = "failed"; break;
  }
  j["terminal_step"] = record.outcome.step;
  j["terminal_time"] = record.outcome.time;
  if (record.outcome.kind == Outcome::Kind::Crossed) {
    j["crossing"] = {
        {"step", record.outcome.step},
        {"time", record.outcome.time},
        {"pair_index", record.outcome.pair_index},
    };
  }
  if (record.outcome.kind == Outcome::Kind::Failed) {
    j["failure_reason"] = record.outcome.reason;
  }
  if (!record.l2_error_series.empty()) {
    j["final_l2_error"] = record.l2_error_series.back().value;
  }
  if (!record.min_spacing_series.empty()) {
    j["final_min_spacing"] = record.min_spacing_series.back().value;
  }
  if (!record.norm_series.empty()) {
    j["initial_norm"] = record.norm_series.front().value;
    j["final_norm"] = record.norm_series.back().value;
  }
  j["wall_seconds"] = result.wall_seconds;
  j["kernel_backend"] = kernels::backend_name(kernels::active_backend());
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[packets]\n";
  for (const auto& p : cfg.packets) {
    out << "packet = " << csv::format_double(p.weight.real()) << ' '
        << csv::format_double(p.weight.imag()) << ' '
        << csv::format_double(p.center) << ' ' << csv::format_double(p.sigma) << '\n';
  }
  out << "\n[grid]\n";
  switch (cfg.grid.kind) {
    case GridSpec::Kind::Uniform: out << "kind = uniform\n"; break;
    case GridSpec::Kind::Quantile: out << "kind = quantile\n"; break;
    case GridSpec::Kind::RandomSampled: out << "kind = random\n"; break;
  }
  out << "count = " << cfg.grid.count << '\n'
      << "lo = " << csv::format_double(cfg.grid.lo) << '\n'
      << "hi = " << csv::format_double(cfg.grid.hi) << '\n'
      << "start_hint = " << csv::format_double(cfg.grid.start_hint) << '\n'
      << "seed = " << cfg.grid.seed << '\n'
      << "min_spacing_time_ratio = "
      << csv::format_double(cfg.grid.min_spacing_time_ratio) << '\n';
  out << "\n[step]\ndt = " << csv::format_double(cfg.dt) << '\n'
      << "num_steps = " << cfg.num_steps << '\n'
      << "potential = free\n";
  const auto dump_fit = [&out](const char* name, const FitPolicy& p) {
    out << "\n[" << name << "]\n"
        << "estimator = "
        << (p.estimator == Estimator::ExactPolynomial ? "exact" : "lsq") << '\n'
        << "basis_count = " << p.basis_count << '\n'
        << "interior_half_width = " << p.interior_half_width << '\n'
        << "boundary_degree = " << p.boundary_degree << '\n'
        << "boundary_extension = " << p.boundary_extension << '\n';
    if (p.weight_kernel.kind == WeightKernel::Kind::Gaussian) {
      out << "weight_kernel = gaussian:" << csv::format_double(p.weight_kernel.bandwidth)
          << '\n';
    } else {
      out << "weight_kernel = uniform\n";
    }
  };
  dump_fit("amp_fit", cfg.amp_policy);
  dump_fit("phase_fit", cfg.phase_policy);
  out << "\n[output]\n"
      << "directory = " << cfg.output.directory.string() << '\n'
      << "snapshot_stride = " << cfg.output.snapshot_stride << '\n'
      << "emit_trajectories = " << (cfg.output.emit_trajectories ? "true" : "false") << '\n'
      << "emit_fields = " << (cfg.output.emit_fields ? "true" : "false") << '\n'
      << "emit_errors = " << (cfg.output.emit_errors ? "true" : "false") << '\n'
      << "emit_summary = " << (cfg.output.emit_summary ? "true" : "false") << '\n';
  if (!cfg.output.fields_times.empty()) {
    out << "fields_times = ";
    for (std::size_t i = 0; i < cfg.output.fields_times.size(); ++i) {
      if (i) out << ',';
      out << csv::format_double(cfg.output.fields_times[i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

int exit_code_for(const Outcome& outcome) {
  switch (outcome.kind) {
    case Outcome::Kind::Completed: return kExitCompleted;
    case Outcome::Kind::Crossed: return kExitCrossed;
    case Outcome::Kind::Failed: return kExitFailed;
  }
  return kExitFailed;
}

std::filesystem::path resolved_config_path(const std::filesystem::path& dir) {
  return dir / "config.resolved.cfg";
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const AnalyticState state = cfg.analytic_state();
  const std::vector<double> grid = build_grid(cfg.grid, state, cfg.dt);
  const WaveState initial = init_from_analytic(state, grid);

  RunOptions options;
  options.snapshot_stride = cfg.output.snapshot_stride;
  options.reference = state;

  ExperimentResult result;
  result.record = run(initial, cfg.step_config(), cfg.num_steps, options);
  result.output_dir = cfg.output.directory;
  result.exit_code = exit_code_for(result.record.outcome);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(result.output_dir);
  {
    std::ofstream out(resolved_config_path(result.output_dir));
    out << serialize_config(cfg);
  }
  if (cfg.output.emit_trajectories) {
    write_trajectories(result.record, result.output_dir / "trajectories.csv");
  }
  if (cfg.output.emit_errors) {
    write_diagnostics(result.record, result.output_dir / "diagnostics.csv");
  }
  if (cfg.output.emit_fields) {
    emit_fitted_fields(result.record, cfg, cfg.output.fields_times, result.output_dir);
  }
  // The structured summary is always written; emit_summary only controls the
  // CLI's stdout echo.
  write_summary(result, result.record, result.output_dir / "summary.json");
  return result;
}

void emit_fitted_fields(const RunRecord& record, const RunConfig& cfg,
                        std::span<const double> times,
                        const std::filesystem::path& out_dir) {
  const AnalyticState state = cfg.analytic_state();
  std::filesystem::create_directories(out_dir);

  for (const double t : times) {
    std::ptrdiff_t found = -1;
    for (std::size_t s = 0; s < record.snapshots.size(); ++s) {
      if (std::abs(record.snapshots[s].time - t) <= 1e-9 * (1.0 + std::abs(t))) {
        found = static_cast<std::ptrdiff_t>(s);
        break;
      }
    }
    if (found < 0) {
      std::ostringstream msg;
      msg << "no snapshot at t = " << t << "; available times:";
      for (std::size_t s = 0; s < record.snapshots.size(); ++s) {
        if (s > 60) {
          msg << " ...";
          break;
        }
        msg << ' ' << record.snapshots[s].time;
      }
      throw InvalidInputError(msg.str());
    }

    const WaveState& ws = record.snapshots[static_cast<std::size_t>(found)];
    const int step = record.snapshot_steps[static_cast<std::size_t>(found)];
    const std::size_t n = ws.size();
    std::ofstream out(out_dir / ("fields_" + std::to_string(step) + ".csv"));
    out << "x,density_fit,velocity_fit,density_ref,velocity_ref\n";

    constexpr int kSamplesPerInterval = 100;
    std::vector<double> shifted(kSamplesPerInterval + 1);
    std::vector<double> log_amp_fit(kSamplesPerInterval + 1);
    std::vector<double> velocity_fit(kSamplesPerInterval + 1);
    for (std::size_t j = 0; j < n; ++j) {
      const FitResult amp_fit =
          fit_at_point(ws.positions, ws.log_amp, static_cast<int>(j), cfg.amp_policy);
      const FitResult phase_fit =
          fit_at_point(ws.positions, ws.phase, static_cast<int>(j), cfg.phase_policy);
      const std::vector<double> dphase = derivative_coefficients(phase_fit);

      // Each point owns its half-interval neighborhood; the outermost points
      // extend one length unit outward.
      const double x1 =
          (j == 0) ? ws.positions[0] - 1.0 : 0.5 * (ws.positions[j - 1] + ws.positions[j]);
      const double x2 = (j + 1 == n) ? ws.positions[n - 1] + 1.0
                                     : 0.5 * (ws.positions[j] + ws.positions[j + 1]);
      for (int k = 0; k <= kSamplesPerInterval; ++k) {
        const double x = x1 + (x2 - x1) * k / kSamplesPerInterval;
        shifted[static_cast<std::size_t>(k)] = x - amp_fit.center;
      }
      kernels::poly_eval_many(amp_fit.coefficients.data(), amp_fit.coefficients.size(),
                              shifted.data(), shifted.size(), log_amp_fit.data());
      kernels::poly_eval_many(dphase.data(), dphase.size(), shifted.data(),
                              shifted.size(), velocity_fit.data());

      for (int k = 0; k <= kSamplesPerInterval; ++k) {
        const double x = shifted[static_cast<std::size_t>(k)] + amp_fit.center;
        double v_ref = std::numeric_limits<double>::quiet_NaN();
        try {
          v_ref = analytic_velocity(state, ws.time, x);
        } catch (const NodeEvaluationError&) {
        }
        out << csv::format_double(x) << ','
            << csv::format_double(std::exp(2.0 * log_amp_fit[static_cast<std::size_t>(k)]))
            << ',' << csv::format_double(velocity_fit[static_cast<std::size_t>(k)]) << ','
            << csv::format_double(analytic_density(state, ws.time, x)) << ','
            << csv::format_double(v_ref) << '\n';
      }
    }
  }
}

RunRecord load_record(const std::filesystem::path& dir) {
  const csv::Table table = csv::read_table(dir / "trajectories.csv");
  const std::vector<std::string> expected = {"step", "time", "index", "q", "v", "C", "S"};
  if (table.header != expected) {
    throw InvalidInputError("unexpected trajectories.csv header in " + dir.string());
  }
  RunRecord record;
  for (const auto& row : table.rows) {
    if (row.size() != 7) {
      throw InvalidInputError("malformed trajectories.csv row in " + dir.string());
    }
    const int step = static_cast<int>(csv::parse_long(row[0]));
    if (record.snapshot_steps.empty() || record.snapshot_steps.back() != step) {
      record.snapshot_steps.push_back(step);
      record.snapshots.emplace_back();
      record.snapshots.back().time = csv::parse_double(row[1]);
    }
    WaveState& ws = record.snapshots.back();
    ws.positions.push_back(csv::parse_double(row[3]));
    ws.velocity.push_back(csv::parse_double(row[4]));
    ws.log_amp.push_back(csv::parse_double(row[5]));
    ws.phase.push_back(csv::parse_double(row[6]));
  }
  return record;
}

}  // namespace bohm
