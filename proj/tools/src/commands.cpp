#include "pnest_cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace pnest::cli {
namespace {

std::string format_count(long long value) { return std::to_string(value); }

void report_failures(const MonteCarloResult& result, std::ostream& err) {
  for (const TrialFailure& f : result.failures) {
    err << "trial error: scenario " << f.scenario_id << ", estimator " << f.estimator
        << ", trial " << f.trial_index << ": " << f.message << '\n';
  }
}

// Commands other than sweep work on one block of one cell.
const OfdmScenario& single_cell(const RunConfig& config, const char* command) {
  if (config.grid.size() != 1) {
    throw ConfigError({std::string(command) + " needs a single scenario cell, config defines " +
                       std::to_string(config.grid.size())});
  }
  return config.grid.front();
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::vector<std::string> parse_csv_record(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

const std::vector<std::string>& aggregate_columns() {
  static const std::vector<std::string> columns = {
      "scenario_id",      "n_c",
      "L",                "phase_model",
      "delta_f_hz",       "snr_db",
      "estimator",        "n_reduced",
      "trials",           "phase_mse_mean",
      "phase_mse_min",    "phase_mse_max",
      "channel_mse_mean", "channel_mse_min",
      "channel_mse_max",  "iters_mean",
      "wall_ms_mean",     "wall_ms_min",
      "wall_ms_max",      "bic_mean",
      "phase_mse_per_sample_mean", "channel_mse_per_tap_mean",
      "iters_min",        "iters_max",
      "metric_ms_mean",   "unconverged",
  };
  return columns;
}

bool is_timing_column(const std::string& name) {
  return name.rfind("wall_ms", 0) == 0 || name.rfind("metric_ms", 0) == 0;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

std::vector<std::string> aggregate_fields(const AggregateRow& row) {
  const OfdmScenario& s = row.scenario;
  return {
      format_count(row.scenario_id),
      format_count(s.n_c),
      format_count(s.channel.length),
      s.phase_model_name(),
      format_number(s.delta_f_hz()),
      format_number(s.snr_db()),
      row.estimator.name(),
      format_count(row.n_reduced),
      format_count(row.trials),
      format_number(row.phase_mse.mean),
      format_number(row.phase_mse.min),
      format_number(row.phase_mse.max),
      format_number(row.channel_mse.mean),
      format_number(row.channel_mse.min),
      format_number(row.channel_mse.max),
      format_number(row.iterations.mean),
      format_number(row.wall_ms.mean),
      format_number(row.wall_ms.min),
      format_number(row.wall_ms.max),
      row.bic_mean ? format_number(*row.bic_mean) : std::string(),
      format_number(row.phase_mse_per_sample.mean),
      format_number(row.channel_mse_per_tap.mean),
      format_number(row.iterations.min),
      format_number(row.iterations.max),
      format_number(row.metric_ms.mean),
      format_count(row.unconverged),
  };
}

void write_aggregate_csv(std::ostream& out, const MonteCarloResult& result) {
  write_csv_row(out, aggregate_columns());
  for (const AggregateRow& row : result.rows) write_csv_row(out, aggregate_fields(row));
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const MonteCarloResult result =
      run_monte_carlo(config.grid, config.estimators, config.settings, config.workers);
  write_aggregate_csv(out, result);
  report_failures(result, err);
  return result.failures.empty() ? kExitOk : kExitTrialError;
}

int cmd_trace(const RunConfig& config, std::uint64_t trial_index, std::ostream& out,
              std::ostream& err) {
  const OfdmScenario& cell = single_cell(config, "trace");
  const BlockRealization block = generate_block(cell, trial_index);
  write_csv_row(out, {"estimator", "iteration", "objective", "delta_u_norm"});
  int status = kExitOk;
  for (const EstimatorSpec& spec : config.estimators) {
    try {
      const EstimateResult est = run_estimator(spec, block, config.settings);
      const std::string name = spec.name();
      if (est.objective_trace.empty()) {
        const ProjectorB b = ProjectorB::build(block.symbols, block.channel.size());
        write_csv_row(out, {name, "0", format_number(objective(est.u_star, block.received_time, b)),
                            ""});
        continue;
      }
      for (std::size_t t = 0; t < est.objective_trace.size(); ++t) {
        // MM traces start at the initial point; alternating traces do not.
        const bool has_initial = est.objective_trace.size() == est.step_norms.size() + 1;
        std::string delta;
        if (has_initial && t > 0) delta = format_number(est.step_norms[t - 1]);
        if (!has_initial && t < est.step_norms.size()) delta = format_number(est.step_norms[t]);
        const std::size_t iteration = has_initial ? t : t + 1;
        write_csv_row(out, {name, format_count(static_cast<long long>(iteration)),
                            format_number(est.objective_trace[t]), delta});
      }
    } catch (const std::exception& ex) {
      err << "trial error: estimator " << spec.name() << ": " << ex.what() << '\n';
      status = kExitTrialError;
    }
  }
  return status;
}

int cmd_single(const RunConfig& config, std::uint64_t trial_index, std::ostream& out,
               std::ostream& err) {
  const OfdmScenario& cell = single_cell(config, "single");
  const BlockRealization block = generate_block(cell, trial_index);
  std::vector<std::string> header = {"index", "theta_true"};
  std::vector<RealVector> estimates;
  int status = kExitOk;
  for (const EstimatorSpec& spec : config.estimators) {
    try {
      estimates.push_back(unwrap_phase(run_estimator(spec, block, config.settings).theta_hat));
      header.push_back("theta_hat_" + spec.name());
    } catch (const std::exception& ex) {
      err << "trial error: estimator " << spec.name() << ": " << ex.what() << '\n';
      status = kExitTrialError;
    }
  }
  write_csv_row(out, header);
  for (Index n = 0; n < block.n_c(); ++n) {
    std::vector<std::string> row = {format_count(n), format_number(block.theta[n])};
    for (const RealVector& theta : estimates) row.push_back(format_number(theta[n]));
    write_csv_row(out, row);
  }
  return status;
}

}  // namespace pnest::cli
