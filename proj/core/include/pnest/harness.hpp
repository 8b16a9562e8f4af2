#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pnest/baselines.hpp"
#include "pnest/estimators.hpp"
#include "pnest/signal_model.hpp"

namespace pnest {

// ---------------------------------------------------------------------------
// Metrics

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Unwraps a phase sequence so consecutive samples differ by at most pi.
RealVector unwrap_phase(const RealVector& wrapped);

/// Σ_n wrap(θ̂_n - θ_n - α*)² with α* = arg Σ_n exp(j(θ̂_n - θ_n)), i.e. the
/// summed squared error after removing the best common phase.
double phase_mse(const RealVector& theta_hat, const RealVector& theta_true);

/// min_α ‖e^{jα} ĥ - h‖² = ‖ĥ‖² + ‖h‖² - 2|ĥᴴh|.
double channel_mse(const ComplexVector& h_hat, const ComplexVector& h_true);

// ---------------------------------------------------------------------------
// Scenarios

struct SnrDb {
  double value = 35.0;
};
struct FixedSigma {
  double value = 0.1;
};
using NoiseSpec = std::variant<SnrDb, FixedSigma>;

enum class SymbolPolicy {
  kPerTrial,  // fresh symbols for every trial
  kFixed,     // one symbol block shared by all trials
};

/// One experiment cell.
struct OfdmScenario {
  Index n_c = 512;
  ChannelParams channel;
  PhaseModel phase = WienerPhaseParams{};
  NoiseSpec noise = SnrDb{};
  SymbolPolicy symbols = SymbolPolicy::kPerTrial;
  int trials = 100;
  std::uint64_t master_seed = 1;

  void validate() const;
  std::string phase_model_name() const;
  double delta_f_hz() const;
  /// NaN in fixed-sigma mode.
  double snr_db() const;
};

/// The block of trial `trial_index`. Depends only on (master_seed,
/// trial_index) and the scenario's generation parameters. The phase is
/// shifted so that theta[0] = 0 (the common phase is treated as corrected
/// frequency offset).
BlockRealization generate_block(const OfdmScenario& scenario, std::uint64_t trial_index);

// ---------------------------------------------------------------------------
// Estimators

enum class EstimatorKind {
  kTqm,
  kLqm,
  kTqmPct,
  kLqmPct,
  kTqmOptPct,
  kAltOpt,
  kAltOptPct,
  kAltMm,
  kAltMmPct,
  kIgnorePhn,
  kExactPhn,
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kTqm;
  Index reduced_n = 0;  // only for the *-pct:N kinds

  /// Accepts tqm, lqm, tqm-pct:N, lqm-pct:N, tqm-optpct, altopt,
  /// altopt-pct:N, altmm, altmm-pct:N, ignore-phn, exact-phn.
  static EstimatorSpec parse(std::string_view name);
  std::string name() const;
  bool has_fixed_pct() const;

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

struct SolverSettings {
  MmConfig mm;    // tolerance and max_iters; variant and reduction are set per estimator
  AltConfig alt;  // reduction is set per estimator
  /// Candidate reduced lengths for tqm-optpct; empty means 32, 64, ..., n_c.
  std::vector<Index> optpct_candidates;
  NoiseVariance bic_noise = NoiseVariance::kKnown;
};

/// Runs one estimator on one block. exact-phn and ignore-phn use
/// θ̂ = θ and θ̂ = 0 respectively and only estimate the channel.
EstimateResult run_estimator(const EstimatorSpec& spec, const BlockRealization& block,
                             const SolverSettings& settings);

// ---------------------------------------------------------------------------
// Trials

struct TrialMetrics {
  double phase_mse = 0.0;       // summed over subcarriers (rad²)
  double channel_mse = 0.0;     // summed over taps
  double objective_final = 0.0; // full-length objective at the estimate
  int iterations = 0;
  double wall_ms = 0.0;         // estimation only
  double metric_ms = 0.0;       // metric evaluation
  std::optional<Index> selected_n;
  std::optional<double> bic;
  bool converged = true;
};

/// Builds metrics for an estimate of `block`. `n_reduced` is the model
/// dimension used for the BIC column (absent for the baselines).
TrialMetrics evaluate_estimate(const EstimateResult& estimate, const BlockRealization& block,
                               std::optional<Index> n_reduced);

/// Deterministic given (scenario.master_seed, trial_index) except wall time.
TrialMetrics run_trial(const OfdmScenario& scenario, const EstimatorSpec& estimator,
                       std::uint64_t trial_index, const SolverSettings& settings = {});

// ---------------------------------------------------------------------------
// Monte Carlo

struct MetricSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

MetricSummary summarize(const std::vector<double>& values);

struct AggregateRow {
  int scenario_id = 0;
  OfdmScenario scenario;
  EstimatorSpec estimator;
  /// Reduced length: N for fixed PCTs, n_c for unreduced solvers, the most
  /// frequently selected N for tqm-optpct.
  Index n_reduced = 0;
  int trials = 0;
  MetricSummary phase_mse;
  MetricSummary phase_mse_per_sample;
  MetricSummary channel_mse;
  MetricSummary channel_mse_per_tap;
  MetricSummary iterations;
  MetricSummary wall_ms;
  MetricSummary metric_ms;
  std::optional<double> bic_mean;
  int unconverged = 0;
};

struct TrialFailure {
  int scenario_id = 0;
  std::string estimator;
  std::uint64_t trial_index = 0;
  std::string message;
};

struct MonteCarloResult {
  std::vector<AggregateRow> rows;
  std::vector<TrialFailure> failures;
  /// Per-trial metrics indexed [row][trial], kept for callers that need
  /// more than min/mean/max.
  std::vector<std::vector<TrialMetrics>> trials;
};

/// Runs every (cell, estimator, trial). Each trial's block is generated
/// once and shared by all estimators. Results are independent of `workers`.
MonteCarloResult run_monte_carlo(const std::vector<OfdmScenario>& grid,
                                 const std::vector<EstimatorSpec>& estimators,
                                 const SolverSettings& settings = {}, int workers = 1);

}  // namespace pnest
