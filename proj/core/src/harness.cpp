#include "pnest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace pnest {
namespace {

// Substream ids inside a trial's stream.
enum : std::uint64_t { kSymbolStream = 0, kChannelStream = 1, kPhaseStream = 2, kNoiseStream = 3 };
// Trial slot used for symbols under SymbolPolicy::kFixed.
constexpr std::uint64_t kSharedSymbolTrial = std::numeric_limits<std::uint64_t>::max();

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::optional<Index> model_dimension(const EstimatorSpec& spec, Index n_c) {
  switch (spec.kind) {
    case EstimatorKind::kTqm:
    case EstimatorKind::kLqm:
      return n_c;
    case EstimatorKind::kTqmPct:
    case EstimatorKind::kLqmPct:
      return spec.reduced_n;
    default:
      return std::nullopt;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void OfdmScenario::validate() const {
  if (n_c < 2) throw std::invalid_argument("scenario: n_c must be >= 2");
  channel.validate();
  if (channel.length >= n_c) throw std::invalid_argument("scenario: channel length must be < n_c");
  std::visit([](const auto& p) { p.validate(); }, phase);
  if (const auto* fixed = std::get_if<FixedSigma>(&noise); fixed && !(fixed->value >= 0.0)) {
    throw std::invalid_argument("scenario: noise sigma must be >= 0");
  }
  if (const auto* snr = std::get_if<SnrDb>(&noise); snr && std::isnan(snr->value)) {
    throw std::invalid_argument("scenario: snr_db is NaN");
  }
  if (trials < 1) throw std::invalid_argument("scenario: trials must be >= 1");
}

std::string OfdmScenario::phase_model_name() const {
  return std::holds_alternative<WienerPhaseParams>(phase) ? "wiener" : "gaussian";
}

double OfdmScenario::delta_f_hz() const {
  return std::visit([](const auto& p) { return p.delta_f_3db_hz; }, phase);
}

double OfdmScenario::snr_db() const {
  if (const auto* snr = std::get_if<SnrDb>(&noise)) return snr->value;
  return std::numeric_limits<double>::quiet_NaN();
}

BlockRealization generate_block(const OfdmScenario& scenario, std::uint64_t trial_index) {
  scenario.validate();
  const std::uint64_t seed = scenario.master_seed;
  RandomStream symbol_rng(seed,
                          scenario.symbols == SymbolPolicy::kFixed ? kSharedSymbolTrial : trial_index,
                          kSymbolStream);
  RandomStream channel_rng(seed, trial_index, kChannelStream);
  RandomStream phase_rng(seed, trial_index, kPhaseStream);
  RandomStream noise_rng(seed, trial_index, kNoiseStream);

  const ComplexVector s = gen_symbols(symbol_rng, scenario.n_c);
  const ComplexVector h = gen_channel(channel_rng, scenario.channel);
  RealVector theta = gen_phase(phase_rng, scenario.n_c, scenario.phase);
  theta.array() -= theta[0];

  double sigma = 0.0;
  if (const auto* snr = std::get_if<SnrDb>(&scenario.noise)) {
    sigma = snr_to_sigma(s, h, scenario.n_c, snr->value);
  } else {
    sigma = std::get<FixedSigma>(scenario.noise).value;
  }
  return transmit_receive(noise_rng, s, h, theta, sigma);
}

// ---------------------------------------------------------------------------

EstimatorSpec EstimatorSpec::parse(std::string_view name) {
  static const std::map<std::string_view, EstimatorKind, std::less<>> plain = {
      {"tqm", EstimatorKind::kTqm},           {"lqm", EstimatorKind::kLqm},
      {"tqm-optpct", EstimatorKind::kTqmOptPct}, {"altopt", EstimatorKind::kAltOpt},
      {"altmm", EstimatorKind::kAltMm},       {"ignore-phn", EstimatorKind::kIgnorePhn},
      {"exact-phn", EstimatorKind::kExactPhn},
  };
  static const std::map<std::string_view, EstimatorKind, std::less<>> reduced = {
      {"tqm-pct", EstimatorKind::kTqmPct},
      {"lqm-pct", EstimatorKind::kLqmPct},
      {"altopt-pct", EstimatorKind::kAltOptPct},
      {"altmm-pct", EstimatorKind::kAltMmPct},
  };
  if (auto it = plain.find(name); it != plain.end()) return {it->second, 0};
  const auto colon = name.find(':');
  if (colon != std::string_view::npos) {
    if (auto it = reduced.find(name.substr(0, colon)); it != reduced.end()) {
      const std::string_view digits = name.substr(colon + 1);
      Index n = 0;
      const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec == std::errc() && end == digits.data() + digits.size() && n >= 1) {
        return {it->second, n};
      }
      throw std::invalid_argument("estimator '" + std::string(name) +
                                  "': reduced length must be a positive integer");
    }
  }
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

std::string EstimatorSpec::name() const {
  switch (kind) {
    case EstimatorKind::kTqm: return "tqm";
    case EstimatorKind::kLqm: return "lqm";
    case EstimatorKind::kTqmPct: return "tqm-pct:" + std::to_string(reduced_n);
    case EstimatorKind::kLqmPct: return "lqm-pct:" + std::to_string(reduced_n);
    case EstimatorKind::kTqmOptPct: return "tqm-optpct";
    case EstimatorKind::kAltOpt: return "altopt";
    case EstimatorKind::kAltOptPct: return "altopt-pct:" + std::to_string(reduced_n);
    case EstimatorKind::kAltMm: return "altmm";
    case EstimatorKind::kAltMmPct: return "altmm-pct:" + std::to_string(reduced_n);
    case EstimatorKind::kIgnorePhn: return "ignore-phn";
    case EstimatorKind::kExactPhn: return "exact-phn";
  }
  return "unknown";
}

bool EstimatorSpec::has_fixed_pct() const {
  return kind == EstimatorKind::kTqmPct || kind == EstimatorKind::kLqmPct ||
         kind == EstimatorKind::kAltOptPct || kind == EstimatorKind::kAltMmPct;
}

EstimateResult run_estimator(const EstimatorSpec& spec, const BlockRealization& block,
                             const SolverSettings& settings) {
  const Index n_c = block.n_c();
  const Index channel_length = block.channel.size();
  const ComplexVector& y = block.received_time;

  auto known_phase = [&](const RealVector& theta) {
    const ProjectorB b = ProjectorB::build(block.symbols, channel_length);
    EstimateResult result;
    ComplexVector u(n_c);
    for (Index n = 0; n < n_c; ++n) u[n] = std::polar(1.0, -theta[n]);
    result.u_star = u;
    result.theta_hat = theta;
    result.h_hat = channel_estimate(u, y, b);
    result.converged = true;
    return result;
  };

  MmConfig mm = settings.mm;
  mm.reduction.reset();
  mm.initial.reset();
  AltConfig alt = settings.alt;
  alt.reduction.reset();
  if (spec.has_fixed_pct()) {
    const PctTransform t(n_c, spec.reduced_n);
    mm.reduction = t;
    alt.reduction = t;
  }

  switch (spec.kind) {
    case EstimatorKind::kExactPhn:
      return known_phase(block.theta);
    case EstimatorKind::kIgnorePhn:
      return known_phase(RealVector::Zero(n_c));
    case EstimatorKind::kTqm:
    case EstimatorKind::kTqmPct:
      mm.variant = MajorizationVariant::kTight;
      return run_mm(mm, y, ProjectorB::build(block.symbols, channel_length));
    case EstimatorKind::kLqm:
    case EstimatorKind::kLqmPct:
      mm.variant = MajorizationVariant::kLoose;
      return run_mm(mm, y, ProjectorB::build(block.symbols, channel_length));
    case EstimatorKind::kTqmOptPct: {
      mm.variant = MajorizationVariant::kTight;
      const std::vector<Index> candidates = settings.optpct_candidates.empty()
                                                ? default_pct_candidates(n_c)
                                                : settings.optpct_candidates;
      // A noiseless block has no finite BIC; the smallest positive variance
      // keeps the data term dominant.
      const double sigma_sq =
          std::max(block.noise_sigma * block.noise_sigma, std::numeric_limits<double>::min());
      return opt_pct_estimate(y, ProjectorB::build(block.symbols, channel_length), sigma_sq,
                              candidates, mm, OptPctOptions{settings.bic_noise});
    }
    case EstimatorKind::kAltOpt:
    case EstimatorKind::kAltOptPct:
      return altopt_run(alt, block.received_freq, block.symbols, channel_length);
    case EstimatorKind::kAltMm:
    case EstimatorKind::kAltMmPct:
      return altmm_run(alt, block.received_freq, block.symbols, channel_length);
  }
  throw std::logic_error("run_estimator: unhandled estimator kind");
}

// ---------------------------------------------------------------------------

TrialMetrics evaluate_estimate(const EstimateResult& estimate, const BlockRealization& block,
                               std::optional<Index> n_reduced) {
  TrialMetrics m;
  m.phase_mse = phase_mse(estimate.theta_hat, block.theta);
  m.channel_mse = channel_mse(estimate.h_hat, block.channel);
  const ProjectorB b = ProjectorB::build(block.symbols, block.channel.size());
  m.objective_final = objective(estimate.u_star, block.received_time, b);
  m.iterations = estimate.iterations;
  m.converged = estimate.converged;
  m.selected_n = estimate.selected_n;
  if (estimate.bic) {
    m.bic = estimate.bic;
  } else if (n_reduced && block.noise_sigma > 0.0) {
    m.bic = bic_score(m.objective_final, block.noise_sigma * block.noise_sigma, *n_reduced,
                      block.n_c());
  }
  return m;
}

namespace {

TrialMetrics timed_trial(const EstimatorSpec& spec, const BlockRealization& block,
                         const SolverSettings& settings) {
  const auto start = Clock::now();
  const EstimateResult estimate = run_estimator(spec, block, settings);
  const double wall = elapsed_ms(start);
  const auto metric_start = Clock::now();
  TrialMetrics m = evaluate_estimate(estimate, block, model_dimension(spec, block.n_c()));
  m.metric_ms = elapsed_ms(metric_start);
  m.wall_ms = wall;
  return m;
}

}  // namespace

TrialMetrics run_trial(const OfdmScenario& scenario, const EstimatorSpec& estimator,
                       std::uint64_t trial_index, const SolverSettings& settings) {
  const BlockRealization block = generate_block(scenario, trial_index);
  return timed_trial(estimator, block, settings);
}

// ---------------------------------------------------------------------------

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) {
    s.mean = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double total = 0.0;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    total += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = total / static_cast<double>(values.size());
  return s;
}

MonteCarloResult run_monte_carlo(const std::vector<OfdmScenario>& grid,
                                 const std::vector<EstimatorSpec>& estimators,
                                 const SolverSettings& settings, int workers) {
  if (grid.empty()) throw std::invalid_argument("run_monte_carlo: empty scenario grid");
  if (estimators.empty()) throw std::invalid_argument("run_monte_carlo: empty estimator list");
  for (const OfdmScenario& cell : grid) {
    cell.validate();
    for (const EstimatorSpec& spec : estimators) {
      if (spec.has_fixed_pct()) PctTransform(cell.n_c, spec.reduced_n);
    }
  }

  struct Task {
    std::size_t cell;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (int t = 0; t < grid[c].trials; ++t) tasks.push_back({c, t});
  }

  const std::size_t n_est = estimators.size();
  // Slot per (cell, estimator, trial); filled exactly once by one worker.
  std::vector<std::vector<std::optional<TrialMetrics>>> slots(grid.size() * n_est);
  std::vector<std::vector<std::string>> errors(grid.size() * n_est);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (std::size_t e = 0; e < n_est; ++e) {
      slots[c * n_est + e].resize(static_cast<std::size_t>(grid[c].trials));
      errors[c * n_est + e].resize(static_cast<std::size_t>(grid[c].trials));
    }
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const Task task = tasks[i];
      const auto trial = static_cast<std::size_t>(task.trial);
      std::optional<BlockRealization> block;
      std::string block_error;
      try {
        block = generate_block(grid[task.cell], static_cast<std::uint64_t>(task.trial));
      } catch (const std::exception& ex) {
        block_error = std::string("block generation: ") + ex.what();
      }
      for (std::size_t e = 0; e < n_est; ++e) {
        const std::size_t row = task.cell * n_est + e;
        if (!block) {
          errors[row][trial] = block_error;
          continue;
        }
        try {
          slots[row][trial] = timed_trial(estimators[e], *block, settings);
        } catch (const std::exception& ex) {
          errors[row][trial] = ex.what();
        }
      }
    }
  };

  const int n_workers = std::max(1, workers);
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (std::thread& thread : pool) thread.join();
  }

  MonteCarloResult out;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (std::size_t e = 0; e < n_est; ++e) {
      const std::size_t row_index = c * n_est + e;
      AggregateRow row;
      row.scenario_id = static_cast<int>(c);
      row.scenario = grid[c];
      row.estimator = estimators[e];
      std::vector<double> pm, pm_avg, cm, cm_avg, its, wall, metric, bics;
      std::map<Index, int> selected;
      std::vector<TrialMetrics> kept;
      for (std::size_t t = 0; t < slots[row_index].size(); ++t) {
        if (!slots[row_index][t]) {
          out.failures.push_back({static_cast<int>(c), estimators[e].name(),
                                  static_cast<std::uint64_t>(t), errors[row_index][t]});
          continue;
        }
        const TrialMetrics& m = *slots[row_index][t];
        pm.push_back(m.phase_mse);
        pm_avg.push_back(m.phase_mse / static_cast<double>(grid[c].n_c));
        cm.push_back(m.channel_mse);
        cm_avg.push_back(m.channel_mse / static_cast<double>(grid[c].channel.length));
        its.push_back(m.iterations);
        wall.push_back(m.wall_ms);
        metric.push_back(m.metric_ms);
        if (m.bic) bics.push_back(*m.bic);
        if (m.selected_n) ++selected[*m.selected_n];
        if (!m.converged) ++row.unconverged;
        kept.push_back(m);
      }
      row.trials = static_cast<int>(kept.size());
      row.phase_mse = summarize(pm);
      row.phase_mse_per_sample = summarize(pm_avg);
      row.channel_mse = summarize(cm);
      row.channel_mse_per_tap = summarize(cm_avg);
      row.iterations = summarize(its);
      row.wall_ms = summarize(wall);
      row.metric_ms = summarize(metric);
      if (!bics.empty()) row.bic_mean = summarize(bics).mean;
      if (estimators[e].has_fixed_pct()) {
        row.n_reduced = estimators[e].reduced_n;
      } else if (!selected.empty()) {
        // Most frequent choice; std::map order breaks ties toward smaller N.
        row.n_reduced = std::max_element(selected.begin(), selected.end(),
                                         [](const auto& a, const auto& b) {
                                           return a.second < b.second;
                                         })->first;
      } else {
        row.n_reduced = grid[c].n_c;
      }
      out.rows.push_back(std::move(row));
      out.trials.push_back(std::move(kept));
    }
  }
  return out;
}

}  // namespace pnest
