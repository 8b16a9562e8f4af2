#include "pnest_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace pnest::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

bool is_power_of_two(Index n) { return n >= 2 && (n & (n - 1)) == 0; }

struct Entry {
  int line = 0;
  std::string value;
};

const std::set<std::string, std::less<>> kKnownKeys = {
    "n_c",
    "channel_length",
    "channel_decay",
    "phase_model",
    "wiener_delta_f_hz",
    "gaussian_delta_f_hz",
    "gaussian_theta_rms_deg",
    "sampling_rate_hz",
    "snr_db",
    "noise_sigma",
    "symbol_policy",
    "estimators",
    "optpct_candidates",
    "trials",
    "master_seed",
    "workers",
    "tolerance",
    "max_iters",
    "alt_outer_max_iters",
    "alt_inner_max_iters",
    "alt_outer_tolerance",
    "alt_inner_tolerance",
    "bic_noise",
    "out",
};

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void load(std::string_view text) {
    int line_no = 0;
    while (!text.empty()) {
      ++line_no;
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      if (const auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        error(line_no, "expected 'key = value', got '" + std::string(line) + "'");
        continue;
      }
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (kKnownKeys.find(key) == kKnownKeys.end()) {
        error(line_no, "unknown key '" + key + "'");
        continue;
      }
      if (const auto it = entries_.find(key); it != entries_.end()) {
        error(line_no, "duplicate key '" + key + "' (first set on line " +
                           std::to_string(it->second.line) + ")");
        continue;
      }
      entries_[key] = {line_no, value};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::vector<std::string>> strings(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return split_list(it->second.value);
  }

  std::optional<std::string> string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
  }

  /// Parses a list of numbers, reporting every bad item. `check` returns a
  /// description of the violated constraint, or nullptr when the value is ok.
  template <typename T>
  std::vector<T> numbers(const std::string& key, std::vector<T> fallback,
                         const std::function<const char*(T)>& check) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<T> out;
    const auto items = split_list(it->second.value);
    if (items.empty()) error(it->second.line, "'" + key + "' needs at least one value");
    for (const std::string& item : items) {
      const auto value = parse_number<T>(item);
      if (!value) {
        error(it->second.line, "'" + key + "': cannot parse '" + item + "'");
        continue;
      }
      if (const char* problem = check(*value)) {
        error(it->second.line, "'" + key + "' = " + item + ": " + problem);
        continue;
      }
      out.push_back(*value);
    }
    return out;
  }

  template <typename T>
  T scalar(const std::string& key, T fallback, const std::function<const char*(T)>& check) {
    const auto values = numbers<T>(key, {fallback}, check);
    if (values.size() > 1) error(line_of(key), "'" + key + "' takes a single value");
    return values.empty() ? fallback : values.front();
  }

  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void error(int line, const std::string& message) {
    errors_.push_back(line > 0 ? "line " + std::to_string(line) + ": " + message : message);
  }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
  std::vector<std::string>& errors_;
};

const char* positive(double v) { return v > 0.0 ? nullptr : "must be > 0"; }
const char* non_negative(double v) { return v >= 0.0 ? nullptr : "must be >= 0"; }
const char* at_least_one(long long v) { return v >= 1 ? nullptr : "must be >= 1"; }
const char* any_double(double) { return nullptr; }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(errors.empty() ? "invalid config" : errors.front()),
      errors_(std::move(errors)) {}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  std::vector<std::string> errors;
  Reader in(errors);
  in.load(text);

  RunConfig config;

  const auto n_cs = in.numbers<long long>("n_c", {512}, [](long long v) -> const char* {
    return is_power_of_two(static_cast<Index>(v)) ? nullptr : "n_c must be a power of two >= 2";
  });
  const auto channel_length = in.scalar<long long>("channel_length", 10, at_least_one);
  const double channel_decay = in.scalar<double>("channel_decay", 0.7, any_double);
  const double fs = in.scalar<double>("sampling_rate_hz", 20e6, positive);
  for (long long n_c : n_cs) {
    if (channel_length >= n_c) {
      in.error(in.line_of("channel_length"), "channel_length = " + std::to_string(channel_length) +
                                                 " must be < n_c = " + std::to_string(n_c));
    }
  }

  // Phase cells.
  std::vector<PhaseModel> phases;
  const auto models = in.strings("phase_model").value_or(std::vector<std::string>{"wiener"});
  if (models.empty()) in.error(in.line_of("phase_model"), "'phase_model' needs at least one value");
  const auto wiener_df = in.numbers<double>("wiener_delta_f_hz", {5000.0}, [fs](double v) {
    return v >= 0.0 && v < fs ? nullptr : "must lie in [0, sampling_rate_hz)";
  });
  const auto gaussian_df = in.numbers<double>("gaussian_delta_f_hz", {100.0}, positive);
  const auto theta_rms = in.numbers<double>("gaussian_theta_rms_deg", {2.0}, non_negative);
  bool uses_wiener = false;
  bool uses_gaussian = false;
  for (const std::string& model : models) {
    if (model == "wiener") {
      uses_wiener = true;
      for (double df : wiener_df) phases.push_back(WienerPhaseParams{fs, df});
    } else if (model == "gaussian") {
      uses_gaussian = true;
      for (double df : gaussian_df) {
        for (double rms : theta_rms) phases.push_back(GaussianPhaseParams{fs, df, rms});
      }
    } else {
      in.error(in.line_of("phase_model"),
               "unknown phase_model '" + model + "' (expected wiener or gaussian)");
    }
  }
  if (in.has("wiener_delta_f_hz") && !uses_wiener) {
    in.error(in.line_of("wiener_delta_f_hz"), "'wiener_delta_f_hz' set but phase_model has no wiener");
  }
  for (const char* key : {"gaussian_delta_f_hz", "gaussian_theta_rms_deg"}) {
    if (in.has(key) && !uses_gaussian) {
      in.error(in.line_of(key), std::string("'") + key + "' set but phase_model has no gaussian");
    }
  }

  // Noise levels.
  std::vector<NoiseSpec> noises;
  if (in.has("snr_db") && in.has("noise_sigma")) {
    in.error(in.line_of("noise_sigma"), "'snr_db' and 'noise_sigma' are mutually exclusive");
  }
  if (in.has("noise_sigma")) {
    for (double sigma : in.numbers<double>("noise_sigma", {}, non_negative)) {
      noises.push_back(FixedSigma{sigma});
    }
  } else {
    for (double snr : in.numbers<double>("snr_db", {35.0}, any_double)) noises.push_back(SnrDb{snr});
  }

  SymbolPolicy symbols = SymbolPolicy::kPerTrial;
  if (const auto policy = in.string("symbol_policy")) {
    if (*policy == "fixed") {
      symbols = SymbolPolicy::kFixed;
    } else if (*policy != "per-trial") {
      in.error(in.line_of("symbol_policy"),
               "symbol_policy must be per-trial or fixed, got '" + *policy + "'");
    }
  }

  config.trials = static_cast<int>(in.scalar<long long>("trials", 100, at_least_one));
  config.workers = static_cast<int>(in.scalar<long long>("workers", 1, at_least_one));
  config.master_seed = in.scalar<unsigned long long>(
      "master_seed", 1, [](unsigned long long) -> const char* { return nullptr; });

  SolverSettings& settings = config.settings;
  settings.mm.tolerance = in.scalar<double>("tolerance", 1e-8, positive);
  settings.mm.max_iters = static_cast<int>(in.scalar<long long>("max_iters", 1000, at_least_one));
  settings.alt.outer_tolerance = in.scalar<double>("alt_outer_tolerance", 1e-8, positive);
  settings.alt.inner_tolerance = in.scalar<double>("alt_inner_tolerance", 1e-8, positive);
  settings.alt.outer_max_iters =
      static_cast<int>(in.scalar<long long>("alt_outer_max_iters", 50, at_least_one));
  settings.alt.inner_max_iters =
      static_cast<int>(in.scalar<long long>("alt_inner_max_iters", 1000, at_least_one));
  if (const auto noise = in.string("bic_noise")) {
    if (*noise == "plugin") {
      settings.bic_noise = NoiseVariance::kPlugin;
    } else if (*noise != "known") {
      in.error(in.line_of("bic_noise"), "bic_noise must be known or plugin, got '" + *noise + "'");
    }
  }
  for (long long n : in.numbers<long long>("optpct_candidates", {}, at_least_one)) {
    settings.optpct_candidates.push_back(static_cast<Index>(n));
  }
  for (Index n : settings.optpct_candidates) {
    for (long long n_c : n_cs) {
      if (n > n_c || n_c % n != 0) {
        in.error(in.line_of("optpct_candidates"), "optpct candidate N = " + std::to_string(n) +
                                                      " does not divide n_c = " +
                                                      std::to_string(n_c));
      }
    }
  }

  // Estimators.
  std::vector<std::string> names;
  if (const auto listed = in.strings("estimators")) {
    names = *listed;
    if (names.empty()) in.error(in.line_of("estimators"), "estimator list is empty");
  } else {
    in.error(0, "missing required key 'estimators'");
  }
  if (overrides.estimators) {
    std::vector<std::string> kept;
    for (const std::string& wanted : *overrides.estimators) {
      if (std::find(names.begin(), names.end(), wanted) == names.end()) {
        in.error(0, "--estimators: '" + wanted + "' is not listed in the config");
      } else {
        kept.push_back(wanted);
      }
    }
    if (overrides.estimators->empty()) in.error(0, "--estimators: estimator list is empty");
    names = kept;
  }
  std::set<std::string> seen;
  for (const std::string& name : names) {
    if (!seen.insert(name).second) {
      in.error(in.line_of("estimators"), "estimator '" + name + "' listed twice");
      continue;
    }
    try {
      const EstimatorSpec spec = EstimatorSpec::parse(name);
      if (spec.has_fixed_pct()) {
        for (long long n_c : n_cs) {
          if (spec.reduced_n > n_c || n_c % spec.reduced_n != 0) {
            in.error(in.line_of("estimators"),
                     "estimator '" + name + "': N = " + std::to_string(spec.reduced_n) +
                         " does not divide n_c = " + std::to_string(n_c));
          }
        }
      }
      config.estimators.push_back(spec);
    } catch (const std::invalid_argument& ex) {
      in.error(in.line_of("estimators"), ex.what());
    }
  }

  config.out_path = in.string("out").value_or("");

  if (overrides.seed) config.master_seed = *overrides.seed;
  if (overrides.workers) {
    if (*overrides.workers < 1) in.error(0, "--workers must be >= 1");
    config.workers = *overrides.workers;
  }
  if (overrides.out_path) config.out_path = *overrides.out_path;

  if (!errors.empty()) throw ConfigError(std::move(errors));

  for (long long n_c : n_cs) {
    for (const PhaseModel& phase : phases) {
      for (const NoiseSpec& noise : noises) {
        OfdmScenario cell;
        cell.n_c = static_cast<Index>(n_c);
        cell.channel = ChannelParams{static_cast<Index>(channel_length), channel_decay};
        cell.phase = phase;
        cell.noise = noise;
        cell.symbols = symbols;
        cell.trials = config.trials;
        cell.master_seed = config.master_seed;
        config.grid.push_back(cell);
      }
    }
  }
  return config;
}

}  // namespace pnest::cli
