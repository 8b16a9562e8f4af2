#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pnest/harness.hpp"

namespace pnest::cli {

/// A validated experiment description. The scenario grid is the cartesian
/// product n_c x phase cells x noise levels, in that nesting order.
struct RunConfig {
  std::vector<OfdmScenario> grid;
  std::vector<EstimatorSpec> estimators;
  SolverSettings settings;
  std::uint64_t master_seed = 1;
  int trials = 100;
  int workers = 1;
  std::string out_path;  // empty means stdout
};

/// Thrown by parse_config with every problem found in the text.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Overrides applied on top of the file before validation.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_path;
  /// Restricts the run to these estimators (each must be listed in the file).
  std::optional<std::vector<std::string>> estimators;
};

RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Splits "a, b ,c" into trimmed, non-empty items.
std::vector<std::string> split_list(std::string_view text);

}  // namespace pnest::cli
