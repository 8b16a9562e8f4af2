#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnest/harness.hpp"
#include "pnest_cli/config.hpp"

namespace pnest::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitTrialError = 1,
  kExitConfigError = 2,
};

/// "%.12g", or an empty string for NaN.
std::string format_number(double value);

/// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in quotes with embedded quotes doubled.
std::string csv_field(const std::string& value);

/// Splits one CSV record produced by write_csv_row back into fields.
std::vector<std::string> parse_csv_record(const std::string& line);

/// Column names of the aggregate CSV, in order.
const std::vector<std::string>& aggregate_columns();
/// Columns that depend on wall-clock time.
bool is_timing_column(const std::string& name);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);
void write_aggregate_csv(std::ostream& out, const MonteCarloResult& result);
std::vector<std::string> aggregate_fields(const AggregateRow& row);

/// Each command writes to `out` and reports trial errors on `err`.
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_trace(const RunConfig& config, std::uint64_t trial_index, std::ostream& out,
              std::ostream& err);
int cmd_single(const RunConfig& config, std::uint64_t trial_index, std::ostream& out,
               std::ostream& err);

}  // namespace pnest::cli
