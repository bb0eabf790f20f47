#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace streamdist::tools {

/// Everything that determines a run's output. Two runs with equal configs
/// write byte-identical files, whatever the thread count.
struct RunConfig {
  std::string command;
  /// Positional argument: predicate name or file, tester name, check name, or
  /// reduction kind.
  std::string subject;
  std::uint64_t seed = 1;
  std::size_t trials = 1000;
  unsigned threads = 1;
  std::string format = "csv";
  std::string output_path;
  std::optional<double> target;
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;
};

/// Thrown for bad flags or parameters (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::string, std::int64_t, double, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct CommandResult {
  Table table;
  /// False when any row failed an assertable check.
  bool pass = true;
  /// Optional per-vote detail for `reduce`.
  std::optional<Table> detail;
};

/// Version string baked in at configure time.
const char* version_string();

/// "subject=...;trials=...;key=value;..." in key order. Thread count is
/// deliberately absent so output does not depend on it.
std::string params_echo(const RunConfig& cfg);

/// "%.12g".
std::string format_double(double v);

/// Every row is prefixed with version, seed and a parameter echo.
void write_csv(std::ostream& out, const RunConfig& cfg, const Table& table);
void write_json(std::ostream& out, const RunConfig& cfg, const Table& table);

/// Dispatches on cfg.command. Throws UsageError, BudgetExceeded, or
/// propagates library errors.
CommandResult run_command(const RunConfig& cfg);

CommandResult cmd_predicate(const RunConfig& cfg);
CommandResult cmd_distinguish(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_reduce(const RunConfig& cfg);

}  // namespace streamdist::tools
