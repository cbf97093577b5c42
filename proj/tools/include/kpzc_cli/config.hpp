#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kpzc/cascade.hpp"

namespace kpzc::cli {

enum class Command { validate, mass_stats, dimension, energy, kpz, bound_check };

std::string_view to_string(Command c);
Command parse_command(std::string_view text);

enum class MeasureKind { lebesgue, cascade };

std::string_view to_string(MeasureKind m);
MeasureKind parse_measure_kind(std::string_view text);

/// Everything a run depends on. Optional fields fall back to per-command
/// defaults at run time, so an emitted config reproduces the run exactly.
struct ExperimentConfig {
  Command command = Command::kpz;
  int d = 2;
  std::string weight = "lognormal(sigma2=0.5)";
  std::string set = "fullcube";
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::optional<std::vector<double>> s_grid;
  std::size_t seeds = 20;
  std::uint64_t master_seed = 1;
  TailRule tail;
  CubeWeighting layout = CubeWeighting::product_per_axis;
  double tolerance = 0.05;
  int depth = 12;
  std::size_t points = 2000;
  std::optional<MeasureKind> measure;
  std::optional<std::vector<double>> exponents;
  double epsilon = 0.05;
  unsigned threads = 1;
  std::string out = "kpzc-out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Key-value parse failure carrying the offending line (0 for flags) and field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string field_;
  std::string message_;
};

/// Field names in emission order.
const std::vector<std::string>& config_keys();

/// Assigns one field from its text form. Throws ConfigError (line 0).
void set_field(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Text form of one field; empty when an optional field is unset.
std::string field_text(const ExperimentConfig& cfg, std::string_view key);

/// Source line of each key read from a config file.
using KeyLines = std::map<std::string, int, std::less<>>;

/// "key = value" lines, '#' comments, blank lines ignored. Later keys win.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {},
                              KeyLines* lines = nullptr);

/// Every set field as "key = value" lines. With include_runtime false the
/// threads and out fields are left out (they never affect results).
std::string emit_config(const ExperimentConfig& cfg, bool include_runtime = true);

/// Cross-field checks and canonicalization of the weight and set specs.
/// Throws ConfigError naming the field, and its file line when known.
void validate_config(ExperimentConfig& cfg, const KeyLines* lines = nullptr);

/// Thread budget from KPZC_THREADS, or 1 when unset or invalid.
unsigned default_threads();

}  // namespace kpzc::cli
