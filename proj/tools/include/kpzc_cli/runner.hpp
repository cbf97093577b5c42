#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "kpzc_cli/config.hpp"

namespace kpzc::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitToleranceFailure = 2;

struct RunResult {
  int exit_code = kExitPass;
  std::string summary;
};

/// Runs one pipeline and writes report.json, provenance.json and the
/// command's CSV tables into cfg.out. Library errors propagate as exceptions.
RunResult run(const ExperimentConfig& cfg, std::ostream& log);

/// Re-runs the configuration recorded in a provenance.json. Refuses with
/// std::runtime_error when the tool or hash version differs.
RunResult replay(const std::filesystem::path& provenance, const std::string& out, unsigned threads,
                 std::ostream& log);

}  // namespace kpzc::cli
