#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpzc/cascade.hpp"
#include "kpzc/dimension.hpp"
#include "kpzc/sets.hpp"
#include "kpzc/weights.hpp"

namespace kpzc {

/// Structure exponent s - log2 E[W^s].
double phi(const WeightModel& model, double s);

/// The zeta in [0,1] with phi(zeta) = zeta0, i.e. 2^{zeta0} = 2^zeta / E[W^zeta].
/// Bisection to adjacent doubles; the endpoints map exactly. Throws std::domain_error for
/// zeta0 outside [0,1] and ContractViolation if phi is not monotone.
double phi_inverse(const WeightModel& model, double zeta0);

struct MassBoundRow {
  double s = 0.0;
  double mean = 0.0;       // Monte Carlo mean of mu(a)^s over trials
  double std_error = 0.0;
  double bound = 0.0;      // (2^{-nd})^{phi(s)}
  bool pass = false;       // mean <= bound * (1 + 3 * std_error / mean)
};

/// Checks E[mu(a)^s] <= |a|^{phi(s)} for a fixed depth-n cube a (the first
/// cube in symbol order), one cascade per trial seed derived from
/// template_cascade.seed(). The template's model and weighting are reused.
std::vector<MassBoundRow> verify_mass_bound(const CascadeMeasure& template_cascade, int depth,
                                            std::span<const double> s_list, std::size_t trials,
                                            TailRule tail = TailRule::mean_one(),
                                            const Execution& exec = {});

struct KpzConfig {
  EstimatorConfig estimator;
  std::size_t seeds = 20;
  std::uint64_t master_seed = 1;
  TailRule tail;
  CubeWeighting weighting = CubeWeighting::product_per_axis;
  double tolerance = 0.05;
};

struct KpzReport {
  WeightModel model = WeightModel::unit(1);
  std::string set_id;
  double zeta0 = 0.0;
  bool zeta0_analytic = true;
  double zeta_predicted = 0.0;
  double zeta_measured = 0.0;
  double std_error = 0.0;
  double discrepancy = 0.0;
  double tolerance = 0.05;
  bool pass = false;
  ValidityReport validity;
  DimensionEstimate measured;
  std::optional<DimensionEstimate> lebesgue;  // present when zeta0 was measured
  std::vector<std::uint64_t> seeds;
};

/// Cascade seeds used by kpz_experiment and the CLI: derive_seed(master, i).
std::vector<std::uint64_t> experiment_seeds(std::uint64_t master_seed, std::size_t count);

/// Predicts zeta from zeta0 (analytic, or measured under Lebesgue when the set
/// has none), measures the quenched zeta under cascades, and compares.
/// Throws std::invalid_argument if the model fails validation.
KpzReport kpz_experiment(const WeightModel& model, const SetOracle& set, const KpzConfig& cfg);

/// "zeta0=... predicted=... measured=...±... PASS(tol)" or FAIL(tol).
std::string summary_line(const KpzReport& report);

}  // namespace kpzc
