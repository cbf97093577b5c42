#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kpzc/cascade.hpp"
#include "kpzc/measure.hpp"
#include "kpzc/parallel.hpp"
#include "kpzc/sets.hpp"

namespace kpzc {

struct DepthRange {
  int n_min = 4;
  int n_max = 12;

  int count() const { return n_max - n_min + 1; }
  friend bool operator==(const DepthRange&, const DepthRange&) = default;
};

/// 4..16 for d = 1, 4..12 for d = 2, 4..8 for d >= 3 (fits the node budget).
DepthRange default_depth_range(int dim);

/// 0, 0.05, ..., 1.
std::vector<double> default_s_grid();

inline constexpr std::uint64_t kDefaultNodeBudget = std::uint64_t{1} << 26;

struct EnumerationOptions {
  std::uint64_t node_budget = kDefaultNodeBudget;
  Execution exec;
};

/// log2 Z_n(s) for a block of depths and exponents, where
/// Z_n(s) = sum over non-disjoint depth-n cubes a of mu(a)^s.
class PartitionSumTable {
 public:
  PartitionSumTable(DepthRange depths, std::vector<double> s_values, int dim);

  DepthRange depths() const { return depths_; }
  const std::vector<double>& s_values() const { return s_values_; }
  int dim() const { return dim_; }

  double log2_z(int n, std::size_t s_index) const;
  /// Looks s up exactly in s_values(); throws std::out_of_range if absent.
  double log2_z(int n, double s) const;
  void set_log2_z(int n, std::size_t s_index, double value);

  /// Number of non-disjoint cubes at depth n (Z_n(0)).
  std::uint64_t cover_count(int n) const;
  void set_cover_count(int n, std::uint64_t count);

  std::string set_id;
  std::string measure_id;
  std::uint64_t seed = 0;

 private:
  DepthRange depths_;
  std::vector<double> s_values_;
  int dim_;
  std::vector<double> log2_z_;  // row-major [n - n_min][s_index]
  std::vector<std::uint64_t> counts_;
};

/// Non-disjoint cubes up to depth n_max (inclusive of the root). Throws
/// ResourceError once the count exceeds the budget.
std::uint64_t count_cover_nodes(const SetOracle& set, int n_max, std::uint64_t budget);

/// Exact pruned enumeration of every non-disjoint cube down to depths.n_max.
PartitionSumTable partition_table(const MeasureOracle& m, const SetOracle& set, DepthRange depths,
                                  std::span<const double> s_values,
                                  const EnumerationOptions& opts = {});

/// log2 Z_n(s) for a single depth and exponent.
double partition_sum(const MeasureOracle& m, const SetOracle& set, int n, double s,
                     const EnumerationOptions& opts = {});

/// Least-squares slope of log2 Z_n(s) against n over `range`, divided by d.
/// Throws std::invalid_argument for fewer than three depths.
double scaling_slope(const PartitionSumTable& t, double s, DepthRange range);
double scaling_slope(const PartitionSumTable& t, double s);

struct EstimatorConfig {
  DepthRange n_range;
  std::vector<double> s_grid = default_s_grid();
  /// Refinement stops once the bracket is narrower than this.
  double tolerance = 1e-4;
  /// Each refinement pass splits the bracket into this many equal parts and
  /// evaluates the interior points in one enumeration (2 = plain bisection).
  int subdivisions = 32;
  EnumerationOptions enumeration;
};

struct SlopeSample {
  double s = 0.0;
  double lambda = 0.0;
};

struct DimensionEstimate {
  double zeta_hat = 0.0;
  double std_error = 0.0;
  /// Sample standard deviation of the per-seed estimates (0 for one seed).
  double spread = 0.0;
  DepthRange n_range;
  std::size_t seeds_used = 0;
  std::vector<SlopeSample> slope_fn;  // seed-averaged lambda on the grid
  std::vector<double> per_seed;
  std::vector<PartitionSumTable> tables;  // grid tables, one per seed
};

/// Zero crossing of s -> scaling_slope for one fixed measure. The grid
/// brackets the root; repeated multisection (one fresh enumeration per pass)
/// narrows it to `tolerance` and linear interpolation finishes. A non-positive slope at
/// s = 0 gives 0 and a non-negative slope at s = 1 gives 1, the natural bounds
/// of the dimension. Throws EstimationError when the grid has no sign change.
DimensionEstimate estimate_dimension(const MeasureOracle& m, const SetOracle& set,
                                     const EstimatorConfig& cfg);

struct CascadeFamily {
  WeightModel model;
  CubeWeighting weighting = CubeWeighting::product_per_axis;
  TailRule tail;
};

/// Quenched estimate: one zero crossing per cascade seed, aggregated as
/// mean and standard error. Seeds run in parallel under cfg's thread budget.
DimensionEstimate estimate_dimension(const CascadeFamily& family, const SetOracle& set,
                                     const EstimatorConfig& cfg,
                                     std::span<const std::uint64_t> seeds);

}  // namespace kpzc
