#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "kpzc/dyadic.hpp"
#include "kpzc/measure.hpp"
#include "kpzc/parallel.hpp"
#include "kpzc/sets.hpp"

namespace kpzc {

/// Point lists up to this size use all N(N-1) ordered pairs.
inline constexpr std::size_t kExactPairLimit = 5000;

/// N points from the natural self-similar measure of `set`: each point
/// descends `depth` levels choosing uniformly among non-disjoint children and
/// is placed at the center of the cube it reaches. Supported for FullCube,
/// DyadicCantor and Singleton; other kinds throw std::invalid_argument.
std::vector<Point> sample_natural_measure(const SetOracle& set, int depth, std::size_t count,
                                          std::uint64_t rng_seed);

enum class EnergyGrowth { bounded, diverging };

std::string_view to_string(EnergyGrowth g);

struct ProfileEntry {
  int depth = 0;
  double energy = 0.0;     // mean over seeds
  double std_error = 0.0;  // across seeds
  double ratio = 0.0;      // energy / previous entry's energy (0 for the first)
  std::vector<double> per_seed;  // aligned with ProfileConfig::seeds
};

struct EnergyEstimate {
  double s = 0.0;
  double value = 0.0;
  std::uint64_t pair_count = 0;
  int max_depth = 0;
  std::vector<ProfileEntry> profile;
  /// Geometric mean of the last (up to three) profile ratios.
  double eventual_ratio = 0.0;
  EnergyGrowth growth = EnergyGrowth::bounded;
};

struct EnergyOptions {
  Execution exec;
  /// Seed for the pair subsample used when N exceeds kExactPairLimit.
  std::uint64_t pair_seed = 0;
};

/// (1/N^2) sum_{i != j} mu(B(x_i, x_j))^{-s}, with B the dyadic ball capped
/// at max_depth. Requires at least two points and s >= 0.
EnergyEstimate s_energy(const MeasureOracle& m, std::span<const Point> points, double s,
                        int max_depth, const EnergyOptions& opts = {});

struct ProfileConfig {
  std::vector<int> depths;
  std::size_t points = 2000;
  std::vector<std::uint64_t> seeds;
  /// Growth is "bounded" when the eventual ratio is below 1 + epsilon.
  double epsilon = 0.05;
  Execution exec;
};

/// For each sampling depth m: fresh natural-measure samples at depth m and
/// their s-energy with cap m, averaged over seeds.
EnergyEstimate energy_growth_profile(const MeasureOracle& m, const SetOracle& set, double s,
                                     const ProfileConfig& cfg);

}  // namespace kpzc
