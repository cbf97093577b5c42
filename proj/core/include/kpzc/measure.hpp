#pragma once

#include <string>
#include <variant>

#include "kpzc/cascade.hpp"
#include "kpzc/dyadic.hpp"

namespace kpzc {

struct LebesgueMeasure {
  int dim = 1;
};

struct CascadeOracle {
  CascadeMeasure cascade;
  TailRule tail;
};

/// A queryable log-mass source over dyadic cubes: Lebesgue measure or one
/// cascade realization with a fixed truncation rule. A cube at depth m is
/// evaluated at truncation depth m (plus the tail rule's extra levels).
class MeasureOracle {
 public:
  static MeasureOracle lebesgue(int dim);
  static MeasureOracle cascade(CascadeMeasure c, TailRule tail = TailRule::mean_one());

  int dim() const;
  bool is_lebesgue() const { return std::holds_alternative<LebesgueMeasure>(kind_); }
  const std::variant<LebesgueMeasure, CascadeOracle>& kind() const { return kind_; }

  double log2_mass(const DyadicAddress& a) const;

  /// "lebesgue" or "cascade(seed=...)"; used as the measure column in reports.
  std::string id() const;

 private:
  explicit MeasureOracle(std::variant<LebesgueMeasure, CascadeOracle> kind)
      : kind_(std::move(kind)) {}

  std::variant<LebesgueMeasure, CascadeOracle> kind_;
};

}  // namespace kpzc
