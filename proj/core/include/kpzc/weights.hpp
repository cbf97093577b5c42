#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace kpzc {

/// W = exp(sigma Z - sigma^2/2), Z standard Gaussian.
struct LogNormal {
  double sigma2 = 0.5;
  friend bool operator==(const LogNormal&, const LogNormal&) = default;
};

/// W = a with probability p, b otherwise; p a + (1-p) b = 1.
struct TwoPoint {
  double a = 1.0;
  double b = 1.0;
  double p = 0.5;
  friend bool operator==(const TwoPoint&, const TwoPoint&) = default;
};

/// Law of the positive, mean-one cascade weight W, tied to the spatial
/// dimension it is used with.
class WeightModel {
 public:
  using Kind = std::variant<LogNormal, TwoPoint>;

  /// Throws std::invalid_argument on sigma2 <= 0 or a bad dimension.
  static WeightModel lognormal(double sigma2, int dim);
  /// Throws std::invalid_argument unless a, b > 0, p in (0,1) and the mean is
  /// 1 to within 1e-12.
  static WeightModel two_point(double a, double b, double p, int dim);
  /// W == 1, the Lebesgue control.
  static WeightModel unit(int dim) { return two_point(1.0, 1.0, 0.5, dim); }

  const Kind& kind() const { return kind_; }
  int dim() const { return dim_; }

  friend bool operator==(const WeightModel&, const WeightModel&) = default;

 private:
  WeightModel(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_ = 1;
};

/// E[W^s]. Closed form for both families; any real s.
double moment(const WeightModel& model, double s);

/// E[W ln W].
double entropy_mean(const WeightModel& model);

struct ValidityDiagnostics {
  double mean = 0.0;
  double entropy_mean = 0.0;
  int dim = 1;
  /// Smallest increment of phi(s) = s - log2 E[W^s] on the check grid.
  double min_phi_increment = 0.0;
  /// Largest E[W^{-s}] over s in [0,1) on the check grid.
  double max_negative_moment = 0.0;
};

struct ValidityReport {
  bool mean_ok = false;
  bool nondegenerate = false;
  bool phi_monotone = false;
  bool neg_moments_ok = false;
  ValidityDiagnostics diagnostics;

  bool all() const { return mean_ok && nondegenerate && phi_monotone && neg_moments_ok; }
};

/// Points on which phi monotonicity and negative moments are checked.
inline constexpr int kValidityGridPoints = 1001;

ValidityReport validate(const WeightModel& model);

/// One W draw from a pair of open uniforms (Box-Muller for LogNormal,
/// threshold on the first uniform for TwoPoint). Throws std::domain_error
/// if either uniform is outside (0,1).
double sample(const WeightModel& model, double u1, double u2);

/// log2 of sample(model, u1, u2), computed without the exp/log round trip.
double log2_sample(const WeightModel& model, double u1, double u2);

/// Grammar: "lognormal(sigma2=<x>)" | "twopoint(a=<x>,b=<x>,p=<x>)".
WeightModel parse_weight_model(std::string_view text, int dim);
std::string to_string(const WeightModel& model);

}  // namespace kpzc
