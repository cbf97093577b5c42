#include "kpzc/weights.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kpzc/dyadic.hpp"
#include "kpzc/grammar.hpp"

namespace kpzc {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("weight model dimension must be in [1, " +
                                std::to_string(kMaxDim) + "]");
  }
}

void check_open_unit(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("uniform must lie in the open interval (0,1)");
  }
}

}  // namespace

WeightModel WeightModel::lognormal(double sigma2, int dim) {
  check_dim(dim);
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("lognormal sigma2 must be positive and finite");
  }
  return WeightModel(LogNormal{sigma2}, dim);
}

WeightModel WeightModel::two_point(double a, double b, double p, int dim) {
  check_dim(dim);
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("twopoint values must be positive and finite");
  }
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("twopoint p must lie in (0,1)");
  if (std::abs(p * a + (1.0 - p) * b - 1.0) > 1e-12) {
    throw std::invalid_argument("twopoint mean p*a + (1-p)*b must equal 1");
  }
  return WeightModel(TwoPoint{a, b, p}, dim);
}

double moment(const WeightModel& model, double s) {
  if (const auto* ln = std::get_if<LogNormal>(&model.kind())) {
    return std::exp(0.5 * ln->sigma2 * s * (s - 1.0));
  }
  const auto& tp = std::get<TwoPoint>(model.kind());
  return tp.p * std::pow(tp.a, s) + (1.0 - tp.p) * std::pow(tp.b, s);
}

double entropy_mean(const WeightModel& model) {
  if (const auto* ln = std::get_if<LogNormal>(&model.kind())) return 0.5 * ln->sigma2;
  const auto& tp = std::get<TwoPoint>(model.kind());
  return tp.p * tp.a * std::log(tp.a) + (1.0 - tp.p) * tp.b * std::log(tp.b);
}

ValidityReport validate(const WeightModel& model) {
  ValidityReport r;
  auto& diag = r.diagnostics;
  diag.dim = model.dim();
  diag.mean = moment(model, 1.0);
  diag.entropy_mean = entropy_mean(model);
  r.mean_ok = std::abs(diag.mean - 1.0) <= 1e-12;
  r.nondegenerate = diag.entropy_mean < static_cast<double>(model.dim());

  constexpr int n = kValidityGridPoints;
  diag.min_phi_increment = std::numeric_limits<double>::infinity();
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    const double phi = s - std::log2(moment(model, s));
    if (i > 0) diag.min_phi_increment = std::min(diag.min_phi_increment, phi - prev);
    prev = phi;
  }
  r.phi_monotone = diag.min_phi_increment > 0.0;

  diag.max_negative_moment = 0.0;
  bool finite = true;
  for (int i = 0; i < n - 1; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    const double m = moment(model, -s);
    finite = finite && std::isfinite(m);
    diag.max_negative_moment = std::max(diag.max_negative_moment, m);
  }
  r.neg_moments_ok = finite;
  return r;
}

double sample(const WeightModel& model, double u1, double u2) {
  return std::exp2(log2_sample(model, u1, u2));
}

double log2_sample(const WeightModel& model, double u1, double u2) {
  check_open_unit(u1);
  check_open_unit(u2);
  if (const auto* ln = std::get_if<LogNormal>(&model.kind())) {
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    const double sigma = std::sqrt(ln->sigma2);
    return (sigma * z - 0.5 * ln->sigma2) * std::numbers::log2e;
  }
  const auto& tp = std::get<TwoPoint>(model.kind());
  return std::log2(u1 < tp.p ? tp.a : tp.b);
}

WeightModel parse_weight_model(std::string_view text, int dim) {
  const CallExpr call = parse_call(text);
  if (call.name == "lognormal") {
    return WeightModel::lognormal(call.number("sigma2"), dim);
  }
  if (call.name == "twopoint") {
    return WeightModel::two_point(call.number("a"), call.number("b"), call.number("p"), dim);
  }
  throw std::invalid_argument("unknown weight family '" + call.name +
                              "' (expected lognormal or twopoint)");
}

std::string to_string(const WeightModel& model) {
  if (const auto* ln = std::get_if<LogNormal>(&model.kind())) {
    return "lognormal(sigma2=" + format_number(ln->sigma2) + ")";
  }
  const auto& tp = std::get<TwoPoint>(model.kind());
  return "twopoint(a=" + format_number(tp.a) + ",b=" + format_number(tp.b) +
         ",p=" + format_number(tp.p) + ")";
}

}  // namespace kpzc
