#include "kpzc/kpz.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "kpzc/errors.hpp"
#include "kpzc/mixing.hpp"

namespace kpzc {

double phi(const WeightModel& model, double s) { return s - std::log2(moment(model, s)); }

double phi_inverse(const WeightModel& model, double zeta0) {
  if (!(zeta0 >= 0.0 && zeta0 <= 1.0)) throw std::domain_error("zeta0 must lie in [0,1]");
  if (!validate(model).phi_monotone) {
    throw ContractViolation("phi is not increasing on [0,1] for " + to_string(model));
  }
  if (zeta0 == 0.0) return 0.0;
  if (zeta0 == 1.0) return 1.0;
  // Bisect down to adjacent doubles so an exact preimage (e.g. W == 1) is found exactly.
  double lo = 0.0;
  double hi = 1.0;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double v = phi(model, mid);
    if (v == zeta0) return mid;
    if (v < zeta0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(phi(model, lo) - zeta0) <= std::abs(phi(model, hi) - zeta0) ? lo : hi;
}

std::vector<MassBoundRow> verify_mass_bound(const CascadeMeasure& template_cascade, int depth,
                                            std::span<const double> s_list, std::size_t trials,
                                            TailRule tail, const Execution& exec) {
  if (trials < 2) throw std::invalid_argument("mass bound check needs at least two trials");
  for (double s : s_list) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("mass bound exponents lie in [0,1]");
  }
  const int dim = template_cascade.dim();
  std::vector<unsigned> zeros(static_cast<std::size_t>(depth), 0U);
  const DyadicAddress cube = DyadicAddress::from_path(dim, zeros);

  std::vector<double> log2_masses(trials);
  parallel_for(trials, exec, [&](std::size_t t) {
    const CascadeMeasure c = template_cascade.with_seed(derive_seed(template_cascade.seed(), t));
    log2_masses[t] = mass(c, cube, depth, tail).log2_mass;
  });

  std::vector<MassBoundRow> rows;
  for (double s : s_list) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double lm : log2_masses) {
      const double v = std::exp2(s * lm);
      sum += v;
      sum_sq += v * v;
    }
    const double n = static_cast<double>(trials);
    MassBoundRow r;
    r.s = s;
    r.mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * r.mean * r.mean) / (n - 1.0));
    r.std_error = std::sqrt(var / n);
    r.bound = std::exp2(-static_cast<double>(depth * dim) * phi(template_cascade.model(), s));
    r.pass = r.mean <= r.bound * (1.0 + 3.0 * r.std_error / r.mean);
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::uint64_t> experiment_seeds(std::uint64_t master_seed, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = derive_seed(master_seed, i);
  return seeds;
}

KpzReport kpz_experiment(const WeightModel& model, const SetOracle& set, const KpzConfig& cfg) {
  if (model.dim() != set.dim()) throw std::invalid_argument("model and set dimensions differ");
  KpzReport rep;
  rep.model = model;
  rep.validity = validate(model);
  if (!rep.validity.all()) {
    throw std::invalid_argument("weight model " + to_string(model) + " fails validation");
  }
  rep.set_id = set.to_string();
  rep.tolerance = cfg.tolerance;

  if (const auto z = set.analytic_zeta0()) {
    rep.zeta0 = *z;
    rep.zeta0_analytic = true;
  } else {
    rep.lebesgue = estimate_dimension(MeasureOracle::lebesgue(set.dim()), set, cfg.estimator);
    rep.zeta0 = rep.lebesgue->zeta_hat;
    rep.zeta0_analytic = false;
  }
  rep.zeta_predicted = phi_inverse(model, rep.zeta0);

  rep.seeds = experiment_seeds(cfg.master_seed, cfg.seeds);
  const CascadeFamily family{model, cfg.weighting, cfg.tail};
  rep.measured = estimate_dimension(family, set, cfg.estimator, rep.seeds);
  rep.zeta_measured = rep.measured.zeta_hat;
  rep.std_error = rep.measured.std_error;
  rep.discrepancy = std::abs(rep.zeta_measured - rep.zeta_predicted);
  rep.pass = rep.discrepancy <= cfg.tolerance;
  return rep;
}

std::string summary_line(const KpzReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "zeta0=%.5f predicted=%.5f measured=%.5f\xC2\xB1%.5f %s(%g)",
                r.zeta0, r.zeta_predicted, r.zeta_measured, r.std_error,
                r.pass ? "PASS" : "FAIL", r.tolerance);
  return buf;
}

}  // namespace kpzc
