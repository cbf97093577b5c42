#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpzc/dyadic.hpp"
#include "kpzc/mixing.hpp"
#include "kpzc/parallel.hpp"
#include "kpzc/weights.hpp"

namespace kpzc {

/// How a dyadic cube's weight is built from the law of W.
///
/// product_per_axis: the cube weight has the law of a product of d
/// independent copies of W, one per coordinate halving, so a depth-n cube
/// carries n*d factors and E[mu(cube)^s] = 2^{-nds} E[W^s]^{nd}. This is the
/// layout under which the structure exponent phi(s) = s - log2 E[W^s] governs
/// scaling in every d. For LogNormal the product is drawn directly as one
/// LogNormal(d sigma^2) variate; TwoPoint takes d separate draws.
///
/// single_draw: one draw of W per cube, n factors at depth n. Identical to
/// product_per_axis when d = 1.
enum class CubeWeighting { product_per_axis, single_draw };

std::string_view to_string(CubeWeighting w);
CubeWeighting parse_cube_weighting(std::string_view text);

/// How the cascade below the truncation depth is replaced.
/// extra_levels == 0 is the mean-one rule (the tail total mass is set to its
/// expectation 1); extra_levels = q descends q more levels instead.
struct TailRule {
  int extra_levels = 0;

  static TailRule mean_one() { return {}; }
  static TailRule extended(int q) { return TailRule{q}; }

  friend bool operator==(const TailRule&, const TailRule&) = default;
};

std::string to_string(const TailRule& rule);
/// "mean_one" | "extended(q)".
TailRule parse_tail_rule(std::string_view text);

/// A multiplicative cascade realization. Immutable; every weight is a pure
/// function of (seed, address), so the tree is never stored.
class CascadeMeasure {
 public:
  CascadeMeasure(std::uint64_t seed, WeightModel model,
                 CubeWeighting weighting = CubeWeighting::product_per_axis);

  /// Precomputed per-node sampling constants.
  struct Sampler {
    bool lognormal = true;
    int draws = 1;            // independent draws multiplied per cube
    double sigma = 0.0;       // of the (possibly convolved) LogNormal draw
    double log2_bias = 0.0;   // -sigma^2/2 in base 2
    double log2_a = 0.0;
    double log2_b = 0.0;
    double p = 0.5;
  };

  std::uint64_t seed() const { return seed_; }
  int dim() const { return model_.dim(); }
  const WeightModel& model() const { return model_; }
  CubeWeighting weighting() const { return weighting_; }
  std::string_view hash_version() const { return kHashVersion; }
  const Sampler& sampler() const { return sampler_; }
  /// Hash state shared by every address of this realization.
  std::uint64_t seed_state() const { return seed_state_; }

  /// Same model and weighting, different seed.
  CascadeMeasure with_seed(std::uint64_t seed) const {
    return CascadeMeasure(seed, model_, weighting_);
  }

 private:
  std::uint64_t seed_;
  WeightModel model_;
  CubeWeighting weighting_;
  Sampler sampler_;
  std::uint64_t seed_state_;
};

/// Weight multiplying the density on cube a relative to its parent: the
/// uniforms hashed from (seed, address) pushed through the model's sampler.
/// Throws ContractViolation at depth 0: the root carries no weight.
double node_weight(const CascadeMeasure& c, const DyadicAddress& a);
double log2_node_weight(const CascadeMeasure& c, const DyadicAddress& a);

struct MassEstimate {
  double log2_mass = 0.0;
  int trunc_depth = 0;
  DyadicAddress address;
  TailRule tail;

  double value() const;
};

/// mu_n(a): 2^{-nd} times the sum over depth-n descendants of the weight
/// products along their ancestor chains (levels 1..n). With an
/// extended(q) tail the sum runs to depth n + q. Throws ContractViolation if
/// n < a.depth().
MassEstimate mass(const CascadeMeasure& c, const DyadicAddress& a, int n,
                  TailRule tail = TailRule::mean_one());

/// log2 of the normalized subtree sum 2^{-ld} sum_desc prod W over the l
/// levels below a (0 when l == 0). This is the truncated total mass of the
/// cascade rooted at a.
double log2_subtree_factor(const CascadeMeasure& c, const DyadicAddress& a, int levels);

/// mu_n([0,1)^d).
double total_mass(const CascadeMeasure& c, int n, TailRule tail = TailRule::mean_one());

/// mu_n of {x : x_axis in [1/2 - 2^-k, 1/2 + 2^-k)}, axis in [1, d], 1 <= k <= n.
double slab_mass(const CascadeMeasure& c, int axis, int k, int n,
                 TailRule tail = TailRule::mean_one());

/// slab_mass for several k with one tree traversal; entries align with ks.
std::vector<double> slab_masses(const CascadeMeasure& c, int axis, std::span<const int> ks,
                                int n, TailRule tail = TailRule::mean_one());

}  // namespace kpzc
