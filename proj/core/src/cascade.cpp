#include "kpzc/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kpzc/errors.hpp"
#include "kpzc/grammar.hpp"

namespace kpzc {

namespace {

std::uint64_t address_state(std::uint64_t seed_state, const DyadicAddress& a) {
  std::uint64_t h = absorb(seed_state, (static_cast<std::uint64_t>(a.dim()) << 8) | static_cast<std::uint64_t>(a.depth()));
  for (int i = 0; i < a.dim(); ++i) h = absorb(h, a.index(i));
  return h;
}

// Same transform as log2_sample() with the constants hoisted; the uniforms
// are open by construction.
double log2_draw(const CascadeMeasure::Sampler& smp, std::uint64_t state, int stream) {
  const UniformPair u = uniform_pair(absorb(state, static_cast<std::uint64_t>(stream)));
  if (smp.lognormal) {
    const double z = std::sqrt(-2.0 * std::log(u.first)) * std::cos(2.0 * std::numbers::pi * u.second);
    return smp.sigma * std::numbers::log2e * z + smp.log2_bias;
  }
  return u.first < smp.p ? smp.log2_a : smp.log2_b;
}

CascadeMeasure::Sampler make_sampler(const WeightModel& model, CubeWeighting weighting) {
  CascadeMeasure::Sampler smp;
  const int copies = weighting == CubeWeighting::product_per_axis ? model.dim() : 1;
  if (const auto* ln = std::get_if<LogNormal>(&model.kind())) {
    const double var = ln->sigma2 * copies;
    smp.lognormal = true;
    smp.draws = 1;
    smp.sigma = std::sqrt(var);
    smp.log2_bias = -0.5 * var * std::numbers::log2e;
  } else {
    const auto& tp = std::get<TwoPoint>(model.kind());
    smp.lognormal = false;
    smp.draws = copies;
    smp.log2_a = std::log2(tp.a);
    smp.log2_b = std::log2(tp.b);
    smp.p = tp.p;
  }
  return smp;
}

// Normalized subtree sum in the linear domain: M(a, 0) = 1,
// M(a, l) = 2^-d sum_children W(child) M(child, l - 1).
double subtree_factor(const CascadeMeasure& c, const DyadicAddress& a, int levels) {
  if (levels == 0) return 1.0;
  const unsigned n = 1U << c.dim();
  const double scale = std::ldexp(1.0, -c.dim());
  double sum = 0.0;
  for (unsigned s = 0; s < n; ++s) {
    const DyadicAddress child = a.child(s);
    sum += std::exp2(log2_node_weight(c, child)) * subtree_factor(c, child, levels - 1);
  }
  return scale * sum;
}

double log2_path_weight(const CascadeMeasure& c, const DyadicAddress& a) {
  double acc = 0.0;
  for (int m = 1; m <= a.depth(); ++m) acc += log2_node_weight(c, a.ancestor(m));
  return acc;
}

}  // namespace

std::string_view to_string(CubeWeighting w) {
  return w == CubeWeighting::product_per_axis ? "product_per_axis" : "single_draw";
}

CubeWeighting parse_cube_weighting(std::string_view text) {
  if (text == "product_per_axis") return CubeWeighting::product_per_axis;
  if (text == "single_draw") return CubeWeighting::single_draw;
  throw std::invalid_argument("unknown cube weighting '" + std::string(text) +
                              "' (expected product_per_axis or single_draw)");
}

std::string to_string(const TailRule& rule) {
  if (rule.extra_levels == 0) return "mean_one";
  return "extended(" + std::to_string(rule.extra_levels) + ")";
}

TailRule parse_tail_rule(std::string_view text) {
  const CallExpr call = parse_call(text);
  if (call.name == "mean_one" && call.expr.kind == Expr::Kind::ident) return TailRule::mean_one();
  if (call.name == "extended" && call.expr.kind == Expr::Kind::call && call.expr.args.size() == 1) {
    const double q = call.expr.args.front().value.front().as_number();
    if (q < 0 || q != std::floor(q) || q > 16) {
      throw std::invalid_argument("extended(q) needs an integer q in [0, 16]");
    }
    return TailRule::extended(static_cast<int>(q));
  }
  throw std::invalid_argument("tail rule must be mean_one or extended(q): '" + std::string(text) +
                              "'");
}

CascadeMeasure::CascadeMeasure(std::uint64_t seed, WeightModel model, CubeWeighting weighting)
    : seed_(seed),
      model_(std::move(model)),
      weighting_(weighting),
      sampler_(make_sampler(model_, weighting_)),
      seed_state_(absorb(seed, 0x6b707a632d636173ULL)) {}

double log2_node_weight(const CascadeMeasure& c, const DyadicAddress& a) {
  if (a.depth() == 0) throw ContractViolation("the root cube carries no weight");
  if (a.dim() != c.dim()) throw std::invalid_argument("address dimension differs from cascade");
  const std::uint64_t state = address_state(c.seed_state(), a);
  const auto& smp = c.sampler();
  if (smp.draws == 1) return log2_draw(smp, state, 0);
  double acc = 0.0;
  for (int i = 0; i < smp.draws; ++i) acc += log2_draw(smp, state, i);
  return acc;
}

double node_weight(const CascadeMeasure& c, const DyadicAddress& a) {
  return std::exp2(log2_node_weight(c, a));
}

double MassEstimate::value() const { return std::exp2(log2_mass); }

double log2_subtree_factor(const CascadeMeasure& c, const DyadicAddress& a, int levels) {
  if (levels < 0) throw ContractViolation("negative subtree depth");
  if (a.depth() + levels > kMaxDepth) throw std::domain_error("subtree exceeds maximum depth");
  return std::log2(subtree_factor(c, a, levels));
}

MassEstimate mass(const CascadeMeasure& c, const DyadicAddress& a, int n, TailRule tail) {
  if (n < a.depth()) {
    throw ContractViolation("truncation depth " + std::to_string(n) + " below address depth " +
                            std::to_string(a.depth()));
  }
  if (a.dim() != c.dim()) throw std::invalid_argument("address dimension differs from cascade");
  const int levels = n - a.depth() + tail.extra_levels;
  MassEstimate out;
  out.address = a;
  out.trunc_depth = n;
  out.tail = tail;
  out.log2_mass = -static_cast<double>(a.depth() * a.dim()) + log2_path_weight(c, a) +
                  log2_subtree_factor(c, a, levels);
  return out;
}

double total_mass(const CascadeMeasure& c, int n, TailRule tail) {
  if (n < 0) throw ContractViolation("negative truncation depth");
  return mass(c, DyadicAddress::root(c.dim()), n, tail).value();
}

double slab_mass(const CascadeMeasure& c, int axis, int k, int n, TailRule tail) {
  const int ks[] = {k};
  return slab_masses(c, axis, ks, n, tail).front();
}

std::vector<double> slab_masses(const CascadeMeasure& c, int axis, std::span<const int> ks,
                                int n, TailRule tail) {
  if (axis < 1 || axis > c.dim()) throw std::out_of_range("slab axis must lie in [1, d]");
  int k_max = 0;
  for (int k : ks) {
    if (k < 1) throw std::out_of_range("slab level k must be at least 1");
    if (k > n) throw ContractViolation("slab level k exceeds truncation depth n");
    k_max = std::max(k_max, k);
  }
  const int coord = axis - 1;
  std::vector<double> out(ks.size(), 0.0);

  // Depth-k_max cubes meeting the widest relevant slab are enumerated once;
  // each contributes to every slab whose depth-k ancestor column touches 1/2.
  // At depth k the slab is exactly the two columns j = 2^{k-1} - 1 and 2^{k-1}.
  auto in_slab = [](std::uint64_t j, int depth, int k) {
    const std::uint64_t jk = j >> (depth - k);
    const std::uint64_t half = std::uint64_t{1} << (k - 1);
    return jk == half - 1 || jk == half;
  };

  struct Frame {
    DyadicAddress a;
    double log2_path;
  };
  std::vector<Frame> stack{{DyadicAddress::root(c.dim()), 0.0}};
  const unsigned arity = 1U << c.dim();
  int k_min = k_max;
  for (int k : ks) k_min = std::min(k_min, k);
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.a.depth() == k_max) {
      const MassEstimate m = [&] {
        MassEstimate e;
        e.log2_mass = -static_cast<double>(f.a.depth() * f.a.dim()) + f.log2_path +
                      log2_subtree_factor(c, f.a, n - k_max + tail.extra_levels);
        return e;
      }();
      const double v = m.value();
      for (std::size_t i = 0; i < ks.size(); ++i) {
        if (in_slab(f.a.index(coord), f.a.depth(), ks[i])) out[i] += v;
      }
      continue;
    }
    for (unsigned s = arity; s-- > 0;) {
      DyadicAddress child = f.a.child(s);
      if (child.depth() >= k_min && !in_slab(child.index(coord), child.depth(), k_min)) continue;
      const double w = log2_node_weight(c, child);
      stack.push_back({child, f.log2_path + w});
    }
  }
  return out;
}

}  // namespace kpzc
