#include "kpzc/energy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "kpzc/mixing.hpp"

namespace kpzc {

namespace {

// Per-point log2 masses of the ancestor cubes at depths 0..max_depth.
std::vector<double> prefix_log2_masses(const MeasureOracle& m, const DyadicAddress& leaf) {
  const int depth = leaf.depth();
  std::vector<double> out(static_cast<std::size_t>(depth) + 1);
  if (m.is_lebesgue()) {
    for (int j = 0; j <= depth; ++j) out[j] = -static_cast<double>(j * leaf.dim());
    return out;
  }
  const auto& oracle = std::get<CascadeOracle>(m.kind());
  if (oracle.tail.extra_levels > 0) {
    for (int j = 0; j <= depth; ++j) out[j] = m.log2_mass(leaf.ancestor(j));
    return out;
  }
  double path = 0.0;
  out[0] = 0.0;
  for (int j = 1; j <= depth; ++j) {
    path += log2_node_weight(oracle.cascade, leaf.ancestor(j));
    out[j] = -static_cast<double>(j * leaf.dim()) + path;
  }
  return out;
}

double sample_mean(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::string_view to_string(EnergyGrowth g) {
  return g == EnergyGrowth::bounded ? "bounded" : "diverging";
}

std::vector<Point> sample_natural_measure(const SetOracle& set, int depth, std::size_t count,
                                          std::uint64_t rng_seed) {
  const auto& kind = set.kind();
  if (!std::holds_alternative<FullCube>(kind) && !std::holds_alternative<DyadicCantor>(kind) &&
      !std::holds_alternative<Singleton>(kind)) {
    throw std::invalid_argument("natural measure sampling supports fullcube, cantor and singleton");
  }
  if (depth < 1 || depth > 52) throw std::invalid_argument("sampling depth must lie in [1, 52]");

  const unsigned arity = 1U << set.dim();
  std::vector<Point> out;
  out.reserve(count);
  std::vector<std::pair<DyadicAddress, CubeRelation>> options;
  for (std::size_t i = 0; i < count; ++i) {
    const CounterStream rng(derive_seed(rng_seed, i));
    DyadicAddress a = DyadicAddress::root(set.dim());
    CubeRelation rel = set.classify(a);
    for (int level = 1; level <= depth; ++level) {
      options.clear();
      for (unsigned s = 0; s < arity; ++s) {
        DyadicAddress c = a.child(s);
        const CubeRelation r = set.refine(c, rel);
        if (r != CubeRelation::disjoint) options.emplace_back(c, r);
      }
      const auto pick = std::min<std::size_t>(
          options.size() - 1,
          static_cast<std::size_t>(rng.uniform(static_cast<std::uint64_t>(level)) *
                                   static_cast<double>(options.size())));
      a = options[pick].first;
      rel = options[pick].second;
    }
    out.push_back(a.center());
  }
  return out;
}

EnergyEstimate s_energy(const MeasureOracle& m, std::span<const Point> points, double s,
                        int max_depth, const EnergyOptions& opts) {
  if (points.size() < 2) throw std::invalid_argument("s-energy needs at least two points");
  if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("s-energy needs s >= 0");
  if (max_depth < 0 || max_depth > kMaxDepth) throw std::invalid_argument("bad max_depth");

  const std::size_t n = points.size();
  const int dim = m.dim();
  // terms[i * (max_depth + 1) + j] = mu(ancestor_j(x_i))^{-s}
  const std::size_t stride = static_cast<std::size_t>(max_depth) + 1;
  std::vector<std::uint64_t> idx(n * static_cast<std::size_t>(dim));
  std::vector<double> terms(n * stride);
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i].dim() != dim) throw std::invalid_argument("point dimension differs from measure");
    const DyadicAddress leaf = address_of(points[i], max_depth);
    for (int c = 0; c < dim; ++c) idx[i * dim + c] = leaf.index(c);
    const auto logs = prefix_log2_masses(m, leaf);
    for (std::size_t j = 0; j < stride; ++j) terms[i * stride + j] = std::exp2(-s * logs[j]);
  }

  auto pair_depth = [&](std::size_t i, std::size_t k) {
    int depth = max_depth;
    for (int c = 0; c < dim; ++c) {
      const std::uint64_t x = idx[i * dim + c] ^ idx[k * dim + c];
      depth = std::min(depth, max_depth - static_cast<int>(std::bit_width(x)));
    }
    return depth;
  };

  EnergyEstimate est;
  est.s = s;
  est.max_depth = max_depth;
  const double nn = static_cast<double>(n) * static_cast<double>(n);

  if (n <= kExactPairLimit) {
    std::vector<double> rows(n, 0.0);
    parallel_for(n, opts.exec, [&](std::size_t i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != i) acc += terms[i * stride + static_cast<std::size_t>(pair_depth(i, k))];
      }
      rows[i] = acc;
    });
    double total = 0.0;
    for (double r : rows) total += r;
    est.value = total / nn;
    est.pair_count = static_cast<std::uint64_t>(n) * (n - 1);
    return est;
  }

  // Uniform subsample of ordered pairs (i != j), in fixed-size blocks.
  const std::uint64_t samples = static_cast<std::uint64_t>(kExactPairLimit) * (kExactPairLimit - 1);
  constexpr std::uint64_t kBlock = 1 << 16;
  const std::size_t blocks = static_cast<std::size_t>((samples + kBlock - 1) / kBlock);
  std::vector<double> block_sums(blocks, 0.0);
  const CounterStream rng(derive_seed(opts.pair_seed, 0x70616972ULL));
  parallel_for(blocks, opts.exec, [&](std::size_t b) {
    double acc = 0.0;
    const std::uint64_t end = std::min<std::uint64_t>(samples, (b + 1) * kBlock);
    for (std::uint64_t t = b * kBlock; t < end; ++t) {
      const std::uint64_t bits = rng.bits(t);
      const std::size_t i = static_cast<std::size_t>((bits >> 32) % n);
      std::size_t k = static_cast<std::size_t>((bits & 0xffffffffULL) % (n - 1));
      if (k >= i) ++k;
      acc += terms[i * stride + static_cast<std::size_t>(pair_depth(i, k))];
    }
    block_sums[b] = acc;
  });
  double total = 0.0;
  for (double v : block_sums) total += v;
  const double offdiag_fraction = static_cast<double>(n - 1) / static_cast<double>(n);
  est.value = offdiag_fraction * total / static_cast<double>(samples);
  est.pair_count = samples;
  return est;
}

EnergyEstimate energy_growth_profile(const MeasureOracle& m, const SetOracle& set, double s,
                                     const ProfileConfig& cfg) {
  if (cfg.depths.empty()) throw std::invalid_argument("energy profile needs at least one depth");
  if (cfg.seeds.empty()) throw std::invalid_argument("energy profile needs at least one seed");
  const std::size_t ns = cfg.seeds.size();
  const std::size_t jobs = cfg.depths.size() * ns;
  std::vector<double> values(jobs, 0.0);
  std::vector<std::uint64_t> pairs(jobs, 0);
  parallel_for(jobs, cfg.exec, [&](std::size_t job) {
    const int depth = cfg.depths[job / ns];
    const std::uint64_t seed = cfg.seeds[job % ns];
    const auto pts = sample_natural_measure(set, depth, cfg.points,
                                            derive_seed(seed, static_cast<std::uint64_t>(depth)));
    EnergyOptions inner;
    inner.pair_seed = derive_seed(seed, 0x9000 + static_cast<std::uint64_t>(depth));
    const EnergyEstimate e = s_energy(m, pts, s, depth, inner);
    values[job] = e.value;
    pairs[job] = e.pair_count;
  });

  EnergyEstimate out;
  out.s = s;
  out.max_depth = *std::max_element(cfg.depths.begin(), cfg.depths.end());
  for (std::size_t k = 0; k < cfg.depths.size(); ++k) {
    const std::span<const double> row(values.data() + k * ns, ns);
    ProfileEntry e;
    e.depth = cfg.depths[k];
    e.energy = sample_mean(row);
    e.std_error = standard_error(row);
    e.ratio = out.profile.empty() ? 0.0 : e.energy / out.profile.back().energy;
    e.per_seed.assign(row.begin(), row.end());
    out.profile.push_back(e);
  }
  for (std::uint64_t p : pairs) out.pair_count += p;
  out.value = out.profile.back().energy;

  const std::size_t ratios = out.profile.size() - 1;
  if (ratios == 0) {
    out.eventual_ratio = 1.0;
  } else {
    const std::size_t take = std::min<std::size_t>(3, ratios);
    double log_sum = 0.0;
    for (std::size_t k = out.profile.size() - take; k < out.profile.size(); ++k) {
      log_sum += std::log(out.profile[k].ratio);
    }
    out.eventual_ratio = std::exp(log_sum / static_cast<double>(take));
  }
  out.growth = out.eventual_ratio < 1.0 + cfg.epsilon ? EnergyGrowth::bounded
                                                      : EnergyGrowth::diverging;
  return out;
}

}  // namespace kpzc
