#include "kpzc/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "kpzc/errors.hpp"
#include "kpzc/log_sum.hpp"

namespace kpzc {

namespace {

// Cubes at depths <= kSplitDepth are handled serially; each non-disjoint cube
// at the split depth becomes one enumeration task. Fixed (not thread-dependent)
// so the reduction order never changes.
constexpr int kSplitDepth = 2;

struct Node {
  DyadicAddress a;
  double log2_path = 0.0;  // sum of log2 node weights along the ancestor chain
  CubeRelation rel = CubeRelation::intersects;
};

// Per-task accumulators, indexed [n - n_min][s_index]. Terms are
// 2^{s x} with x = log2 mu(a) + n d, the deviation from the Lebesgue mass;
// typical |x| is a few tens of bits, so they are summed in the linear domain
// and only outliers go through Log2Sum.
struct TaskSums {
  std::vector<double> linear;
  std::vector<Log2Sum> outliers;
  std::vector<std::uint64_t> counts;
};

std::uint64_t saturating_subtree(int dim, int levels, std::uint64_t cap) {
  // 1 + 2^d + ... + 2^{levels d}, saturating at cap + 1.
  std::uint64_t total = 0;
  std::uint64_t layer = 1;
  for (int l = 0; l <= levels; ++l) {
    total += layer;
    if (total > cap) return cap + 1;
    if (l < levels) {
      if (layer > (cap >> dim)) return cap + 1;
      layer <<= dim;
    }
  }
  return total;
}

std::string describe(const SetOracle& set, int n) {
  return "set " + set.to_string() + " at depth " + std::to_string(n);
}

// Counts of non-disjoint cubes per depth in [0, n_max].
std::vector<std::uint64_t> cover_counts(const SetOracle& set, int n_max) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_max) + 1, 0);
  std::vector<std::pair<DyadicAddress, CubeRelation>> stack;
  const DyadicAddress root = DyadicAddress::root(set.dim());
  const CubeRelation r0 = set.classify(root);
  if (r0 != CubeRelation::disjoint) stack.emplace_back(root, r0);
  const unsigned arity = 1U << set.dim();
  while (!stack.empty()) {
    auto [a, rel] = stack.back();
    stack.pop_back();
    if (rel == CubeRelation::contained) {
      std::uint64_t layer = 1;
      for (int m = a.depth(); m <= n_max; ++m) {
        counts[m] += layer;
        layer <<= set.dim();
      }
      continue;
    }
    ++counts[a.depth()];
    if (a.depth() == n_max) continue;
    for (unsigned s = 0; s < arity; ++s) {
      DyadicAddress c = a.child(s);
      const CubeRelation cr = set.refine(c, rel);
      if (cr != CubeRelation::disjoint) stack.emplace_back(c, cr);
    }
  }
  return counts;
}

class CascadeEnumerator {
 public:
  CascadeEnumerator(const CascadeOracle& oracle, const SetOracle& set, DepthRange depths,
                    std::span<const double> s_values)
      : oracle_(oracle), set_(set), depths_(depths), s_(s_values.begin(), s_values.end()) {
    s_max_ = s_.empty() ? 0.0 : *std::max_element(s_.begin(), s_.end());
    // s_j == s_0 + j * step (to rounding) lets visit() use two exp2 per cube.
    arithmetic_ = s_.size() >= 2;
    step_ = arithmetic_ ? s_[1] - s_[0] : 0.0;
    for (std::size_t j = 0; arithmetic_ && j < s_.size(); ++j) {
      arithmetic_ = std::abs(s_[j] - (s_[0] + static_cast<double>(j) * step_)) <= 1e-12;
    }
  }

  TaskSums make_sums() const {
    TaskSums t;
    const std::size_t cells = static_cast<std::size_t>(depths_.count()) * s_.size();
    t.linear.assign(cells, 0.0);
    t.outliers.resize(cells);
    t.counts.assign(static_cast<std::size_t>(depths_.count()), 0);
    return t;
  }

  void visit(const Node& node, TaskSums& out) const {
    const int m = node.a.depth();
    if (m < depths_.n_min) return;
    const int tail = oracle_.tail.extra_levels;
    const double x =
        node.log2_path + (tail > 0 ? log2_subtree_factor(oracle_.cascade, node.a, tail) : 0.0);
    const std::size_t row = static_cast<std::size_t>(m - depths_.n_min) * s_.size();
    ++out.counts[static_cast<std::size_t>(m - depths_.n_min)];
    if (std::abs(x) * s_max_ > kLinearRange) {
      for (std::size_t j = 0; j < s_.size(); ++j) out.outliers[row + j].add(s_[j] * x);
      return;
    }
    if (arithmetic_) {
      const double base = std::exp2(step_ * x);
      double term = s_[0] == 0.0 ? 1.0 : std::exp2(s_[0] * x);
      for (std::size_t j = 0; j < s_.size(); ++j) {
        out.linear[row + j] += term;
        term *= base;
      }
    } else {
      for (std::size_t j = 0; j < s_.size(); ++j) out.linear[row + j] += std::exp2(s_[j] * x);
    }
  }

  /// log2 Z_n(s_j) from merged sums.
  double finish(const TaskSums& t, int n, std::size_t j) const {
    const std::size_t cell = static_cast<std::size_t>(n - depths_.n_min) * s_.size() + j;
    Log2Sum total = t.outliers[cell];
    if (t.linear[cell] > 0.0) total.add(std::log2(t.linear[cell]));
    return total.value() - s_[j] * static_cast<double>(n * set_.dim());
  }

  void expand(const Node& node, std::vector<Node>& stack) const {
    const unsigned arity = 1U << node.a.dim();
    for (unsigned s = arity; s-- > 0;) {
      Node c;
      c.a = node.a.child(s);
      c.rel = set_.refine(c.a, node.rel);
      if (c.rel == CubeRelation::disjoint) continue;
      c.log2_path = node.log2_path + log2_node_weight(oracle_.cascade, c.a);
      stack.push_back(c);
    }
  }

  void run_subtree(const Node& start, TaskSums& out) const {
    std::vector<Node> stack{start};
    while (!stack.empty()) {
      const Node node = stack.back();
      stack.pop_back();
      visit(node, out);
      if (node.a.depth() < depths_.n_max) expand(node, stack);
    }
  }

 private:
  const CascadeOracle& oracle_;
  static constexpr double kLinearRange = 256.0;

  const SetOracle& set_;
  DepthRange depths_;
  std::vector<double> s_;
  double s_max_ = 0.0;
  bool arithmetic_ = false;
  double step_ = 0.0;
};

void check_inputs(const MeasureOracle& m, const SetOracle& set, DepthRange depths,
                  std::span<const double> s_values) {
  if (m.dim() != set.dim()) throw std::invalid_argument("measure and set dimensions differ");
  if (depths.n_min < 1 || depths.n_max < depths.n_min || depths.n_max > kMaxDepth) {
    throw std::invalid_argument("depth range must satisfy 1 <= n_min <= n_max <= " +
                                std::to_string(kMaxDepth));
  }
  for (double s : s_values) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("exponent s must be >= 0");
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Produces lambda(s) for arbitrary s, reusing the cover counts for Lebesgue
// and re-enumerating for a cascade.
class SlopeSource {
 public:
  SlopeSource(const MeasureOracle& m, const SetOracle& set, const EstimatorConfig& cfg)
      : m_(m), set_(set), cfg_(cfg) {}

  PartitionSumTable table(std::span<const double> s) const {
    if (m_.is_lebesgue()) {
      if (counts_.empty()) {
        (void)count_cover_nodes(set_, cfg_.n_range.n_max, cfg_.enumeration.node_budget);
        counts_ = cover_counts(set_, cfg_.n_range.n_max);
      }
      return lebesgue_table(s);
    }
    return partition_table(m_, set_, cfg_.n_range, s, cfg_.enumeration);
  }

  std::vector<double> slopes(std::span<const double> s) const {
    const PartitionSumTable t = table(s);
    std::vector<double> out;
    for (double v : s) out.push_back(scaling_slope(t, v, cfg_.n_range));
    return out;
  }

 private:
  PartitionSumTable lebesgue_table(std::span<const double> s) const {
    PartitionSumTable t(cfg_.n_range, std::vector<double>(s.begin(), s.end()), set_.dim());
    for (int n = cfg_.n_range.n_min; n <= cfg_.n_range.n_max; ++n) {
      const std::uint64_t c = counts_[n];
      t.set_cover_count(n, c);
      const double log2_count = std::log2(static_cast<double>(c));
      for (std::size_t j = 0; j < s.size(); ++j) {
        t.set_log2_z(n, j, log2_count - static_cast<double>(n * set_.dim()) * s[j]);
      }
    }
    t.set_id = set_.to_string();
    t.measure_id = m_.id();
    return t;
  }

  const MeasureOracle& m_;
  const SetOracle& set_;
  const EstimatorConfig& cfg_;
  mutable std::vector<std::uint64_t> counts_;
};

}  // namespace

DepthRange default_depth_range(int dim) {
  if (dim == 1) return {4, 16};
  if (dim == 2) return {4, 12};
  return {4, 8};
}

std::vector<double> default_s_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
  return g;
}

PartitionSumTable::PartitionSumTable(DepthRange depths, std::vector<double> s_values, int dim)
    : depths_(depths),
      s_values_(std::move(s_values)),
      dim_(dim),
      log2_z_(static_cast<std::size_t>(depths.count()) * s_values_.size(), 0.0),
      counts_(static_cast<std::size_t>(depths.count()), 0) {}

double PartitionSumTable::log2_z(int n, std::size_t s_index) const {
  if (n < depths_.n_min || n > depths_.n_max || s_index >= s_values_.size()) {
    throw std::out_of_range("partition table index out of range");
  }
  return log2_z_[static_cast<std::size_t>(n - depths_.n_min) * s_values_.size() + s_index];
}

double PartitionSumTable::log2_z(int n, double s) const {
  const auto it = std::find(s_values_.begin(), s_values_.end(), s);
  if (it == s_values_.end()) throw std::out_of_range("exponent not present in partition table");
  return log2_z(n, static_cast<std::size_t>(it - s_values_.begin()));
}

void PartitionSumTable::set_log2_z(int n, std::size_t s_index, double value) {
  if (n < depths_.n_min || n > depths_.n_max || s_index >= s_values_.size()) {
    throw std::out_of_range("partition table index out of range");
  }
  log2_z_[static_cast<std::size_t>(n - depths_.n_min) * s_values_.size() + s_index] = value;
}

std::uint64_t PartitionSumTable::cover_count(int n) const {
  if (n < depths_.n_min || n > depths_.n_max) throw std::out_of_range("depth out of range");
  return counts_[static_cast<std::size_t>(n - depths_.n_min)];
}

void PartitionSumTable::set_cover_count(int n, std::uint64_t count) {
  if (n < depths_.n_min || n > depths_.n_max) throw std::out_of_range("depth out of range");
  counts_[static_cast<std::size_t>(n - depths_.n_min)] = count;
}

std::uint64_t count_cover_nodes(const SetOracle& set, int n_max, std::uint64_t budget) {
  std::uint64_t total = 0;
  std::vector<std::pair<DyadicAddress, CubeRelation>> stack;
  const DyadicAddress root = DyadicAddress::root(set.dim());
  const CubeRelation r0 = set.classify(root);
  if (r0 != CubeRelation::disjoint) stack.emplace_back(root, r0);
  const unsigned arity = 1U << set.dim();
  while (!stack.empty()) {
    auto [a, rel] = stack.back();
    stack.pop_back();
    if (rel == CubeRelation::contained) {
      total += saturating_subtree(set.dim(), n_max - a.depth(), budget);
    } else {
      ++total;
      if (a.depth() < n_max) {
        for (unsigned s = 0; s < arity; ++s) {
          DyadicAddress c = a.child(s);
          const CubeRelation cr = set.refine(c, rel);
          if (cr != CubeRelation::disjoint) stack.emplace_back(c, cr);
        }
      }
    }
    if (total > budget) {
      throw ResourceError("node budget of " + std::to_string(budget) + " exceeded enumerating " +
                          describe(set, n_max));
    }
  }
  return total;
}

PartitionSumTable partition_table(const MeasureOracle& m, const SetOracle& set, DepthRange depths,
                                  std::span<const double> s_values,
                                  const EnumerationOptions& opts) {
  check_inputs(m, set, depths, s_values);
  (void)count_cover_nodes(set, depths.n_max, opts.node_budget);

  PartitionSumTable table(depths, std::vector<double>(s_values.begin(), s_values.end()),
                          set.dim());
  table.set_id = set.to_string();
  table.measure_id = m.id();

  if (m.is_lebesgue()) {
    const auto counts = cover_counts(set, depths.n_max);
    for (int n = depths.n_min; n <= depths.n_max; ++n) {
      table.set_cover_count(n, counts[n]);
      const double log2_count =
          counts[n] == 0 ? -std::numeric_limits<double>::infinity()
                         : std::log2(static_cast<double>(counts[n]));
      for (std::size_t j = 0; j < s_values.size(); ++j) {
        table.set_log2_z(n, j, log2_count - static_cast<double>(n * set.dim()) * s_values[j]);
      }
    }
    return table;
  }

  const auto& oracle = std::get<CascadeOracle>(m.kind());
  table.seed = oracle.cascade.seed();
  CascadeEnumerator en(oracle, set, depths, s_values);

  // Serial prefix down to the split depth; its nodes in range go to `head`.
  TaskSums head = en.make_sums();
  std::vector<Node> frontier;
  {
    std::vector<Node> level;
    Node root;
    root.a = DyadicAddress::root(set.dim());
    root.rel = set.classify(root.a);
    if (root.rel != CubeRelation::disjoint) level.push_back(root);
    const int split = std::min(kSplitDepth, depths.n_max);
    for (int d = 0; d < split; ++d) {
      std::vector<Node> next;
      for (const Node& n : level) {
        en.visit(n, head);
        std::vector<Node> kids;
        en.expand(n, kids);
        // expand() pushes in reverse symbol order for stack use.
        next.insert(next.end(), kids.rbegin(), kids.rend());
      }
      level = std::move(next);
    }
    frontier = std::move(level);
  }

  std::vector<TaskSums> tasks(frontier.size());
  parallel_for(frontier.size(), opts.exec, [&](std::size_t i) {
    tasks[i] = en.make_sums();
    en.run_subtree(frontier[i], tasks[i]);
  });

  for (const auto& t : tasks) {
    for (std::size_t k = 0; k < head.linear.size(); ++k) {
      head.linear[k] += t.linear[k];
      head.outliers[k].merge(t.outliers[k]);
    }
    for (std::size_t k = 0; k < head.counts.size(); ++k) head.counts[k] += t.counts[k];
  }
  for (int n = depths.n_min; n <= depths.n_max; ++n) {
    table.set_cover_count(n, head.counts[static_cast<std::size_t>(n - depths.n_min)]);
    for (std::size_t j = 0; j < s_values.size(); ++j) table.set_log2_z(n, j, en.finish(head, n, j));
  }
  return table;
}

double partition_sum(const MeasureOracle& m, const SetOracle& set, int n, double s,
                     const EnumerationOptions& opts) {
  const double one[] = {s};
  return partition_table(m, set, DepthRange{n, n}, one, opts).log2_z(n, std::size_t{0});
}

double scaling_slope(const PartitionSumTable& t, double s, DepthRange range) {
  if (range.count() < 3) throw std::invalid_argument("scaling slope needs at least three depths");
  if (range.n_min < t.depths().n_min || range.n_max > t.depths().n_max) {
    throw std::out_of_range("slope depth range outside the table");
  }
  const double n_bar = 0.5 * (range.n_min + range.n_max);
  double y_bar = 0.0;
  for (int n = range.n_min; n <= range.n_max; ++n) y_bar += t.log2_z(n, s);
  y_bar /= range.count();
  double sxy = 0.0;
  double sxx = 0.0;
  for (int n = range.n_min; n <= range.n_max; ++n) {
    const double dx = n - n_bar;
    sxy += dx * (t.log2_z(n, s) - y_bar);
    sxx += dx * dx;
  }
  return sxy / sxx / t.dim();
}

double scaling_slope(const PartitionSumTable& t, double s) {
  return scaling_slope(t, s, t.depths());
}

DimensionEstimate estimate_dimension(const MeasureOracle& m, const SetOracle& set,
                                     const EstimatorConfig& cfg) {
  if (cfg.s_grid.size() < 2 || !std::is_sorted(cfg.s_grid.begin(), cfg.s_grid.end())) {
    throw std::invalid_argument("s grid needs at least two increasing points");
  }
  if (cfg.n_range.count() < 3) {
    throw std::invalid_argument("dimension estimate needs at least three depths");
  }
  const SlopeSource source(m, set, cfg);
  PartitionSumTable grid = source.table(cfg.s_grid);

  DimensionEstimate est;
  est.n_range = cfg.n_range;
  est.seeds_used = 1;
  for (double s : cfg.s_grid) est.slope_fn.push_back({s, scaling_slope(grid, s, cfg.n_range)});

  const auto& lam = est.slope_fn;
  const auto first_nonpos =
      std::find_if(lam.begin(), lam.end(), [](const SlopeSample& p) { return p.lambda <= 0.0; });

  auto fail = [&](const std::string& why) {
    std::ostringstream diag;
    diag << "set=" << set.to_string() << " measure=" << m.id() << " n=" << cfg.n_range.n_min
         << ".." << cfg.n_range.n_max << " lambda:";
    for (const auto& p : lam) diag << " (" << p.s << ", " << p.lambda << ")";
    throw EstimationError(why, diag.str());
  };

  double zeta = 0.0;
  if (first_nonpos == lam.begin()) {
    if (lam.front().s > 0.0) fail("scaling slope is already non-positive at the first grid point");
    zeta = 0.0;
  } else if (first_nonpos == lam.end()) {
    if (lam.back().s < 1.0) fail("scaling slope has no sign change on the s grid");
    zeta = 1.0;
  } else if (first_nonpos->lambda == 0.0) {
    zeta = first_nonpos->s;
  } else {
    double lo = std::prev(first_nonpos)->s;
    double lam_lo = std::prev(first_nonpos)->lambda;
    double hi = first_nonpos->s;
    double lam_hi = first_nonpos->lambda;
    const int parts = std::max(2, cfg.subdivisions);
    while (hi - lo > cfg.tolerance) {
      std::vector<double> inner;
      for (int k = 1; k < parts; ++k) inner.push_back(lo + (hi - lo) * k / parts);
      const std::vector<double> lam_inner = source.slopes(inner);
      std::size_t k = 0;
      while (k < inner.size() && lam_inner[k] > 0.0) ++k;
      if (k > 0) {
        lo = inner[k - 1];
        lam_lo = lam_inner[k - 1];
      }
      if (k < inner.size()) {
        if (lam_inner[k] == 0.0) {
          lo = hi = inner[k];
          break;
        }
        hi = inner[k];
        lam_hi = lam_inner[k];
      }
    }
    zeta = (hi == lo) ? lo : lo + lam_lo * (hi - lo) / (lam_lo - lam_hi);
  }
  est.zeta_hat = std::clamp(zeta, 0.0, 1.0);
  est.per_seed = {est.zeta_hat};
  est.tables.push_back(std::move(grid));
  return est;
}

DimensionEstimate estimate_dimension(const CascadeFamily& family, const SetOracle& set,
                                     const EstimatorConfig& cfg,
                                     std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw std::invalid_argument("quenched estimate needs at least one seed");
  std::vector<DimensionEstimate> runs(seeds.size());

  // Parallelize across seeds when there are several; inner enumeration is
  // then serial. Both schedules reduce in the same fixed order.
  EstimatorConfig inner = cfg;
  Execution outer = cfg.enumeration.exec;
  if (seeds.size() > 1) {
    inner.enumeration.exec.threads = 1;
  } else {
    outer.threads = 1;
  }
  parallel_for(seeds.size(), outer, [&](std::size_t i) {
    const MeasureOracle m = MeasureOracle::cascade(
        CascadeMeasure(seeds[i], family.model, family.weighting), family.tail);
    runs[i] = estimate_dimension(m, set, inner);
  });

  DimensionEstimate out;
  out.n_range = cfg.n_range;
  out.seeds_used = seeds.size();
  for (auto& r : runs) {
    out.per_seed.push_back(r.zeta_hat);
    for (auto& t : r.tables) out.tables.push_back(std::move(t));
  }
  out.zeta_hat = mean(out.per_seed);
  out.spread = sample_std(out.per_seed);
  out.std_error = out.spread / std::sqrt(static_cast<double>(seeds.size()));
  for (std::size_t j = 0; j < cfg.s_grid.size(); ++j) {
    double acc = 0.0;
    for (const auto& r : runs) acc += r.slope_fn[j].lambda;
    out.slope_fn.push_back({cfg.s_grid[j], acc / static_cast<double>(runs.size())});
  }
  return out;
}

}  // namespace kpzc
