#include "kpzc/sets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kpzc/grammar.hpp"

namespace kpzc {

namespace {

CubeRelation classify_slice(const AxisSlice& s, const DyadicAddress& a) {
  const int c = s.axis - 1;
  return (a.lower(c) <= s.coord && s.coord < a.upper(c)) ? CubeRelation::intersects
                                                        : CubeRelation::disjoint;
}

CubeRelation join(const std::vector<SetOracle>& members, const auto& relation_of) {
  bool any_intersects = false;
  for (const auto& m : members) {
    const CubeRelation r = relation_of(m);
    if (r == CubeRelation::contained) return CubeRelation::contained;
    any_intersects = any_intersects || r == CubeRelation::intersects;
  }
  return any_intersects ? CubeRelation::intersects : CubeRelation::disjoint;
}

SetOracle from_expr(const Expr& e, int dim) {
  if (e.kind == Expr::Kind::ident && e.name == "fullcube") return SetOracle::full_cube(dim);
  if (e.kind != Expr::Kind::call) {
    throw std::invalid_argument("unknown set '" + e.name + "'");
  }
  if (e.name == "cantor") {
    const Expr& keep = e.arg("keep");
    if (keep.kind != Expr::Kind::list) throw std::invalid_argument("cantor keep must be a list");
    std::vector<unsigned> symbols;
    for (const auto& item : keep.items) {
      const double v = item.as_number();
      if (v < 0 || v != std::floor(v)) throw std::invalid_argument("cantor symbols are integers");
      symbols.push_back(static_cast<unsigned>(v));
    }
    return SetOracle::cantor(dim, symbols);
  }
  if (e.name == "slice") {
    const double axis = e.number_arg("axis");
    if (axis != std::floor(axis)) throw std::invalid_argument("slice axis must be an integer");
    return SetOracle::axis_slice(dim, static_cast<int>(axis), e.number_arg("coord"));
  }
  if (e.name == "singleton") {
    std::vector<double> coords;
    for (const auto& a : e.args) {
      if (!a.key.empty()) throw std::invalid_argument("singleton takes positional coordinates");
      coords.push_back(a.value.front().as_number());
    }
    if (static_cast<int>(coords.size()) != dim) {
      throw std::invalid_argument("singleton needs exactly d coordinates");
    }
    return SetOracle::singleton(Point(std::move(coords)));
  }
  if (e.name == "union") {
    std::vector<SetOracle> members;
    for (const auto& a : e.args) {
      if (!a.key.empty()) throw std::invalid_argument("union takes positional sets");
      members.push_back(from_expr(a.value.front(), dim));
    }
    return SetOracle::finite_union(std::move(members));
  }
  throw std::invalid_argument("unknown set kind '" + e.name + "'");
}

}  // namespace

std::string_view to_string(CubeRelation r) {
  switch (r) {
    case CubeRelation::disjoint: return "disjoint";
    case CubeRelation::intersects: return "intersects";
    case CubeRelation::contained: return "contained";
  }
  return "?";
}

SetOracle SetOracle::full_cube(int dim) {
  (void)DyadicAddress::root(dim);
  return SetOracle(FullCube{}, dim);
}

SetOracle SetOracle::cantor(int dim, std::span<const unsigned> keep) {
  (void)DyadicAddress::root(dim);
  DyadicCantor c;
  for (unsigned s : keep) {
    if (s >= (1U << dim)) throw std::invalid_argument("cantor symbol must be < 2^d");
    c.keep.set(s);
  }
  if (c.keep.none()) throw std::invalid_argument("cantor keep set must be nonempty");
  return SetOracle(c, dim);
}

SetOracle SetOracle::axis_slice(int dim, int axis, double coord) {
  (void)DyadicAddress::root(dim);
  if (axis < 1 || axis > dim) throw std::invalid_argument("slice axis must lie in [1, d]");
  if (!(coord >= 0.0 && coord < 1.0)) throw std::invalid_argument("slice coord outside [0,1)");
  if (std::ldexp(coord, kMaxDepth) != std::floor(std::ldexp(coord, kMaxDepth))) {
    throw std::invalid_argument("slice coord must be a dyadic rational");
  }
  return SetOracle(AxisSlice{axis, coord}, dim);
}

SetOracle SetOracle::singleton(Point p) {
  const int dim = p.dim();
  return SetOracle(Singleton{std::move(p)}, dim);
}

SetOracle SetOracle::finite_union(std::vector<SetOracle> members) {
  if (members.empty()) throw std::invalid_argument("union needs at least one member");
  const int dim = members.front().dim();
  for (const auto& m : members) {
    if (m.dim() != dim) throw std::invalid_argument("union members differ in dimension");
  }
  return SetOracle(FiniteUnion{std::move(members)}, dim);
}

CubeRelation SetOracle::classify(const DyadicAddress& a) const {
  if (a.dim() != dim_) throw std::invalid_argument("cube dimension differs from set dimension");
  return std::visit(
      [&](const auto& k) -> CubeRelation {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, FullCube>) {
          return CubeRelation::contained;
        } else if constexpr (std::is_same_v<T, DyadicCantor>) {
          for (int l = 1; l <= a.depth(); ++l) {
            if (!k.keep.test(a.symbol(l))) return CubeRelation::disjoint;
          }
          return k.keep.count() == (1U << dim_) ? CubeRelation::contained
                                                : CubeRelation::intersects;
        } else if constexpr (std::is_same_v<T, AxisSlice>) {
          return classify_slice(k, a);
        } else if constexpr (std::is_same_v<T, Singleton>) {
          return address_of(k.point, a.depth()) == a ? CubeRelation::intersects
                                                     : CubeRelation::disjoint;
        } else {
          return join(k.members, [&](const SetOracle& m) { return m.classify(a); });
        }
      },
      kind_);
}

CubeRelation SetOracle::refine(const DyadicAddress& child, CubeRelation parent) const {
  if (parent != CubeRelation::intersects) return parent;
  if (const auto* c = std::get_if<DyadicCantor>(&kind_)) {
    return c->keep.test(child.symbol(child.depth())) ? CubeRelation::intersects
                                                     : CubeRelation::disjoint;
  }
  return classify(child);
}

std::optional<double> SetOracle::analytic_zeta0() const {
  return std::visit(
      [&](const auto& k) -> std::optional<double> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, FullCube>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, DyadicCantor>) {
          return std::log2(static_cast<double>(k.keep.count())) / dim_;
        } else if constexpr (std::is_same_v<T, AxisSlice>) {
          return static_cast<double>(dim_ - 1) / dim_;
        } else if constexpr (std::is_same_v<T, Singleton>) {
          return 0.0;
        } else {
          double best = 0.0;
          for (const auto& m : k.members) {
            const auto z = m.analytic_zeta0();
            if (!z) return std::nullopt;
            best = std::max(best, *z);
          }
          return best;
        }
      },
      kind_);
}

std::string SetOracle::to_string() const {
  return std::visit(
      [&](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, FullCube>) {
          return "fullcube";
        } else if constexpr (std::is_same_v<T, DyadicCantor>) {
          std::string out = "cantor(keep=[";
          bool first = true;
          for (unsigned s = 0; s < (1U << dim_); ++s) {
            if (!k.keep.test(s)) continue;
            if (!first) out += ",";
            out += std::to_string(s);
            first = false;
          }
          return out + "])";
        } else if constexpr (std::is_same_v<T, AxisSlice>) {
          return "slice(axis=" + std::to_string(k.axis) + ",coord=" + format_number(k.coord) + ")";
        } else if constexpr (std::is_same_v<T, Singleton>) {
          std::string out = "singleton(";
          for (int i = 0; i < k.point.dim(); ++i) {
            if (i) out += ",";
            out += format_number(k.point[i]);
          }
          return out + ")";
        } else {
          std::string out = "union(";
          for (std::size_t i = 0; i < k.members.size(); ++i) {
            if (i) out += ",";
            out += k.members[i].to_string();
          }
          return out + ")";
        }
      },
      kind_);
}

SetOracle parse_set(std::string_view text, int dim) { return from_expr(parse_expr(text), dim); }

}  // namespace kpzc
