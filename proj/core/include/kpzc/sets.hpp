#pragma once

#include <bitset>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kpzc/dyadic.hpp"

namespace kpzc {

enum class CubeRelation { disjoint, intersects, contained };

std::string_view to_string(CubeRelation r);

class SetOracle;

struct FullCube {};

/// Points whose every path symbol lies in `keep`.
struct DyadicCantor {
  std::bitset<(1U << kMaxDim)> keep;
};

/// {x : x_axis = coord}, axis in [1, d], coord a dyadic rational in [0,1).
struct AxisSlice {
  int axis = 1;
  double coord = 0.5;
};

struct Singleton {
  Point point;
};

struct FiniteUnion {
  std::vector<SetOracle> members;
};

/// A dyadic-native fractal test set: an exact three-valued cube classifier
/// plus the analytic Lebesgue dimension when known.
class SetOracle {
 public:
  using Kind = std::variant<FullCube, DyadicCantor, AxisSlice, Singleton, FiniteUnion>;

  static SetOracle full_cube(int dim);
  static SetOracle cantor(int dim, std::span<const unsigned> keep);
  static SetOracle cantor(int dim, std::initializer_list<unsigned> keep) {
    return cantor(dim, std::span<const unsigned>(keep.begin(), keep.size()));
  }
  static SetOracle axis_slice(int dim, int axis, double coord);
  static SetOracle singleton(Point p);
  static SetOracle finite_union(std::vector<SetOracle> members);

  const Kind& kind() const { return kind_; }
  int dim() const { return dim_; }

  /// Throws std::invalid_argument on a dimension mismatch.
  CubeRelation classify(const DyadicAddress& a) const;

  /// Classification of `child` given its parent's relation. Equal to
  /// classify(child) but O(1) for Cantor sets, which keeps pruned
  /// enumeration linear in the number of visited cubes.
  CubeRelation refine(const DyadicAddress& child, CubeRelation parent) const;

  std::optional<double> analytic_zeta0() const;

  /// Canonical text in the config grammar; parse_set(to_string(o)) == o.
  std::string to_string() const;

 private:
  SetOracle(Kind kind, int dim) : kind_(std::move(kind)), dim_(dim) {}

  Kind kind_;
  int dim_ = 1;
};

/// Grammar: fullcube | cantor(keep=[i,...]) | slice(axis=i,coord=x)
///        | singleton(x1,...,xd) | union(set, set, ...)
SetOracle parse_set(std::string_view text, int dim);

}  // namespace kpzc
