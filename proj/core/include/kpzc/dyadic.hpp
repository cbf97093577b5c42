#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kpzc {

inline constexpr int kMaxDim = 8;
inline constexpr int kMaxDepth = 60;
/// Depth at which dyadic_ball stops refining coincident points.
inline constexpr int kDefaultBallCap = 60;

/// A point of the half-open unit cube [0,1)^d.
class Point {
 public:
  /// Throws std::domain_error if a coordinate is outside [0,1) or the
  /// dimension is outside [1, kMaxDim].
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

/// A cube prod_i [j_i 2^-m, (j_i+1) 2^-m) of the 2^d-ary subdivision tree.
///
/// Stored as the per-coordinate integer indices j_i, which is the
/// coordinate-major view of the packed path: bit (m - l) of j_i is bit i of
/// the level-l path symbol. Common prefixes reduce to XOR + bit_width.
class DyadicAddress {
 public:
  DyadicAddress() = default;

  static DyadicAddress root(int dim);
  /// Symbols are in [0, 2^d); bit i of a symbol selects the upper half along
  /// coordinate i.
  static DyadicAddress from_path(int dim, std::span<const unsigned> symbols);
  static DyadicAddress from_path(int dim, std::initializer_list<unsigned> symbols) {
    return from_path(dim, std::span<const unsigned>(symbols.begin(), symbols.size()));
  }
  static DyadicAddress from_indices(int dim, int depth, std::span<const std::uint64_t> indices);

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  std::uint64_t index(int coord) const { return idx_[static_cast<std::size_t>(coord)]; }

  /// Path symbol at level 1..depth.
  unsigned symbol(int level) const;
  std::vector<unsigned> path() const;

  DyadicAddress child(unsigned symbol) const;
  DyadicAddress ancestor(int depth) const;
  bool contains(const DyadicAddress& other) const;

  double lower(int coord) const;
  double upper(int coord) const;
  /// Center of the cube; always representable exactly for depth <= 52.
  Point center() const;

  /// "d:m:hex" where hex packs the m*d path bits level-major, most
  /// significant first, left-padded with zero bits to a multiple of four.
  std::string to_string() const;
  static DyadicAddress parse(std::string_view text);

  friend bool operator==(const DyadicAddress&, const DyadicAddress&) = default;

 private:
  std::array<std::uint64_t, kMaxDim> idx_{};
  int dim_ = 1;
  int depth_ = 0;
};

/// The unique depth-m cube containing p under the half-open convention.
DyadicAddress address_of(const Point& p, int depth);

/// Smallest dyadic cube containing x and y, capped at max_depth.
DyadicAddress dyadic_ball(const Point& x, const Point& y, int max_depth = kDefaultBallCap);

/// Depth of the longest common ancestor of two addresses.
int common_depth(const DyadicAddress& a, const DyadicAddress& b);

/// The 2^d depth-(m+1) children of a, in symbol order.
std::vector<DyadicAddress> children(const DyadicAddress& a);

/// Lebesgue measure 2^{-md}.
double lebesgue(const DyadicAddress& a);

}  // namespace kpzc
