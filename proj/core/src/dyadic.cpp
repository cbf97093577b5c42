#include "kpzc/dyadic.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "kpzc/errors.hpp"

namespace kpzc {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::domain_error("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                            std::to_string(dim));
  }
}

void check_depth(int depth) {
  if (depth < 0 || depth > kMaxDepth) {
    throw std::domain_error("depth must be in [0, " + std::to_string(kMaxDepth) + "], got " +
                            std::to_string(depth));
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  check_dim(static_cast<int>(coords_.size()));
  for (double c : coords_) {
    if (!(c >= 0.0 && c < 1.0)) {
      throw std::domain_error("point coordinate outside [0,1): " + std::to_string(c));
    }
  }
}

DyadicAddress DyadicAddress::root(int dim) {
  check_dim(dim);
  DyadicAddress a;
  a.dim_ = dim;
  return a;
}

DyadicAddress DyadicAddress::from_path(int dim, std::span<const unsigned> symbols) {
  DyadicAddress a = root(dim);
  check_depth(static_cast<int>(symbols.size()));
  for (unsigned s : symbols) a = a.child(s);
  return a;
}

DyadicAddress DyadicAddress::from_indices(int dim, int depth,
                                          std::span<const std::uint64_t> indices) {
  check_dim(dim);
  check_depth(depth);
  if (indices.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("index count does not match dimension");
  }
  DyadicAddress a;
  a.dim_ = dim;
  a.depth_ = depth;
  for (int i = 0; i < dim; ++i) {
    if (depth < 64 && indices[i] >> depth != 0) {
      throw std::domain_error("cube index out of range for depth " + std::to_string(depth));
    }
    a.idx_[i] = indices[i];
  }
  return a;
}

unsigned DyadicAddress::symbol(int level) const {
  if (level < 1 || level > depth_) throw std::out_of_range("path level out of range");
  const int shift = depth_ - level;
  unsigned s = 0;
  for (int i = 0; i < dim_; ++i) s |= static_cast<unsigned>((idx_[i] >> shift) & 1U) << i;
  return s;
}

std::vector<unsigned> DyadicAddress::path() const {
  std::vector<unsigned> out;
  out.reserve(static_cast<std::size_t>(depth_));
  for (int l = 1; l <= depth_; ++l) out.push_back(symbol(l));
  return out;
}

DyadicAddress DyadicAddress::child(unsigned symbol) const {
  if (symbol >= (1U << dim_)) {
    throw std::domain_error("child symbol " + std::to_string(symbol) + " >= 2^d");
  }
  if (depth_ >= kMaxDepth) throw std::domain_error("address already at maximum depth");
  DyadicAddress c = *this;
  c.depth_ = depth_ + 1;
  for (int i = 0; i < dim_; ++i) c.idx_[i] = (idx_[i] << 1) | ((symbol >> i) & 1U);
  return c;
}

DyadicAddress DyadicAddress::ancestor(int depth) const {
  if (depth < 0 || depth > depth_) throw std::out_of_range("ancestor depth out of range");
  DyadicAddress a = *this;
  a.depth_ = depth;
  for (int i = 0; i < dim_; ++i) a.idx_[i] = idx_[i] >> (depth_ - depth);
  return a;
}

bool DyadicAddress::contains(const DyadicAddress& other) const {
  return other.dim_ == dim_ && other.depth_ >= depth_ && other.ancestor(depth_) == *this;
}

double DyadicAddress::lower(int coord) const {
  return std::ldexp(static_cast<double>(idx_[coord]), -depth_);
}

double DyadicAddress::upper(int coord) const {
  return std::ldexp(static_cast<double>(idx_[coord] + 1), -depth_);
}

Point DyadicAddress::center() const {
  std::vector<double> c(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    c[i] = std::ldexp(2.0 * static_cast<double>(idx_[i]) + 1.0, -depth_ - 1);
  }
  return Point(std::move(c));
}

std::string DyadicAddress::to_string() const {
  const int bits = depth_ * dim_;
  const int digits = (bits + 3) / 4;
  const int pad = digits * 4 - bits;
  std::string hex;
  hex.reserve(static_cast<std::size_t>(digits));
  // Bit b of the padded stream (b = 0 most significant).
  auto bit_at = [&](int b) -> unsigned {
    const int pos = b - pad;
    if (pos < 0) return 0;
    const int level = pos / dim_ + 1;
    const int within = pos % dim_;  // MSB of the symbol first
    return (symbol(level) >> (dim_ - 1 - within)) & 1U;
  };
  for (int d = 0; d < digits; ++d) {
    unsigned v = 0;
    for (int k = 0; k < 4; ++k) v = (v << 1) | bit_at(4 * d + k);
    hex.push_back("0123456789abcdef"[v]);
  }
  return std::to_string(dim_) + ":" + std::to_string(depth_) + ":" + hex;
}

DyadicAddress DyadicAddress::parse(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw std::invalid_argument("address must have the form d:m:hex");
  }
  int dim = 0;
  int depth = 0;
  try {
    dim = std::stoi(std::string(text.substr(0, c1)));
    depth = std::stoi(std::string(text.substr(c1 + 1, c2 - c1 - 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed address header: " + std::string(text));
  }
  check_dim(dim);
  check_depth(depth);
  const std::string_view hex = text.substr(c2 + 1);
  const int bits = depth * dim;
  const int digits = (bits + 3) / 4;
  if (static_cast<int>(hex.size()) != digits) {
    throw std::invalid_argument("address hex has wrong length: " + std::string(text));
  }
  std::vector<unsigned> stream;
  stream.reserve(static_cast<std::size_t>(digits) * 4);
  for (char c : hex) {
    const int v = hex_value(c);
    if (v < 0) throw std::invalid_argument("bad hex digit in address: " + std::string(text));
    for (int k = 3; k >= 0; --k) stream.push_back((static_cast<unsigned>(v) >> k) & 1U);
  }
  const int pad = digits * 4 - bits;
  for (int b = 0; b < pad; ++b) {
    if (stream[b] != 0) throw std::invalid_argument("nonzero padding in address");
  }
  DyadicAddress a = root(dim);
  for (int level = 0; level < depth; ++level) {
    unsigned s = 0;
    for (int within = 0; within < dim; ++within) {
      s = (s << 1) | stream[static_cast<std::size_t>(pad + level * dim + within)];
    }
    a = a.child(s);
  }
  return a;
}

DyadicAddress address_of(const Point& p, int depth) {
  check_depth(depth);
  std::array<std::uint64_t, kMaxDim> idx{};
  for (int i = 0; i < p.dim(); ++i) {
    // Exact: scaling by a power of two and flooring lose nothing for depth <= 60.
    idx[i] = static_cast<std::uint64_t>(std::floor(std::ldexp(p[i], depth)));
  }
  return DyadicAddress::from_indices(p.dim(), depth,
                                     std::span<const std::uint64_t>(idx.data(), p.dim()));
}

int common_depth(const DyadicAddress& a, const DyadicAddress& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch in common_depth");
  const int depth = std::min(a.depth(), b.depth());
  int common = depth;
  for (int i = 0; i < a.dim(); ++i) {
    const std::uint64_t x = a.index(i) >> (a.depth() - depth);
    const std::uint64_t y = b.index(i) >> (b.depth() - depth);
    common = std::min(common, depth - static_cast<int>(std::bit_width(x ^ y)));
  }
  return common;
}

DyadicAddress dyadic_ball(const Point& x, const Point& y, int max_depth) {
  if (x.dim() != y.dim()) throw std::domain_error("points of different dimension");
  const DyadicAddress ax = address_of(x, max_depth);
  const DyadicAddress ay = address_of(y, max_depth);
  return ax.ancestor(common_depth(ax, ay));
}

std::vector<DyadicAddress> children(const DyadicAddress& a) {
  std::vector<DyadicAddress> out;
  const unsigned n = 1U << a.dim();
  out.reserve(n);
  for (unsigned s = 0; s < n; ++s) out.push_back(a.child(s));
  return out;
}

double lebesgue(const DyadicAddress& a) { return std::ldexp(1.0, -a.depth() * a.dim()); }

}  // namespace kpzc
