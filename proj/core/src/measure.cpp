#include "kpzc/measure.hpp"

namespace kpzc {

MeasureOracle MeasureOracle::lebesgue(int dim) {
  (void)DyadicAddress::root(dim);
  return MeasureOracle(LebesgueMeasure{dim});
}

MeasureOracle MeasureOracle::cascade(CascadeMeasure c, TailRule tail) {
  return MeasureOracle(CascadeOracle{std::move(c), tail});
}

int MeasureOracle::dim() const {
  if (const auto* l = std::get_if<LebesgueMeasure>(&kind_)) return l->dim;
  return std::get<CascadeOracle>(kind_).cascade.dim();
}

double MeasureOracle::log2_mass(const DyadicAddress& a) const {
  if (std::holds_alternative<LebesgueMeasure>(kind_)) {
    return -static_cast<double>(a.depth() * a.dim());
  }
  const auto& c = std::get<CascadeOracle>(kind_);
  return mass(c.cascade, a, a.depth(), c.tail).log2_mass;
}

std::string MeasureOracle::id() const {
  if (is_lebesgue()) return "lebesgue";
  const auto& c = std::get<CascadeOracle>(kind_);
  return "cascade(seed=" + std::to_string(c.cascade.seed()) + ")";
}

}  // namespace kpzc
