#pragma once

#include <cmath>
#include <limits>

namespace kpzc {

/// Streaming base-2 log-sum-exp: accumulates sum_i 2^{x_i} as offset + log2(sum).
/// The result depends on insertion order only through rounding, so callers
/// that need bit-stable output must feed terms in a fixed order.
class Log2Sum {
 public:
  void add(double log2_term) {
    if (count_ == 0) {
      offset_ = log2_term;
      scaled_ = 1.0;
    } else if (log2_term <= offset_) {
      scaled_ += std::exp2(log2_term - offset_);
    } else {
      scaled_ = scaled_ * std::exp2(offset_ - log2_term) + 1.0;
      offset_ = log2_term;
    }
    ++count_;
  }

  void merge(const Log2Sum& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    if (other.offset_ <= offset_) {
      scaled_ += other.scaled_ * std::exp2(other.offset_ - offset_);
    } else {
      scaled_ = scaled_ * std::exp2(offset_ - other.offset_) + other.scaled_;
      offset_ = other.offset_;
    }
    count_ += other.count_;
  }

  /// log2 of the accumulated sum; -infinity when empty.
  double value() const {
    if (count_ == 0) return -std::numeric_limits<double>::infinity();
    return offset_ + std::log2(scaled_);
  }

  unsigned long long count() const { return count_; }

 private:
  double offset_ = 0.0;
  double scaled_ = 0.0;
  unsigned long long count_ = 0;
};

}  // namespace kpzc
