#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace finclear {

/// Integer amount of money. Non-negative in every valid network; the type is
/// signed only so that malformed inputs can be represented and reported.
using Money = std::int64_t;

/// Inputs whose total weight exceeds this are rejected by the loaders.
inline constexpr Money kMaxTotalWeight = Money{1} << 62;

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

inline Money checked_add(Money a, Money b) {
  Money out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("money addition overflow");
  return out;
}

inline Money checked_sub(Money a, Money b) {
  Money out;
  if (__builtin_sub_overflow(a, b, &out)) throw OverflowError("money subtraction overflow");
  return out;
}

inline Money checked_mul(Money a, Money b) {
  Money out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("money multiplication overflow");
  return out;
}

/// Edge capacity: either a bounded amount or the distinguished Unbounded value
/// carried by auxiliary (v,s) edges of a circulation network.
class Capacity {
 public:
  constexpr Capacity() = default;
  constexpr explicit Capacity(Money amount) : amount_(amount) {}
  static constexpr Capacity unbounded() {
    Capacity c;
    c.unbounded_ = true;
    return c;
  }

  constexpr bool is_unbounded() const { return unbounded_; }
  constexpr bool is_bounded() const { return !unbounded_; }
  /// Precondition: bounded.
  constexpr Money amount() const { return amount_; }

  /// Remaining room after `used` units; nullopt when unbounded.
  constexpr std::optional<Money> residual(Money used) const {
    if (unbounded_) return std::nullopt;
    return amount_ - used;
  }

  friend constexpr bool operator==(const Capacity&, const Capacity&) = default;

 private:
  Money amount_ = 0;
  bool unbounded_ = false;
};

std::ostream& operator<<(std::ostream& os, const Capacity& c);

/// Exact non-negative ratio p/q (q > 0), or Unbounded. Stored reduced.
class Ratio {
 public:
  Ratio() = default;
  Ratio(Money num, Money den);
  static Ratio unbounded() {
    Ratio r;
    r.unbounded_ = true;
    return r;
  }

  bool is_unbounded() const { return unbounded_; }
  Money num() const { return num_; }
  Money den() const { return den_; }

  /// "p/q" or the literal "unbounded".
  std::string str() const;

  friend bool operator==(const Ratio&, const Ratio&) = default;
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

 private:
  Money num_ = 0;
  Money den_ = 1;
  bool unbounded_ = false;
};

std::ostream& operator<<(std::ostream& os, const Ratio& r);

}  // namespace finclear
