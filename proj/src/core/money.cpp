#include "finclear/money.hpp"

#include <numeric>
#include <ostream>

namespace finclear {

std::ostream& operator<<(std::ostream& os, const Capacity& c) {
  if (c.is_unbounded()) return os << "unbounded";
  return os << c.amount();
}

Ratio::Ratio(Money num, Money den) {
  if (den <= 0 || num < 0) throw std::invalid_argument("ratio requires num >= 0 and den > 0");
  const Money g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Ratio::str() const {
  if (unbounded_) return "unbounded";
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
  if (a.unbounded_ || b.unbounded_) return a.unbounded_ <=> b.unbounded_;
  // Cross-multiply in 128 bits; both sides are non-negative.
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Ratio& r) { return os << r.str(); }

}  // namespace finclear
