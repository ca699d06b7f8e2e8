#pragma once

#include <omp.h>

#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>

#include "finclear/equilibria.hpp"

namespace finclear::detail {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

/// Calls body(i) for i in [0, n). Exceptions are rethrown on the caller.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

/// Smallest i in [0, n) with pred(i); the same answer as the serial scan.
/// pred returns nullopt when it could not be evaluated (budget), which stops
/// the serial scan and is reported through `complete`.
template <class Pred>
std::optional<std::size_t> find_first(std::size_t n, Execution exec, bool& complete, Pred&& pred) {
  complete = true;
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::optional<bool> r = pred(i);
      if (!r) {
        complete = false;
        return std::nullopt;
      }
      if (*r) return i;
    }
    return std::nullopt;
  }
  std::atomic<std::size_t> best{kNoIndex};
  std::atomic<std::size_t> first_gap{kNoIndex};
  std::exception_ptr err;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < n; ++i) {
    if (i > best.load(std::memory_order_relaxed) || i > first_gap.load(std::memory_order_relaxed)) continue;
    try {
      const std::optional<bool> r = pred(i);
      auto lower = [](std::atomic<std::size_t>& a, std::size_t v) {
        std::size_t cur = a.load();
        while (v < cur && !a.compare_exchange_weak(cur, v)) {
        }
      };
      if (!r) {
        lower(first_gap, i);
      } else if (*r) {
        lower(best, i);
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  // A hit before the first unevaluated index is the serial answer.
  if (best.load() < first_gap.load()) return best.load();
  complete = first_gap.load() == kNoIndex;
  return std::nullopt;
}

/// Mixed-radix decoding of `code` into digits; digit 0 is most significant.
inline void decode(std::size_t code, const std::vector<std::size_t>& radix, std::vector<std::size_t>& digits) {
  digits.resize(radix.size());
  for (std::size_t k = radix.size(); k-- > 0;) {
    digits[k] = code % radix[k];
    code /= radix[k];
  }
}

/// Product of radices, or nullopt on overflow.
inline std::optional<std::size_t> product(const std::vector<std::size_t>& radix) {
  std::size_t p = 1;
  for (std::size_t r : radix) {
    if (r != 0 && p > std::numeric_limits<std::size_t>::max() / r) return std::nullopt;
    p *= r;
  }
  return p;
}

}  // namespace finclear::detail
