// weight.hpp
#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace trop {

struct OverflowError : std::runtime_error {
  OverflowError() : std::runtime_error("weight-overflow") {}
};

class Weight {
 public:
  constexpr Weight() : v_(kInf) {}
  constexpr Weight(std::int64_t v) : v_(v) {
    if (v == kInf) throw OverflowError();
  }

  static constexpr Weight inf() { return Weight(Raw{}, kInf); }
  static constexpr Weight zero() { return Weight(0); }

  constexpr bool finite() const { return v_ != kInf; }
  constexpr bool is_inf() const { return v_ == kInf; }
  std::int64_t value() const {
    if (!finite()) throw std::logic_error("value() of infinite weight");
    return v_;
  }
  constexpr std::int64_t raw() const { return v_; }

  friend Weight operator+(Weight a, Weight b) {
    if (a.is_inf() || b.is_inf()) return inf();
    std::int64_t r;
    if (__builtin_add_overflow(a.v_, b.v_, &r) || r == kInf) throw OverflowError();
    return Weight(Raw{}, r);
  }
  // a - b with b finite; inf stays inf
  friend Weight operator-(Weight a, Weight b) {
    if (b.is_inf()) throw std::logic_error("subtracting infinity");
    if (a.is_inf()) return inf();
    std::int64_t r;
    if (__builtin_sub_overflow(a.v_, b.v_, &r) || r == kInf) throw OverflowError();
    return Weight(Raw{}, r);
  }
  Weight operator-() const {
    if (is_inf()) throw std::logic_error("negating infinity");
    if (v_ == std::numeric_limits<std::int64_t>::min()) throw OverflowError();
    return Weight(-v_);
  }
  Weight& operator+=(Weight o) { return *this = *this + o; }

  friend constexpr bool operator==(Weight a, Weight b) { return a.v_ == b.v_; }
  friend constexpr auto operator<=>(Weight a, Weight b) { return a.v_ <=> b.v_; }

  std::string str() const { return finite() ? std::to_string(v_) : "inf"; }
  friend std::ostream& operator<<(std::ostream& os, Weight w) { return os << w.str(); }

 private:
  struct Raw {};
  constexpr Weight(Raw, std::int64_t v) : v_(v) {}
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  std::int64_t v_;
};

inline Weight wmin(Weight a, Weight b) { return b < a ? b : a; }
inline Weight wmul(Weight a, std::int64_t k) {
  if (a.is_inf()) return a;
  std::int64_t r;
  if (__builtin_mul_overflow(a.value(), k, &r) || r == std::numeric_limits<std::int64_t>::max())
    throw OverflowError();
  return Weight(r);
}
inline Weight wabs(Weight a) { return a < Weight::zero() ? -a : a; }

}  // namespace trop
