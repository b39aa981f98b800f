#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace pwc {

/// ln(e^a + e^b) without overflow; either argument may be -inf.
template <typename Scalar>
inline Scalar log_add_exp(Scalar a, Scalar b) {
  if (a < b) std::swap(a, b);
  if (a == -std::numeric_limits<Scalar>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

/// ln(1 + e^x).
template <typename Scalar>
inline Scalar log1p_exp(Scalar x) {
  if (x > Scalar(0)) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// Two-pass max-shifted ln(sum_i e^{x_i}). Returns -inf for an empty range.
template <typename Scalar>
Scalar log_sum_exp(std::span<const Scalar> xs) {
  constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  Scalar m = kNegInf;
  for (Scalar x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  // Neumaier summation of the shifted exponentials.
  Scalar sum = 0, comp = 0;
  for (Scalar x : xs) {
    const Scalar term = std::exp(x - m);
    const Scalar t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  return m + std::log(sum + comp);
}

/// Streaming max-shifted log-sum-exp accumulator.
template <typename Scalar>
class LogSumAccumulator {
 public:
  void add(Scalar x) {
    if (x == kNegInf) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + Scalar(1);
      max_ = x;
    }
  }
  Scalar result() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  static constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  Scalar max_ = kNegInf;
  Scalar sum_ = 0;
};

/// A nonnegative real stored as its natural logarithm; -inf encodes exact zero.
template <typename Scalar>
class BasicLogReal {
 public:
  constexpr BasicLogReal() = default;

  static constexpr BasicLogReal from_log(Scalar log_value) {
    BasicLogReal r;
    r.log_ = log_value;
    return r;
  }
  static BasicLogReal from_value(Scalar value) { return from_log(std::log(value)); }
  static constexpr BasicLogReal zero() { return BasicLogReal(); }
  static constexpr BasicLogReal one() { return from_log(Scalar(0)); }

  constexpr Scalar log() const { return log_; }
  Scalar value() const { return std::exp(log_); }
  constexpr bool is_zero() const { return log_ == kNegInf; }

  BasicLogReal& operator+=(const BasicLogReal& o) {
    log_ = log_add_exp(log_, o.log_);
    return *this;
  }
  BasicLogReal& operator*=(const BasicLogReal& o) {
    if (is_zero() || o.is_zero())
      log_ = kNegInf;
    else
      log_ += o.log_;
    return *this;
  }
  BasicLogReal& operator/=(const BasicLogReal& o) {
    log_ -= o.log_;
    return *this;
  }

  friend BasicLogReal operator+(BasicLogReal a, const BasicLogReal& b) { return a += b; }
  friend BasicLogReal operator*(BasicLogReal a, const BasicLogReal& b) { return a *= b; }
  friend BasicLogReal operator/(BasicLogReal a, const BasicLogReal& b) { return a /= b; }
  friend constexpr bool operator==(const BasicLogReal& a, const BasicLogReal& b) {
    return a.log_ == b.log_;
  }
  friend constexpr auto operator<=>(const BasicLogReal& a, const BasicLogReal& b) {
    return a.log_ <=> b.log_;
  }

 private:
  static constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  Scalar log_ = kNegInf;
};

using LogReal = BasicLogReal<double>;

}  // namespace pwc
