#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pwc/logreal.hpp"
#include "pwc/tree.hpp"

namespace pwc {

using BigCount = boost::multiprecision::cpp_int;

/// First-order branching pattern (b_0, ..., b_n): b_k branching points of age k.
struct Pattern1 {
  int depth = 0;
  std::vector<std::int64_t> b;

  /// Population at age k or older: a_k = 1 + sum_{j>k} b_j.
  std::int64_t a(int k) const;
  std::int64_t cardinality() const { return b.empty() ? 0 : b[0]; }

  /// b_k <= a_k for k = 1..n and b_0 = a_0.
  bool is_admissible() const;

  friend bool operator==(const Pattern1&, const Pattern1&) = default;
  friend auto operator<=>(const Pattern1&, const Pattern1&) = default;
};

/// Second-order branching pattern: b(k, l) for 0 <= l < k <= n + 1 counts branching
/// points of age l whose direct branching ancestor has age k; the oldest branching
/// point is attached to the virtual age n + 1.
class Pattern2 {
 public:
  Pattern2() = default;
  explicit Pattern2(int depth);

  int depth() const { return depth_; }
  std::int64_t& operator()(int k, int l);
  std::int64_t operator()(int k, int l) const;

  /// b_l = sum_{k>l} b(k, l).
  std::int64_t column_sum(int l) const;
  /// sum_{l<k} b(k, l).
  std::int64_t row_sum(int k) const;

  /// Induced first-order pattern via the column sums.
  Pattern1 first_order() const;

  /// 2 b_k = sum_{l<k} b(k, l) for k = 1..n, a single top branching point, and no
  /// branching above it.
  bool is_consistent() const;

  friend bool operator==(const Pattern2&, const Pattern2&) = default;
  friend auto operator<=>(const Pattern2&, const Pattern2&) = default;

 private:
  std::size_t index(int k, int l) const;

  int depth_ = 0;
  std::vector<std::int64_t> cells_;
};

Pattern1 pattern1_of(const LeafSet& a);
Pattern2 pattern2_of(const LeafSet& a);

/// ln N(b), N(b) = prod_{k=1..n} C(a_k, b_k) 2^(a_k - b_k).
LogReal entropy1(const Pattern1& p);
/// ln N(b), N(b) = prod_{j=1..n} (2 b_j)! / prod_l b(j, l)! * 2^(a_j - b_j).
LogReal entropy2(const Pattern2& p);

/// Exact integer entropies, depth <= 6.
BigCount entropy1_exact(const Pattern1& p);
BigCount entropy2_exact(const Pattern2& p);

/// ln x! via a cached table for small x and lgamma beyond.
double log_factorial(std::int64_t x);
double log_binomial(std::int64_t n, std::int64_t k);
BigCount binomial_exact(std::int64_t n, std::int64_t k);

/// Lazily enumerates every admissible first-order pattern for a given cardinality.
class Pattern1Stream {
 public:
  Pattern1Stream(int depth, std::int64_t a0);

  std::optional<Pattern1> next();

 private:
  bool fill_from(int k);
  std::int64_t lowest(int k) const;
  std::int64_t highest(int k) const;

  int depth_;
  std::int64_t a0_;
  std::vector<std::int64_t> b_;
  std::vector<std::int64_t> a_;  // a_[k] = population at age k
  bool started_ = false;
  bool done_ = false;
};

inline Pattern1Stream enumerate_patterns1(int depth, std::int64_t a0) {
  return Pattern1Stream(depth, a0);
}

}  // namespace pwc
