#include "pwc/patterns.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pwc {

std::int64_t Pattern1::a(int k) const {
  std::int64_t s = 1;
  for (int j = k + 1; j <= depth; ++j) s += b[static_cast<std::size_t>(j)];
  return s;
}

bool Pattern1::is_admissible() const {
  if (depth < 0 || b.size() != static_cast<std::size_t>(depth) + 1) return false;
  if (std::any_of(b.begin(), b.end(), [](std::int64_t x) { return x < 0; })) return false;
  std::int64_t a_k = 1;  // a_n
  for (int k = depth; k >= 1; --k) {
    if (b[static_cast<std::size_t>(k)] > a_k) return false;
    a_k += b[static_cast<std::size_t>(k)];
  }
  return b[0] == a_k;
}

Pattern2::Pattern2(int depth) : depth_(depth) {
  check_depth(depth);
  cells_.assign(static_cast<std::size_t>(depth + 1) * static_cast<std::size_t>(depth + 2) / 2, 0);
}

std::size_t Pattern2::index(int k, int l) const {
  if (k < 1 || k > depth_ + 1 || l < 0 || l >= k)
    throw std::out_of_range("second-order pattern index (" + std::to_string(k) + "," +
                            std::to_string(l) + ") out of range");
  return static_cast<std::size_t>(k) * static_cast<std::size_t>(k - 1) / 2 +
         static_cast<std::size_t>(l);
}

std::int64_t& Pattern2::operator()(int k, int l) { return cells_[index(k, l)]; }
std::int64_t Pattern2::operator()(int k, int l) const { return cells_[index(k, l)]; }

std::int64_t Pattern2::column_sum(int l) const {
  std::int64_t s = 0;
  for (int k = l + 1; k <= depth_ + 1; ++k) s += (*this)(k, l);
  return s;
}

std::int64_t Pattern2::row_sum(int k) const {
  std::int64_t s = 0;
  for (int l = 0; l < k; ++l) s += (*this)(k, l);
  return s;
}

Pattern1 Pattern2::first_order() const {
  Pattern1 p{depth_, std::vector<std::int64_t>(static_cast<std::size_t>(depth_) + 1)};
  for (int l = 0; l <= depth_; ++l) p.b[static_cast<std::size_t>(l)] = column_sum(l);
  return p;
}

bool Pattern2::is_consistent() const {
  if (std::any_of(cells_.begin(), cells_.end(), [](std::int64_t x) { return x < 0; }))
    return false;
  if (row_sum(depth_ + 1) != 1) return false;
  int top = 0;
  for (int l = 0; l <= depth_; ++l)
    if ((*this)(depth_ + 1, l) == 1) top = l;
  for (int k = 1; k <= depth_; ++k) {
    if (row_sum(k) != 2 * column_sum(k)) return false;
    if (k > top && column_sum(k) != 0) return false;
  }
  return true;
}

Pattern1 pattern1_of(const LeafSet& a) {
  if (a.empty()) throw std::invalid_argument("branching pattern of an empty set");
  Pattern1 p{a.depth(), std::vector<std::int64_t>(static_cast<std::size_t>(a.depth()) + 1)};
  for (const VertexId& v : branching_points(a)) ++p.b[static_cast<std::size_t>(v.age)];
  return p;
}

Pattern2 pattern2_of(const LeafSet& a) {
  if (a.empty()) throw std::invalid_argument("branching pattern of an empty set");
  const int n = a.depth();
  const auto points = branching_points(a);
  const auto less = [](const VertexId& x, const VertexId& y) {
    return x.age != y.age ? x.age < y.age : x.position < y.position;
  };
  Pattern2 p(n);
  for (const VertexId& u : points) {
    int anc = n + 1;
    for (int age = u.age + 1; age <= n; ++age) {
      if (std::binary_search(points.begin(), points.end(), ancestor(u, age), less)) {
        anc = age;
        break;
      }
    }
    ++p(anc, u.age);
  }
  return p;
}

double log_factorial(std::int64_t x) {
  if (x < 0) throw std::invalid_argument("factorial of a negative number");
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (std::size_t i = 2; i < t.size(); ++i) t[i] = std::lgamma(static_cast<double>(i) + 1.0);
    return t;
  }();
  if (x < static_cast<std::int64_t>(table.size())) return table[static_cast<std::size_t>(x)];
  return std::lgamma(static_cast<double>(x) + 1.0);
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

BigCount binomial_exact(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigCount r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

namespace {

BigCount factorial_exact(std::int64_t x) {
  BigCount r = 1;
  for (std::int64_t i = 2; i <= x; ++i) r *= i;
  return r;
}

void require_exact_scale(int depth) {
  if (depth > 6) throw std::invalid_argument("exact entropy path limited to depth <= 6");
}

}  // namespace

LogReal entropy1(const Pattern1& p) {
  if (!p.is_admissible()) throw std::invalid_argument("entropy of an inadmissible pattern");
  double s = 0.0;
  std::int64_t a_k = 1;
  for (int k = p.depth; k >= 1; --k) {
    const std::int64_t b_k = p.b[static_cast<std::size_t>(k)];
    s += log_binomial(a_k, b_k) + static_cast<double>(a_k - b_k) * std::numbers::ln2;
    a_k += b_k;
  }
  return LogReal::from_log(s);
}

BigCount entropy1_exact(const Pattern1& p) {
  require_exact_scale(p.depth);
  if (!p.is_admissible()) throw std::invalid_argument("entropy of an inadmissible pattern");
  BigCount n = 1;
  std::int64_t a_k = 1;
  for (int k = p.depth; k >= 1; --k) {
    const std::int64_t b_k = p.b[static_cast<std::size_t>(k)];
    n *= binomial_exact(a_k, b_k);
    n <<= static_cast<unsigned>(a_k - b_k);
    a_k += b_k;
  }
  return n;
}

LogReal entropy2(const Pattern2& p) {
  if (!p.is_consistent()) throw std::invalid_argument("entropy of an inconsistent pattern");
  const Pattern1 first = p.first_order();
  double s = 0.0;
  for (int j = 1; j <= p.depth(); ++j) {
    const std::int64_t b_j = first.b[static_cast<std::size_t>(j)];
    s += log_factorial(2 * b_j);
    for (int l = 0; l < j; ++l) s -= log_factorial(p(j, l));
    s += static_cast<double>(first.a(j) - b_j) * std::numbers::ln2;
  }
  return LogReal::from_log(s);
}

BigCount entropy2_exact(const Pattern2& p) {
  require_exact_scale(p.depth());
  if (!p.is_consistent()) throw std::invalid_argument("entropy of an inconsistent pattern");
  const Pattern1 first = p.first_order();
  BigCount n = 1;
  for (int j = 1; j <= p.depth(); ++j) {
    const std::int64_t b_j = first.b[static_cast<std::size_t>(j)];
    BigCount multinomial = factorial_exact(2 * b_j);
    for (int l = 0; l < j; ++l) multinomial /= factorial_exact(p(j, l));
    n *= multinomial;
    n <<= static_cast<unsigned>(first.a(j) - b_j);
  }
  return n;
}

Pattern1Stream::Pattern1Stream(int depth, std::int64_t a0)
    : depth_(depth),
      a0_(a0),
      b_(static_cast<std::size_t>(depth) + 1, 0),
      a_(static_cast<std::size_t>(depth) + 1, 0) {
  check_depth(depth);
  if (a0 < 0 || static_cast<std::uint64_t>(a0) > leaf_count(depth))
    throw std::invalid_argument("pattern cardinality " + std::to_string(a0) +
                                " outside [0, 2^depth]");
}

// Completions from a_{k-1} exist iff a_{k-1} <= a0 <= a_{k-1} 2^{k-1}.
std::int64_t Pattern1Stream::lowest(int k) const {
  const std::int64_t cap = std::int64_t{1} << (k - 1);
  const std::int64_t need = (a0_ + cap - 1) / cap;
  return std::max<std::int64_t>(0, need - a_[static_cast<std::size_t>(k)]);
}

std::int64_t Pattern1Stream::highest(int k) const {
  const std::int64_t a_k = a_[static_cast<std::size_t>(k)];
  return std::min(a_k, a0_ - a_k);
}

bool Pattern1Stream::fill_from(int k) {
  for (int i = k; i >= 1; --i) {
    const std::int64_t lo = lowest(i);
    if (lo > highest(i)) return false;
    b_[static_cast<std::size_t>(i)] = lo;
    a_[static_cast<std::size_t>(i) - 1] = a_[static_cast<std::size_t>(i)] + lo;
  }
  return true;
}

std::optional<Pattern1> Pattern1Stream::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    a_[static_cast<std::size_t>(depth_)] = 1;
    if (a0_ < 1 || !fill_from(depth_)) {
      done_ = true;
      return std::nullopt;
    }
  } else {
    bool advanced = false;
    for (int i = 1; i <= depth_ && !advanced; ++i) {
      if (b_[static_cast<std::size_t>(i)] < highest(i)) {
        ++b_[static_cast<std::size_t>(i)];
        a_[static_cast<std::size_t>(i) - 1] = a_[static_cast<std::size_t>(i)] + b_[static_cast<std::size_t>(i)];
        advanced = fill_from(i - 1);
      }
    }
    if (!advanced) {
      done_ = true;
      return std::nullopt;
    }
  }
  b_[0] = a_[0];
  return Pattern1{depth_, b_};
}

}  // namespace pwc
