#include "pwc/dp.hpp"

#include <map>
#include <numbers>
#include <stdexcept>

#include "pwc/patterns.hpp"

namespace pwc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

void check_table_inputs(int depth, const std::string& what) {
  check_depth(depth);
  if (depth > 60) throw std::invalid_argument(what + ": depth above 60 overflows the recursion");
}

void check_guard(int depth, int guard, const std::string& what) {
  check_depth(depth);
  if (depth > guard)
    throw std::invalid_argument(what + ": depth " + std::to_string(depth) +
                                " exceeds the cost guard " + std::to_string(guard));
}

// c[m] = ln sum_{i+k=m} e^{y[i] + y[k]}, with y[0] = -inf.
std::vector<double> log_self_convolve(const std::vector<double>& y) {
  const std::size_t top = y.size() - 1;
  std::vector<double> c(2 * top + 1, kNegInf);
  std::vector<double> terms;
  terms.reserve(top);
  for (std::size_t m = 2; m <= 2 * top; ++m) {
    terms.clear();
    const std::size_t lo = m > top ? m - top : 1;
    const std::size_t hi = std::min(top, m - 1);
    for (std::size_t i = lo; i <= hi; ++i) terms.push_back(y[i] + y[m - i]);
    c[m] = log_sum_exp<double>(terms);
  }
  return c;
}

CanonicalTable finish_table(int depth, std::string id, const std::vector<double>& y, double h_const) {
  CanonicalTable t{depth, std::move(id), Eigen::VectorXd(static_cast<Eigen::Index>(y.size()))};
  t.ln_w(0) = 0.0;
  for (std::size_t m = 1; m < y.size(); ++m) t.ln_w(static_cast<Eigen::Index>(m)) = y[m] - h_const;
  return t;
}

}  // namespace

std::vector<double> first_order_table(const HSequence& h, int depth, double j) {
  check_table_inputs(depth, "first-order recursion");
  std::vector<double> y(static_cast<std::size_t>(depth) + 1);
  y[0] = j - h(0);
  for (int d = 1; d <= depth; ++d) {
    const double prev = y[static_cast<std::size_t>(d) - 1];
    y[static_cast<std::size_t>(d)] = log_add_exp(kLn2 + prev, -h(d) + 2.0 * prev);
  }
  return y;
}

std::vector<std::vector<double>> second_order_table(const HArray& h, int depth, double j) {
  check_table_inputs(depth, "second-order recursion");
  const std::size_t n = static_cast<std::size_t>(depth);
  std::vector<std::vector<double>> f(n + 1, std::vector<double>(n + 2, kNegInf));
  for (int a = 1; a <= depth + 1; ++a) f[0][static_cast<std::size_t>(a)] = j - h(a, 0);
  for (int d = 1; d <= depth; ++d) {
    const auto& prev = f[static_cast<std::size_t>(d) - 1];
    const double both = 2.0 * prev[static_cast<std::size_t>(d)];
    for (int a = d + 1; a <= depth + 1; ++a)
      f[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)] =
          log_add_exp(kLn2 + prev[static_cast<std::size_t>(a)], -h(a, d) + both);
  }
  return f;
}

LogReal dp_Z_first(const HSequence& h, double h_const, int depth, double j) {
  const auto y = first_order_table(h, depth, j);
  return LogReal::from_log(log1p_exp(-h_const + y.back()));
}

LogReal dp_Z_second(const HArray& h, double h_const, int depth, double j) {
  const auto f = second_order_table(h, depth, j);
  return LogReal::from_log(log1p_exp(-h_const + f.back()[static_cast<std::size_t>(depth) + 1]));
}

ZDerivPair dp_Z_deriv_first(const HSequence& h, double h_const, int depth, double j) {
  const auto y = first_order_table(h, depth, j);
  // dlog[d] = d ln Y_d / dJ.
  double dlog = 1.0;
  for (int d = 1; d <= depth; ++d) {
    const double prev = y[static_cast<std::size_t>(d) - 1], cur = y[static_cast<std::size_t>(d)];
    dlog *= std::exp(kLn2 + prev - cur) + 2.0 * std::exp(-h(d) + 2.0 * prev - cur);
  }
  const double x = -h_const + y.back();
  const double nonempty = 1.0 / (1.0 + std::exp(-x));
  return {LogReal::from_log(log1p_exp(x)), nonempty * dlog};
}

ZDerivPair dp_Z_deriv_second(const HArray& h, double h_const, int depth, double j) {
  const auto f = second_order_table(h, depth, j);
  const std::size_t n = static_cast<std::size_t>(depth);
  std::vector<double> dlog(n + 2, 0.0), next(n + 2, 0.0);
  for (std::size_t a = 1; a <= n + 1; ++a) dlog[a] = 1.0;
  for (std::size_t d = 1; d <= n; ++d) {
    const auto& prev = f[d - 1];
    const auto& cur = f[d];
    for (std::size_t a = d + 1; a <= n + 1; ++a)
      next[a] = std::exp(kLn2 + prev[a] - cur[a]) * dlog[a] +
                2.0 * std::exp(-h(static_cast<int>(a), static_cast<int>(d)) + 2.0 * prev[d] - cur[a]) *
                    dlog[d];
    std::swap(dlog, next);
  }
  const double x = -h_const + f[n][n + 1];
  const double nonempty = 1.0 / (1.0 + std::exp(-x));
  return {LogReal::from_log(log1p_exp(x)), nonempty * dlog[n + 1]};
}

namespace {

// ln(count) per (size, resistance from the subtree root down to A).
using CapacityStates = std::map<std::pair<std::int64_t, double>, double>;

void add_state(CapacityStates& states, std::int64_t size, double resistance, double log_count) {
  auto [it, inserted] = states.try_emplace({size, resistance}, log_count);
  if (!inserted) it->second = log_add_exp(it->second, log_count);
}

CapacityStates capacity_states(const CapacitySpec& spec, int depth, int guard) {
  check_guard(depth, guard, "capacity recursion");
  if (depth < 1) throw std::invalid_argument("capacity recursion needs depth >= 1");
  const ConductanceProfile prof = profile_for(spec, depth);
  const Eigen::VectorXd r = prof.resistance();
  CapacityStates states{{{1, 0.0}, 0.0}};
  for (int d = 1; d <= depth; ++d) {
    const double edge = r(d - 1);
    CapacityStates next;
    for (const auto& [key, count] : states) add_state(next, key.first, edge + key.second, kLn2 + count);
    for (const auto& [k1, c1] : states)
      for (const auto& [k2, c2] : states) {
        const double x = edge + k1.second, y = edge + k2.second;
        add_state(next, k1.first + k2.first, x * y / (x + y), c1 + c2);
      }
    states = std::move(next);
  }
  return states;
}

}  // namespace

LogReal dp_Z_capacity(const CapacitySpec& spec, int depth, double j, int guard) {
  LogSumAccumulator<double> acc;
  acc.add(0.0);
  for (const auto& [key, count] : capacity_states(spec, depth, guard))
    acc.add(count + j * static_cast<double>(key.first) - 1.0 / key.second);
  return LogReal::from_log(acc.result());
}

CanonicalTable dp_W_capacity(const CapacitySpec& spec, int depth, int guard) {
  std::vector<LogSumAccumulator<double>> acc(leaf_count(depth) + 1);
  acc[0].add(0.0);
  for (const auto& [key, count] : capacity_states(spec, depth, guard))
    acc[static_cast<std::size_t>(key.first)].add(count - 1.0 / key.second);
  CanonicalTable t{depth, describe(spec), Eigen::VectorXd(static_cast<Eigen::Index>(acc.size()))};
  for (std::size_t m = 0; m < acc.size(); ++m) t.ln_w(static_cast<Eigen::Index>(m)) = acc[m].result();
  return t;
}

FirstOrderSpec as_first_order(const ClusteringSpec& spec) {
  if (std::holds_alternative<ZeroSpec>(spec))
    return {HSequence::closed_form("zero", [](int) { return 0.0; }, true), 0.0};
  if (const auto* s = std::get_if<FirstOrderSpec>(&spec)) return *s;
  throw std::invalid_argument("spec " + describe(spec) + " is not first order");
}

LogReal dp_Z(const ClusteringSpec& spec, int depth, double j) {
  if (const auto* s = std::get_if<SecondOrderSpec>(&spec))
    return dp_Z_second(s->h, constant_term(*s, depth), depth, j);
  if (const auto* s = std::get_if<CapacitySpec>(&spec)) return dp_Z_capacity(*s, depth, j);
  const FirstOrderSpec f = as_first_order(spec);
  return dp_Z_first(f.h, constant_term(f, depth), depth, j);
}

double dp_zeta(const ClusteringSpec& spec, int depth, double j) {
  return dp_Z(spec, depth, j).log() / static_cast<double>(leaf_count(depth));
}

double dp_density(const ClusteringSpec& spec, int depth, double j) {
  ZDerivPair zd;
  if (const auto* s = std::get_if<SecondOrderSpec>(&spec)) {
    zd = dp_Z_deriv_second(s->h, constant_term(*s, depth), depth, j);
  } else if (std::holds_alternative<CapacitySpec>(spec)) {
    throw std::invalid_argument("density recursion not available for the capacity variant");
  } else {
    const FirstOrderSpec f = as_first_order(spec);
    zd = dp_Z_deriv_first(f.h, constant_term(f, depth), depth, j);
  }
  return zd.dlogz_dj / static_cast<double>(leaf_count(depth));
}

CanonicalTable dp_W_first(const HSequence& h, double h_const, int depth, int guard) {
  check_guard(depth, guard, "dp_W_first");
  std::vector<double> y{kNegInf, -h(0)};
  for (int d = 1; d <= depth; ++d) {
    std::vector<double> next = log_self_convolve(y);
    for (double& v : next) v += -h(d);
    for (std::size_t m = 1; m < y.size(); ++m) next[m] = log_add_exp(next[m], kLn2 + y[m]);
    y = std::move(next);
  }
  return finish_table(depth, "first:" + h.name(), y, h_const);
}

CanonicalTable dp_W_second(const HArray& h, double h_const, int depth, int guard) {
  check_guard(depth, guard, "dp_W_second");
  const std::size_t n = static_cast<std::size_t>(depth);
  // y[a] = size-indexed table for the current depth with ancestor age a.
  std::vector<std::vector<double>> y(n + 2);
  for (int a = 1; a <= depth + 1; ++a) y[static_cast<std::size_t>(a)] = {kNegInf, -h(a, 0)};
  for (int d = 1; d <= depth; ++d) {
    const std::vector<double> conv = log_self_convolve(y[static_cast<std::size_t>(d)]);
    for (int a = d + 1; a <= depth + 1; ++a) {
      auto& row = y[static_cast<std::size_t>(a)];
      std::vector<double> next(conv.size());
      const double ha = h(a, d);
      for (std::size_t m = 0; m < conv.size(); ++m) next[m] = conv[m] - ha;
      for (std::size_t m = 1; m < row.size(); ++m) next[m] = log_add_exp(next[m], kLn2 + row[m]);
      row = std::move(next);
    }
  }
  return finish_table(depth, "second:" + h.name(), y[n + 1], h_const);
}

CanonicalTable dp_W(const ClusteringSpec& spec, int depth, bool override_guards) {
  if (const auto* s = std::get_if<SecondOrderSpec>(&spec)) {
    auto t = dp_W_second(s->h, constant_term(*s, depth), depth, override_guards ? depth : kWGuardSecond);
    t.spec_id = describe(spec);
    return t;
  }
  if (const auto* s = std::get_if<CapacitySpec>(&spec))
    return dp_W_capacity(*s, depth, override_guards ? depth : kCapacityGuard);
  const FirstOrderSpec f = as_first_order(spec);
  auto t = dp_W_first(f.h, constant_term(f, depth), depth, override_guards ? depth : kWGuardFirst);
  t.spec_id = describe(spec);
  return t;
}

namespace {

enum class Semiring { sum, max };

// G[a] over a_k, from a_n = 1 down to a_0; each level k adds b_k new branching points.
CanonicalTable pattern_chain(const HSequence& h, double h_const, int depth, int guard, Semiring ring,
                             const std::string& what) {
  check_guard(depth, guard, what);
  const std::size_t top = leaf_count(depth);
  std::vector<double> g(top + 1, kNegInf);
  g[1] = 0.0;
  for (int k = depth; k >= 1; --k) {
    const double hk = h(k);
    const std::size_t reach = std::size_t{1} << (depth - k);  // a_k <= 2^{n-k}
    std::vector<LogSumAccumulator<double>> sum(ring == Semiring::sum ? top + 1 : 0);
    std::vector<double> best(ring == Semiring::max ? top + 1 : 0, kNegInf);
    for (std::size_t a = 1; a <= reach; ++a) {
      if (g[a] == kNegInf) continue;
      const auto ia = static_cast<std::int64_t>(a);
      for (std::int64_t b = 0; b <= ia; ++b) {
        const double term = g[a] + log_binomial(ia, b) + static_cast<double>(ia - b) * kLn2 -
                            hk * static_cast<double>(b);
        const std::size_t to = a + static_cast<std::size_t>(b);
        if (ring == Semiring::sum)
          sum[to].add(term);
        else
          best[to] = std::max(best[to], term);
      }
    }
    if (ring == Semiring::sum)
      for (std::size_t a = 0; a <= top; ++a) g[a] = sum[a].result();
    else
      g = std::move(best);
  }
  CanonicalTable t{depth, "first:" + h.name(), Eigen::VectorXd(static_cast<Eigen::Index>(top + 1))};
  t.ln_w(0) = 0.0;
  for (std::size_t a = 1; a <= top; ++a)
    t.ln_w(static_cast<Eigen::Index>(a)) = g[a] - h(0) * static_cast<double>(a) - h_const;
  return t;
}

}  // namespace

CanonicalTable dp_W_patterns(const HSequence& h, double h_const, int depth, int guard) {
  return pattern_chain(h, h_const, depth, guard, Semiring::sum, "dp_W_patterns");
}

CanonicalTable dp_W_maxterm(const HSequence& h, double h_const, int depth, int guard) {
  return pattern_chain(h, h_const, depth, guard, Semiring::max, "dp_W_maxterm");
}

}  // namespace pwc
