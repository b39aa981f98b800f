#include "pwc/analysis.hpp"

#include <algorithm>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "pwc/dp.hpp"

namespace pwc {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();

class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0, comp_ = 0;
};

}  // namespace

double binomial_entropy(double eps) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("density outside [0, 1]");
  if (eps == 0.0 || eps == 1.0) return 0.0;
  return -eps * std::log(eps) - (1.0 - eps) * std::log1p(-eps);
}

OmegaCurve OmegaCurve::from_table(const CanonicalTable& table) {
  OmegaCurve c{table.depth, table.spec_id, {}, {}};
  const double scale = static_cast<double>(leaf_count(table.depth));
  for (Eigen::Index a0 = 0; a0 < table.ln_w.size(); ++a0) {
    c.eps.push_back(static_cast<double>(a0) / scale);
    c.omega.push_back(table.ln_w(a0) / scale);
  }
  return c;
}

LegendreResult legendre(const OmegaCurve& omega, double j) {
  if (omega.eps.empty() || omega.eps.size() != omega.omega.size())
    throw std::invalid_argument("legendre needs a nonempty omega grid");
  std::vector<double> v(omega.eps.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = j * omega.eps[i] + omega.omega[i];
  const auto best = std::max_element(v.begin(), v.end());
  if (*best == -kInf) throw std::invalid_argument("omega grid carries no finite values");
  LegendreResult r{*best, omega.eps[static_cast<std::size_t>(best - v.begin())], true};
  for (auto it = v.begin(); it != v.end(); ++it)
    if (it != best && *it >= *best - 1e-9) r.unique = false;
  return r;
}

const char* to_string(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::converged: return "converged";
    case SeriesStatus::divergent: return "divergent";
    case SeriesStatus::unresolved: return "unresolved";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::transition_supported: return "transition-supported";
    case Verdict::no_transition_supported: return "no-transition-supported";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Kappa1Result kappa1(const HSequence& h, int k_max) {
  Kappa1Result r;
  CompensatedSum sum;
  double prev = 0.0;
  double at_half = 0.0;  // term at the last power of two
  for (int k = 1; k <= k_max; ++k) {
    const double log_term = k * kLn2 - h(k);
    r.terms = k;
    if (log_term > 700.0) {
      r.status = SeriesStatus::divergent;
      r.value = kInf;
      break;
    }
    const double term = std::exp(log_term);
    sum.add(term);
    if (sum.value() > 1e15) {
      r.status = SeriesStatus::divergent;
      r.value = kInf;
      break;
    }
    // Terms not tending to zero: no decay across a whole doubling.
    if (std::has_single_bit(static_cast<unsigned>(k))) {
      if (k >= 1024 && term > 0.0 && term >= at_half) {
        r.status = SeriesStatus::divergent;
        r.value = kInf;
        break;
      }
      at_half = term;
    }
    if (k >= 2) {
      const double ratio = prev > 0.0 ? term / prev : 0.0;
      r.tail_bound = ratio < 1.0 ? term * ratio / (1.0 - ratio) : kInf;
      if (r.tail_bound < 1e-15) {
        r.status = SeriesStatus::converged;
        break;
      }
    }
    prev = term;
  }
  if (r.status != SeriesStatus::divergent) r.value = sum.value();
  r.lower_bound = r.status == SeriesStatus::converged ? 2.0 * kLn2 + h(0) - std::log(r.value) : -kInf;
  return r;
}

double kappa2_inner(const HArray& h, int k) {
  CompensatedSum sum;
  for (int l = 0; l < k; ++l) {
    const double log_term = l * kLn2 - h(k, l);
    if (log_term > 700.0) return kInf;
    sum.add(std::exp(log_term));
  }
  return sum.value();
}

Kappa2Result kappa2(const HArray& h, int k_max) {
  if (k_max < 1) throw std::invalid_argument("kappa2 needs k_max >= 1");
  constexpr int kExact = 2000;
  constexpr int kGridPoints = 200;
  Kappa2Result r;
  r.cutoff = k_max;

  std::vector<int> ks;
  for (int k = 1; k <= std::min(kExact, k_max); ++k) ks.push_back(k);
  if (k_max > kExact) {
    const double ratio = std::log(static_cast<double>(k_max) / kExact) / kGridPoints;
    for (int i = 1; i <= kGridPoints; ++i) {
      const int k = static_cast<int>(std::lround(kExact * std::exp(ratio * i)));
      if (k > ks.back()) ks.push_back(std::min(k, k_max));
    }
    if (ks.back() != k_max) ks.push_back(k_max);
  }

  double sup = -kInf;
  int next_doubling = 2;
  for (int k : ks) {
    while (next_doubling < k && next_doubling <= k_max) {
      r.doubling_k.push_back(next_doubling);
      r.doubling_sup.push_back(sup);
      next_doubling *= 2;
    }
    const double inner = kappa2_inner(h, k);
    if (inner > sup) {
      sup = inner;
      r.argsup = k;
    }
    if (sup == kInf) break;
    if (k == next_doubling) {
      r.doubling_k.push_back(k);
      r.doubling_sup.push_back(sup);
      next_doubling *= 2;
    }
  }
  r.value = sup;
  if (sup == kInf) {
    r.status = SeriesStatus::divergent;
    r.tail_bound = kInf;
    r.lower_bound = -kInf;
    return r;
  }

  // Geometric extrapolation of the sup's growth over the last doublings.
  const auto& s = r.doubling_sup;
  r.tail_bound = kInf;
  if (s.size() >= 3) {
    const double d1 = s[s.size() - 2] - s[s.size() - 3];
    const double d2 = s.back() - s[s.size() - 2];
    if (d2 <= 0.0) {
      r.tail_bound = 0.0;
    } else if (d1 > 0.0 && d2 < d1) {
      const double q = d2 / d1;
      r.tail_bound = d2 * q / (1.0 - q);
    }
  }
  r.status = std::isfinite(r.tail_bound) ? SeriesStatus::converged : SeriesStatus::unresolved;
  r.lower_bound = r.status == SeriesStatus::converged ? 2.0 * kLn2 - 2.0 * std::exp(-1.0) * r.value : -kInf;
  return r;
}

namespace {

struct LaplaceSum {
  double value = 0;
  long terms = 0;
  bool divergent = false;
};

constexpr long kLaplaceTermLimit = 200'000'000;

// sum_{k>=first} e^{-s k} x_k for nonnegative x_k, truncated by a block-ratio tail estimate.
LaplaceSum laplace_sum(const std::function<double(long)>& x, double s, long first) {
  const long block = std::max<long>(1, static_cast<long>(std::ceil(1.0 / s)));
  LaplaceSum r;
  CompensatedSum total;
  double prev_block = -1.0;
  for (long start = first;; start += block) {
    CompensatedSum bsum;
    for (long k = start; k < start + block; ++k) {
      const double xk = x(k);
      if (xk > 0.0) bsum.add(std::exp(-s * static_cast<double>(k) + std::log(xk)));
    }
    const double b = bsum.value();
    total.add(b);
    r.terms = start + block - first;
    if (!std::isfinite(total.value()) || total.value() > 1e15) {
      r.divergent = true;
      r.value = kInf;
      return r;
    }
    const double decay = std::exp(-s * static_cast<double>(start + block));
    if (prev_block >= 0.0) {
      if (b == 0.0 && prev_block == 0.0 && decay < 1e-16) break;
      if (prev_block > 0.0 && b < prev_block) {
        const double ratio = b / prev_block;
        if (b * ratio / (1.0 - ratio) < 1e-12) break;
      }
    }
    prev_block = b;
    if (r.terms > kLaplaceTermLimit) break;
  }
  r.value = total.value();
  return r;
}

DiagCurve finish_curve(std::vector<DiagPoint> points) {
  DiagCurve c{std::move(points), true};
  for (std::size_t i = 1; i < c.points.size(); ++i)
    c.increasing = c.increasing && c.points[i].value > c.points[i - 1].value;
  return c;
}

void check_s_grid(const std::vector<double>& s_grid) {
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > 0.0 && s_grid[i] <= 1.0)) throw std::invalid_argument("s-grid values must lie in (0, 1]");
    if (i > 0 && !(s_grid[i] < s_grid[i - 1])) throw std::invalid_argument("s-grid must be decreasing");
  }
}

}  // namespace

std::vector<double> dyadic_s_grid(int lo, int hi) {
  std::vector<double> s;
  for (int i = lo; i <= hi; ++i) s.push_back(std::ldexp(1.0, -i));
  return s;
}

DiagCurve laplace_diag_first(const HSequence& h, const std::vector<double>& s_grid) {
  check_s_grid(s_grid);
  const auto g_plus = [&h](long k) {
    return std::max(0.0, h(static_cast<int>(k)) - kLn2 * static_cast<double>(k));
  };
  std::vector<DiagPoint> out;
  for (double s : s_grid) {
    const LaplaceSum ls = laplace_sum(g_plus, s, 0);
    out.push_back({s, ls.divergent ? -kInf : std::log(1.0 / s) - s * ls.value, ls.divergent, ls.terms});
  }
  return finish_curve(std::move(out));
}

DiagCurve laplace_diag_second(const HArray& h, const std::vector<double>& s_grid) {
  check_s_grid(s_grid);
  std::vector<DiagPoint> out;
  for (double s : s_grid) {
    long terms = 0;
    bool inner_divergent = false;
    // Outer sum over l of e^{-s l} * (sum over d >= 1 of e^{-2 s d} g+_{l,d}).
    const auto outer = [&](long l) {
      const auto g_plus = [&h, l](long d) {
        return std::max(0.0, h(static_cast<int>(l + d), static_cast<int>(l)) - kLn2 * static_cast<double>(l));
      };
      const LaplaceSum inner = laplace_sum(g_plus, 2.0 * s, 1);
      terms += inner.terms;
      inner_divergent = inner_divergent || inner.divergent;
      return inner.divergent ? kInf : inner.value;
    };
    const LaplaceSum ls = laplace_sum(outer, s, 0);
    const bool divergent = ls.divergent || inner_divergent;
    out.push_back({s, divergent ? -kInf : std::log(1.0 / s) - 2.0 * s * s * ls.value, divergent, terms});
  }
  return finish_curve(std::move(out));
}

namespace {

constexpr double kDoublingGrowth = 0.1;
constexpr int kDoublingsChecked = 4;

TauberianResult tauberian_from(const std::function<double(int)>& seq, int k_max) {
  if (k_max < 2) throw std::invalid_argument("tauberian diagnostic needs k_max >= 2");
  TauberianResult r;
  for (int k = 1; k <= k_max; k *= 2) {
    r.k.push_back(k);
    r.value.push_back(seq(k));
    if (k > k_max / 2) break;
  }
  bool growing = r.value.size() > static_cast<std::size_t>(kDoublingsChecked);
  for (std::size_t i = r.value.size() - std::min<std::size_t>(r.value.size() - 1, kDoublingsChecked);
       growing && i < r.value.size(); ++i)
    growing = r.value[i] - r.value[i - 1] >= kDoublingGrowth;
  r.verdict = growing ? Verdict::no_transition_supported : Verdict::inconclusive;
  return r;
}

}  // namespace

TauberianResult tauberian_diag(const HSequence& h, int k_max) {
  return tauberian_from(
      [&h](int k) { return kLn2 * k + std::log(static_cast<double>(k)) - h(k); }, k_max);
}

TauberianResult tauberian_diag(const HArray& h, const HSequence& h1, const HSequence& h2, int k_max) {
  std::vector<int> samples;
  for (int i = 0; i < 32; ++i) samples.push_back(i);
  for (int i = 32; i <= k_max; i *= 2) samples.push_back(i);
  for (int l : samples)
    for (int d : samples) {
      if (d == 0 || !h.available(l + d) || !h1.available(l) || !h2.available(d)) continue;
      const double lhs = h(l + d, l), rhs = h1(l) + h2(d);
      if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(lhs)))
        throw std::invalid_argument("additive decomposition fails at (l, d) = (" + std::to_string(l) +
                                    ", " + std::to_string(d) + ")");
    }
  return tauberian_from(
      [&](int k) { return kLn2 * k + std::log(static_cast<double>(k)) - h1(k) - h2(k / 2); }, k_max);
}

double DeltaPolicy::operator()(int depth, double tail) const {
  if (fixed) return *fixed;
  return std::max(1e-6, tail + depth * kLn2 / static_cast<double>(leaf_count(depth)));
}

double tail_bound(const ClusteringSpec& spec, int depth) {
  std::function<double(int)> gamma;
  if (std::holds_alternative<ZeroSpec>(spec)) return 0.0;
  if (const auto* s = std::get_if<FirstOrderSpec>(&spec)) {
    gamma = [s](int k) { return s->h(k); };
  } else if (const auto* s2 = std::get_if<SecondOrderSpec>(&spec)) {
    gamma = [s2](int k) { return 2.0 * s2->h(k + 1, k); };
  } else {
    throw std::invalid_argument("no finite-size tail bound for the capacity variant");
  }
  CompensatedSum sum;
  for (int k = depth + 1; k <= depth + 2000; ++k) {
    const double term = std::ldexp(gamma(k), -k);
    sum.add(term);
    if (std::abs(term) < 1e-20 * std::max(std::abs(sum.value()), 1e-300) && k > depth + 60) break;
  }
  return 2.0 * sum.value();
}

JStarRow jstar_upper(const ClusteringSpec& spec, int depth, const DeltaPolicy& policy) {
  JStarRow row;
  row.depth = depth;
  row.tail = tail_bound(spec, depth);
  row.delta = policy(depth, row.tail);
  const auto excess = [&](double j) { return dp_zeta(spec, depth, j) - row.tail - row.delta; };

  constexpr double kLimit = 1e4;
  double lo = -1.0, hi = 1.0;
  double g_lo = excess(lo), g_hi = excess(hi);
  while (g_hi <= 0.0 && hi < kLimit) {
    const double next = 2.0 * hi + 1.0, g_next = excess(next);
    if (g_next < g_hi - 1e-12) row.error = "non-monotone bracket near J = " + std::to_string(next);
    lo = hi;
    g_lo = g_hi;
    hi = next;
    g_hi = g_next;
  }
  if (g_hi <= 0.0) {
    row.upper = kInf;
    return row;
  }
  while (g_lo > 0.0 && lo > -kLimit) {
    const double next = 2.0 * lo - 1.0, g_next = excess(next);
    if (g_next > g_lo + 1e-12) row.error = "non-monotone bracket near J = " + std::to_string(next);
    hi = lo;
    g_hi = g_lo;
    lo = next;
    g_lo = g_next;
  }
  if (g_lo > 0.0) {
    row.upper = -kInf;
    row.error = "excess positive down to J = " + std::to_string(lo);
    return row;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi), g_mid = excess(mid);
    if (g_mid < g_lo - 1e-12 || g_mid > g_hi + 1e-12)
      row.error = "non-monotone bracket near J = " + std::to_string(mid);
    if (g_mid > 0.0) {
      hi = mid;
      g_hi = g_mid;
    } else {
      lo = mid;
      g_lo = g_mid;
    }
  }
  row.upper = hi;

  const bool affordable = std::holds_alternative<SecondOrderSpec>(spec) ? depth <= kWGuardSecond
                                                                         : depth <= kWGuardFirst;
  if (affordable) {
    const CanonicalTable w = dp_W(spec, depth);
    double best = kInf;
    for (Eigen::Index a0 = 1; a0 < w.ln_w.size(); ++a0)
      if (std::isfinite(w.ln_w(a0))) best = std::min(best, -w.ln_w(a0) / static_cast<double>(a0));
    row.slope = best;
  }
  return row;
}

namespace {

constexpr double kStableNats = 0.5;
constexpr double kSteadyDecreasePerDepth = -0.1;

}  // namespace

WettingReport estimate_jstar(const ClusteringSpec& spec, const std::vector<int>& depths,
                             const DeltaPolicy& policy) {
  if (depths.empty()) throw std::invalid_argument("estimate_jstar needs at least one depth");
  if (!std::is_sorted(depths.begin(), depths.end()))
    throw std::invalid_argument("estimate_jstar depths must be increasing");
  WettingReport rep;
  rep.spec_id = describe(spec);
  for (int n : depths) rep.rows.push_back(jstar_upper(spec, n, policy));

  if (const auto* s = std::get_if<SecondOrderSpec>(&spec)) {
    const Kappa2Result k2 = kappa2(s->h);
    rep.kappa_name = "kappa2";
    rep.kappa = k2.value;
    rep.kappa_status = k2.status;
    rep.lower_bound = k2.lower_bound;
    rep.notes.push_back("kappa2 sup over k <= " + std::to_string(k2.cutoff) + " attained at k = " +
                        std::to_string(k2.argsup) + "; extrapolated growth beyond cutoff <= " +
                        std::to_string(k2.tail_bound));
    if (!s->h.nondecreasing())
      rep.notes.push_back("h array is not nondecreasing; the kappa2 bound's hypotheses are not met");
  } else {
    const FirstOrderSpec f = as_first_order(spec);
    const Kappa1Result k1 = kappa1(f.h);
    rep.kappa_name = "kappa1";
    rep.kappa = k1.value;
    rep.kappa_status = k1.status;
    rep.lower_bound = k1.lower_bound;
    if (!f.h.nondecreasing())
      rep.notes.push_back("h sequence is not nondecreasing; the kappa1 bound's hypotheses are not met");
  }

  std::vector<const JStarRow*> finite;
  for (const auto& row : rep.rows) {
    if (!row.error.empty()) rep.notes.push_back("depth " + std::to_string(row.depth) + ": " + row.error);
    if (std::isfinite(row.upper)) finite.push_back(&row);
  }
  const JStarRow& last = rep.rows.back();
  const bool stable = rep.rows.size() < 2 ||
                      (finite.size() >= 2 && finite.back() == &last &&
                       std::abs(finite[finite.size() - 1]->upper - finite[finite.size() - 2]->upper) <= kStableNats);
  bool steady_decrease = rep.rows.size() >= 2 && finite.size() == rep.rows.size();
  for (std::size_t i = 1; steady_decrease && i < rep.rows.size(); ++i) {
    const double slope = (rep.rows[i].upper - rep.rows[i - 1].upper) /
                         static_cast<double>(rep.rows[i].depth - rep.rows[i - 1].depth);
    steady_decrease = slope <= kSteadyDecreasePerDepth;
  }

  if (std::isfinite(rep.lower_bound) && std::isfinite(last.upper) && last.upper >= rep.lower_bound && stable)
    rep.verdict = Verdict::transition_supported;
  else if (steady_decrease)
    rep.verdict = Verdict::no_transition_supported;
  else
    rep.verdict = Verdict::inconclusive;
  return rep;
}

Dyadic make_dyadic(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("certificate density t must lie in (0, 1]");
  int q = 0;
  double scaled = t;
  while (scaled != std::floor(scaled)) {
    scaled *= 2.0;
    if (++q > 60) throw std::invalid_argument("t is not a dyadic rational");
  }
  return {static_cast<std::int64_t>(scaled), q};
}

namespace {

using boost::multiprecision::cpp_int;

Rational to_rational(Dyadic t) {
  return Rational(cpp_int(t.p), cpp_int(1) << t.q);
}

bool integral(const Rational& x) { return denominator(x) == 1; }

std::int64_t to_int64(const Rational& x) { return numerator(x).convert_to<std::int64_t>(); }

// a_k, b_k for k = 0..n with b_k / a_k = t (k <= j) or 1 (k > j) and a_n = 1.
void first_order_chain(const Rational& t, int j, int n, std::vector<Rational>& a, std::vector<Rational>& b) {
  a.assign(static_cast<std::size_t>(n) + 1, Rational(0));
  b.assign(static_cast<std::size_t>(n) + 1, Rational(0));
  a[static_cast<std::size_t>(n)] = 1;
  for (int k = n; k >= 1; --k) {
    const Rational tk = k <= j ? t : Rational(1);
    b[static_cast<std::size_t>(k)] = tk * a[static_cast<std::size_t>(k)];
    a[static_cast<std::size_t>(k) - 1] = a[static_cast<std::size_t>(k)] + b[static_cast<std::size_t>(k)];
  }
  b[0] = a[0];
}

Rational rational_pow(const Rational& x, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Second-order cells b_{k,k-d} for 1 <= d <= k <= n, indexed [k][d].
std::vector<std::vector<Rational>> second_order_cells(const Rational& t, int j, int n,
                                                      const std::vector<Rational>& b) {
  std::vector<std::vector<Rational>> cells(static_cast<std::size_t>(n) + 1);
  for (int k = 1; k <= n; ++k) {
    const Rational tk1 = k - 1 <= j ? t : Rational(1);
    auto& row = cells[static_cast<std::size_t>(k)];
    row.assign(static_cast<std::size_t>(k) + 1, Rational(0));
    const Rational two_b = 2 * b[static_cast<std::size_t>(k)];
    for (int d = 1; d < k; ++d) row[static_cast<std::size_t>(d)] = two_b * tk1 * rational_pow(1 - tk1, d - 1);
    row[static_cast<std::size_t>(k)] = two_b * rational_pow(1 - tk1, k - 1);
  }
  return cells;
}

bool first_integral(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  return std::all_of(a.begin(), a.end(), integral) && std::all_of(b.begin(), b.end(), integral);
}

bool second_integral(const std::vector<std::vector<Rational>>& cells) {
  for (const auto& row : cells)
    if (!std::all_of(row.begin(), row.end(), integral)) return false;
  return true;
}

void check_certificate_args(int j) {
  if (j < 0) throw std::invalid_argument("certificate level j must be nonnegative");
}

}  // namespace

int certificate_min_depth_first(Dyadic t, int j) {
  check_certificate_args(j);
  const Rational tr = to_rational(t);
  std::vector<Rational> a, b;
  for (int n = std::max(j, 0); n <= kMaxDepth; ++n) {
    first_order_chain(tr, j, n, a, b);
    if (first_integral(a, b)) return n;
  }
  throw std::invalid_argument("certificate pattern not integral at any depth <= 62");
}

int certificate_min_depth_second(Dyadic t, int j) {
  check_certificate_args(j);
  const Rational tr = to_rational(t);
  std::vector<Rational> a, b;
  for (int n = std::max(j, 1); n <= kMaxDepth; ++n) {
    first_order_chain(tr, j, n, a, b);
    if (first_integral(a, b) && second_integral(second_order_cells(tr, j, n, b))) return n;
  }
  throw std::invalid_argument("certificate pattern not integral at any depth <= 62");
}

Certificate1 certificate_first(Dyadic t, int j, int depth, const HSequence& h) {
  Certificate1 c;
  c.min_depth = certificate_min_depth_first(t, j);
  if (depth < c.min_depth)
    throw std::invalid_argument("certificate pattern needs depth >= " + std::to_string(c.min_depth));
  check_depth(depth);
  std::vector<Rational> a, b;
  first_order_chain(to_rational(t), j, depth, a, b);
  if (!first_integral(a, b))
    throw std::invalid_argument("certificate pattern not integral at depth " + std::to_string(depth));
  c.pattern = Pattern1{depth, {}};
  for (const auto& x : b) c.pattern.b.push_back(to_int64(x));
  if (!c.pattern.is_admissible()) throw std::logic_error("certificate pattern is not admissible");

  CompensatedSum sum;
  for (int k = 1; k <= depth; ++k) {
    const std::int64_t ak = c.pattern.a(k), bk = c.pattern.b[static_cast<std::size_t>(k)];
    const double gk = h(k) - kLn2 * k;
    sum.add(log_binomial(ak, bk) - gk * static_cast<double>(bk));
  }
  c.value = sum.value() / static_cast<double>(c.pattern.cardinality());
  return c;
}

Certificate2 certificate_second(Dyadic t, int j, int depth, const HArray& h) {
  Certificate2 c;
  c.min_depth = certificate_min_depth_second(t, j);
  if (depth < c.min_depth)
    throw std::invalid_argument("certificate pattern needs depth >= " + std::to_string(c.min_depth));
  check_depth(depth);
  const Rational tr = to_rational(t);
  std::vector<Rational> a, b;
  first_order_chain(tr, j, depth, a, b);
  const auto cells = second_order_cells(tr, j, depth, b);
  if (!first_integral(a, b) || !second_integral(cells))
    throw std::invalid_argument("certificate pattern not integral at depth " + std::to_string(depth));

  c.pattern = Pattern2(depth);
  for (int k = 1; k <= depth; ++k)
    for (int d = 1; d <= k; ++d) c.pattern(k, k - d) = to_int64(cells[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)]);
  c.pattern(depth + 1, depth) = 1;
  if (!c.pattern.is_consistent()) throw std::logic_error("certificate pattern is not consistent");
  const Pattern1 first = c.pattern.first_order();
  for (int k = 0; k <= depth; ++k)
    if (first.b[static_cast<std::size_t>(k)] != to_int64(b[static_cast<std::size_t>(k)]))
      throw std::logic_error("certificate column sums disagree with the first-order chain");

  CompensatedSum sum;
  for (int k = 1; k <= depth; ++k) {
    const std::int64_t bk = first.b[static_cast<std::size_t>(k)];
    double term = log_factorial(2 * bk);
    for (int d = 1; d <= k; ++d) {
      const std::int64_t cell = c.pattern(k, k - d);
      term -= log_factorial(cell);
      if (cell != 0) term -= (h(k, k - d) - kLn2 * (k - d)) * static_cast<double>(cell);
    }
    sum.add(term);
  }
  c.value = sum.value() / static_cast<double>(first.cardinality());
  return c;
}

namespace {

double phi_entropy(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return -t * std::log(t) - (1.0 - t) * std::log1p(-t);
}

double certificate_tail(double weight, const std::function<double(int)>& term, int from) {
  CompensatedSum sum;
  for (int k = from; k < from + 1100; ++k) {
    const double x = std::ldexp(weight, -(k - from)) * term(k);
    sum.add(x);
    if (k > from + 60 && std::abs(x) < 1e-18 * std::max(1.0, std::abs(sum.value()))) break;
  }
  return sum.value();
}

}  // namespace

double certificate_first_limit(double t, int j, const HSequence& h) {
  check_certificate_args(j);
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("certificate density t must lie in (0, 1]");
  const double phi_t = phi_entropy(t);
  CompensatedSum sum;
  for (int k = 1; k <= j; ++k) sum.add(std::pow(1.0 + t, -k) * (phi_t - t * (h(k) - kLn2 * k)));
  // Levels above j branch fully: b_k / a0 = (1+t)^{-j} 2^{j-k}.
  const double w = std::pow(1.0 + t, -j);
  sum.add(-certificate_tail(w / 2.0, [&h](int k) { return h(k) - kLn2 * k; }, j + 1));
  return sum.value();
}

double certificate_second_limit(double t, int j, const HArray& h) {
  check_certificate_args(j);
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("certificate density t must lie in (0, 1]");
  const auto g = [&h](int l, int d) { return h(l + d, l) - kLn2 * l; };
  // Levels k <= j + 1 split their 2 b_k children geometrically; weight is 2 b_k / a0.
  const auto level = [&](int k, double weight) {
    double entropy = 0.0, energy = 0.0;
    for (int d = 1; d <= k; ++d) {
      const double p = d < k ? t * std::pow(1.0 - t, d - 1) : std::pow(1.0 - t, k - 1);
      if (p <= 0.0) continue;
      entropy -= p * std::log(p);
      energy += p * g(k - d, d);
    }
    return weight * (entropy - energy);
  };
  CompensatedSum sum;
  for (int k = 1; k <= j; ++k) sum.add(level(k, 2.0 * t * std::pow(1.0 + t, -k)));
  const double w = std::pow(1.0 + t, -j);
  sum.add(level(j + 1, w));
  sum.add(-certificate_tail(w / 2.0, [&g](int k) { return g(k - 1, 1); }, j + 2));
  return sum.value();
}

}  // namespace pwc
