// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "pwc/analysis.hpp"
#include "pwc/capacity.hpp"
#include "pwc/dp.hpp"
#include "pwc/oracle.hpp"
#include "pwc/sampler.hpp"
#include "pwc/verify.hpp"

using namespace pwc;

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string suite_text(const SuiteResult& s) {
  std::string out = s.name + " " + std::to_string(s.failures.size()) + "/" + std::to_string(s.checks) + " failed";
  if (!s.failures.empty()) out += " (first: " + s.failures.front() + ")";
  return out;
}

void require_suite(Outcome& o, const SuiteResult& s) {
  o.require(s.ok() && s.checks > 0, suite_text(s));
}

Outcome zero_closed_form() {
  Outcome o;
  double worst_zeta = 0, worst_rho = 0;
  for (int n = 1; n <= 20; ++n)
    for (int j = -3; j <= 3; ++j) {
      worst_zeta = std::max(worst_zeta, std::abs(dp_zeta(ZeroSpec{}, n, j) - std::log1p(std::exp(j))));
      worst_rho = std::max(worst_rho, std::abs(dp_density(ZeroSpec{}, n, j) - 1 / (1 + std::exp(-j))));
    }
  o.require(worst_zeta < 1e-10, "zeta error " + fmt(worst_zeta));
  o.require(worst_rho < 1e-10, "rho error " + fmt(worst_rho));
  o.detail = "max |zeta err| " + fmt(worst_zeta) + ", max |rho err| " + fmt(worst_rho) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const VerifyOptions opt{4, 50, 2024, 1e-9};
  for (const char* variant : {"first", "second", "capacity"}) require_suite(o, verify_z_and_w(variant, opt));
  if (o.pass) o.detail = "3 variants x n=1..4 x 50 draws, Z and W within 1e-9";
  return o;
}

Outcome entropy_completeness() {
  Outcome o;
  require_suite(o, verify_entropy_first(4));
  require_suite(o, verify_entropy_second(3));
  require_suite(o, verify_patterns(4));
  if (o.pass) o.detail = "exact sums equal C(2^n, a0) for n <= 4 (first order), n <= 3 (second order)";
  return o;
}

Outcome monotonicity() {
  Outcome o;
  const SuiteResult suite = verify_monotone(VerifyOptions{3, 3, 11, 1e-9});
  require_suite(o, suite);
  const FirstOrderSpec decreasing{HSequence::from_values({2, 1, 0}), 0.0};
  const MonotoneReport bad = check_monotone(decreasing, 2);
  const bool witnessed = std::any_of(bad.violations.begin(), bad.violations.end(), [](const auto& v) {
    return v.condition == 'a' && v.phi_a > v.phi_b && is_more_clustered(v.a, v.b) == Clustered::yes;
  });
  o.require(witnessed, "no violation witness for decreasing h");
  if (o.pass)
    o.detail = std::to_string(suite.checks) + " pairs clean, decreasing h gives " +
               std::to_string(bad.violations.size()) + " witnesses";
  return o;
}

Outcome capacity() {
  Outcome o;
  std::mt19937_64 rng(505);
  double worst_rel = 0;
  int subadditive_fail = 0, linear_fail = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const ConductanceProfile prof = profile_for(random_capacity(rng, n), n);
    std::bernoulli_distribution keep(0.4);
    std::vector<LeafIndex> a, b;
    for (LeafIndex u = 0; u < leaf_count(n); ++u) (keep(rng) ? a : b).push_back(u);
    if (a.empty()) {
      a.push_back(b.back());
      b.pop_back();
    } else if (b.empty()) {
      b.push_back(a.back());
      a.pop_back();
    }
    const LeafSet sa(n, a), sb(n, b);
    for (const LeafSet& s : {sa, sb}) {
      const double r = cap_reduce(s, prof), q = cap_quadratic(s, prof);
      worst_rel = std::max(worst_rel, std::abs(r - q) / q);
      if (!(r <= prof.conductance(0) * static_cast<double>(s.size()) * (1 + 1e-12))) ++linear_fail;
    }
    std::vector<LeafIndex> both(a);
    both.insert(both.end(), b.begin(), b.end());
    const LeafSet u(n, both);
    if (!(cap_reduce(u, prof) <= (cap_reduce(sa, prof) + cap_reduce(sb, prof)) * (1 + 1e-12))) ++subadditive_fail;
  }
  o.require(worst_rel < 1e-9, "reduce vs quadratic " + fmt(worst_rel));
  o.require(subadditive_fail == 0, std::to_string(subadditive_fail) + " subadditivity failures");
  o.require(linear_fail == 0, std::to_string(linear_fail) + " linear bound failures");
  // All leaves, unit conductances: R(d) = (1 + R(d - 1)) / 2 with R(0) = 0, so CAP = 1 / R(n).
  double worst_uniform = 0;
  for (int n = 1; n <= 20; ++n) {
    const double expected = 1.0 / (1.0 - std::ldexp(1.0, -n));
    worst_uniform = std::max(worst_uniform,
                             std::abs(cap_reduce(LeafSet::all(n), ConductanceProfile::uniform(n)) - expected));
  }
  o.require(worst_uniform < 1e-12, "uniform all-leaves error " + fmt(worst_uniform));
  if (o.pass)
    o.detail = "200 cases, max rel err " + fmt(worst_rel) + ", uniform err " + fmt(worst_uniform);
  return o;
}

Outcome wetting_lin3() {
  Outcome o;
  const FirstOrderSpec lin3{linear_h(3 * kLn2), std::nullopt};
  const Kappa1Result k = kappa1(lin3.h);
  const double expected = 2 * kLn2 + std::log(3.0);
  o.require(k.status == SeriesStatus::converged, "kappa1 not converged");
  o.require(std::abs(k.value - 1.0 / 3.0) < 1e-12, "kappa1 = " + fmt(k.value));
  o.require(std::abs(k.lower_bound - expected) < 1e-12, "lower bound " + fmt(k.lower_bound));
  const JStarRow row = jstar_upper(lin3, 18);
  o.require(std::isfinite(row.upper) && row.upper >= k.lower_bound,
            "upper estimate " + fmt(row.upper) + " " + row.error);
  if (o.pass) o.detail = "kappa1 1/3, J* in [" + fmt(k.lower_bound) + ", " + fmt(row.upper) + "]";
  return o;
}

Outcome no_transition_lin1() {
  Outcome o;
  const HSequence lin1 = linear_h(kLn2);
  const TauberianResult tb = tauberian_diag(lin1);
  o.require(tb.verdict == Verdict::no_transition_supported, std::string("tauberian verdict ") + to_string(tb.verdict));
  for (std::size_t i = 0; i < tb.k.size(); ++i)
    o.require(std::abs(tb.value[i] - std::log(static_cast<double>(tb.k[i]))) < 1e-9,
              "tauberian term at k=" + std::to_string(tb.k[i]));
  const DiagCurve lap = laplace_diag_first(lin1, dyadic_s_grid(2, 10));
  o.require(lap.increasing, "laplace diagnostic not increasing");
  // Unbounded growth: every halving of s adds at least half of ln 2.
  for (std::size_t i = 1; i < lap.points.size(); ++i)
    o.require(lap.points[i].value - lap.points[i - 1].value >= 0.5 * kLn2, "laplace growth stalls");
  const auto limit = [&](double t) {
    return certificate_first_limit(t, static_cast<int>(std::ceil(40 / std::log1p(t))), lin1);
  };
  double previous = limit(0.25), worst = 0;
  for (int e = 3; e <= 8; ++e) {
    const double v = limit(std::ldexp(1.0, -e));
    worst = std::max(worst, std::abs((v - previous) / kLn2 - 1));
    previous = v;
  }
  o.require(worst < 0.2, "certificate increment off by " + fmt(worst) + " ln2");
  if (o.pass) o.detail = "tauberian ln k, laplace increasing, certificate increments within " + fmt(worst) + " ln2";
  return o;
}

Outcome second_order_reduction() {
  Outcome o;
  require_suite(o, verify_reduction(VerifyOptions{3, 20, 8, 1e-10}));
  if (o.pass) o.detail = "20 sequences x n=1..12 within 1e-10";
  return o;
}

Outcome dgff() {
  Outcome o;
  const Kappa2Result k = kappa2(dgff_h());
  o.require(k.status == SeriesStatus::converged && std::isfinite(k.value), "kappa2 " + fmt(k.value));
  const WettingReport rep = estimate_jstar(dgff_preset(16), {16});
  o.require(rep.kappa_name == "kappa2", "report uses " + rep.kappa_name);
  o.require(std::isfinite(rep.rows.back().upper), "upper estimate " + fmt(rep.rows.back().upper));
  o.require(rep.verdict == Verdict::transition_supported, std::string("verdict ") + to_string(rep.verdict));
  o.detail = "kappa2 " + fmt(k.value) + " (sup at k=" + std::to_string(k.argsup) + ", cutoff " +
             std::to_string(k.cutoff) + ", tail " + fmt(k.tail_bound) + "), J*_16 <= " +
             fmt(rep.rows.back().upper) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome sampler() {
  Outcome o;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> jdist(-1.0, 3.0);
  double worst_tv = 0;
  int chi_fail = 0;
  for (int run = 0; run < 20; ++run) {
    const ClusteringSpec spec =
        run % 2 ? ClusteringSpec(random_second_order(rng, 3)) : ClusteringSpec(random_first_order(rng, 3));
    const double j = jdist(rng);
    const auto counts = subset_counts(Sampler(spec, 3, j).sample_many(100000, 9000 + run));
    const ExactDistribution d = Enumerator(spec, 3).distribution(j);
    worst_tv = std::max(worst_tv, total_variation(counts, d.probability));
    if (chi_square_gof(counts, d.probability).p_value < 1e-3) ++chi_fail;
  }
  o.require(worst_tv < 0.02, "TV " + fmt(worst_tv));
  // 20 runs at level 0.001: P(2 or more rejections) is about 1.9e-4.
  o.require(chi_fail <= 1, std::to_string(chi_fail) + " chi-square rejections");
  // Configurations target a density in [0.1, 0.9] so the normal approximation is meaningful.
  std::uniform_real_distribution<double> target(0.1, 0.9);
  int missed = 0;
  for (int c = 0; c < 20; ++c) {
    const int n = 2 + c % 9;
    const ClusteringSpec spec = c % 3 == 0   ? ClusteringSpec(ZeroSpec{})
                                : c % 3 == 1 ? ClusteringSpec(random_first_order(rng, n))
                                             : ClusteringSpec(random_second_order(rng, n));
    const double rho = target(rng);
    double lo = -60, hi = 60;
    for (int it = 0; it < 60; ++it) (dp_density(spec, n, 0.5 * (lo + hi)) < rho ? lo : hi) = 0.5 * (lo + hi);
    const double j = 0.5 * (lo + hi);
    if (!empirical_density(spec, n, j, 4000, 7000 + c).covers(dp_density(spec, n, j))) ++missed;
  }
  o.require(missed == 0, std::to_string(missed) + " density configurations outside 3 sigma");
  if (o.pass)
    o.detail = "max TV " + fmt(worst_tv) + ", " + std::to_string(chi_fail) + "/20 chi-square rejections, densities covered";
  return o;
}

Outcome max_term() {
  Outcome o;
  std::mt19937_64 rng(99);
  double min_gap = INFINITY, worst_ratio = 0;
  for (int trial = 0; trial < 10; ++trial)
    for (int n = 1; n <= 8; ++n) {
      const FirstOrderSpec spec = random_first_order(rng, n);
      const double hc = constant_term(spec, n);
      const CanonicalTable w = dp_W_first(spec.h, hc, n), m = dp_W_maxterm(spec.h, hc, n);
      for (std::int64_t a0 = 1; a0 <= w.max_size(); ++a0) {
        const double gap = w.ln_w(a0) - m.ln_w(a0);
        min_gap = std::min(min_gap, gap);
        worst_ratio = std::max(worst_ratio, gap / (n * n * std::log(2.0 * static_cast<double>(a0))));
      }
    }
  // The lower side allows rounding: the max term is one of the summands of W.
  o.require(min_gap >= -1e-10, "W below max term by " + fmt(-min_gap));
  o.require(worst_ratio <= 1, "gap exceeds n^2 ln(2 a0), ratio " + fmt(worst_ratio));
  if (o.pass) o.detail = "min gap " + fmt(min_gap) + ", max gap / bound " + fmt(worst_ratio);
  return o;
}

struct Criterion {
  const char* name;
  double time_limit;  // seconds; 0 for none
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"zero-closed-form", 1, zero_closed_form},
      {"oracle-equivalence", 120, oracle_equivalence},
      {"entropy-completeness", 60, entropy_completeness},
      {"monotonicity", 120, monotonicity},
      {"capacity", 0, capacity},
      {"wetting-linear-3ln2", 10, wetting_lin3},
      {"no-transition-linear-ln2", 10, no_transition_lin1},
      {"second-order-reduction", 0, second_order_reduction},
      {"dgff-preset", 60, dgff},
      {"sampler-exactness", 0, sampler},
      {"max-term", 0, max_term},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0) o.require(seconds < c.time_limit, "runtime over " + fmt(c.time_limit) + " s");
    if (!o.pass) ++failed;
    std::printf("%s %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", index, c.name, seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
