#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pwc/analysis.hpp"
#include "pwc/dp.hpp"
#include "pwc/oracle.hpp"
#include "pwc/verify.hpp"

using namespace pwc;

namespace {

constexpr double kLn2 = std::numbers::ln2;

FirstOrderSpec linear_spec(double c) { return {linear_h(c), std::nullopt}; }

HSequence closed(const char* name, double (*f)(int)) { return HSequence::closed_form(name, f, true); }

}  // namespace

TEST_CASE("binomial entropy") {
  CHECK(binomial_entropy(0.0) == 0.0);
  CHECK(binomial_entropy(1.0) == 0.0);
  CHECK(binomial_entropy(0.5) == doctest::Approx(kLn2));
  CHECK_THROWS_AS(binomial_entropy(1.5), std::invalid_argument);
}

TEST_CASE("Legendre transform of the canonical free energy") {
  const OmegaCurve zero = OmegaCurve::from_table(dp_W(ZeroSpec{}, 10));
  for (double j : {-2.0, 0.0, 1.0}) {
    const LegendreResult r = legendre(zero, j);
    CHECK(std::abs(r.zeta - std::log1p(std::exp(j))) <= 10 * kLn2 / 1024 + 1e-9);
    CHECK(std::abs(r.argmax - 1 / (1 + std::exp(-j))) < 0.01);
  }

  const OmegaCurve lin3 = OmegaCurve::from_table(dp_W(linear_spec(3 * kLn2), 12));
  const LegendreResult far = legendre(lin3, -50.0);
  CHECK(far.zeta == 0.0);
  CHECK(far.argmax == 0.0);
  const LegendreResult wet = legendre(lin3, 5.0);
  CHECK(wet.argmax > 0.0);
  CHECK(wet.zeta > 0.0);
  CHECK(std::abs(wet.zeta - dp_zeta(linear_spec(3 * kLn2), 12, 5.0)) <= 12 * kLn2 / 4096 + 1e-9);
}

TEST_CASE("Legendre gap on random specs") {
  std::mt19937_64 rng(21);
  for (int n = 2; n <= 10; ++n) {
    const ClusteringSpec spec = n % 2 ? ClusteringSpec(random_second_order(rng, n))
                                      : ClusteringSpec(random_first_order(rng, n));
    const OmegaCurve omega = OmegaCurve::from_table(dp_W(spec, n));
    for (double j : {-3.0, -1.0, 0.0, 2.0, 4.0}) {
      const double gap = dp_zeta(spec, n, j) - legendre(omega, j).zeta;
      CHECK(gap >= -1e-12);
      CHECK(gap <= n * kLn2 / std::ldexp(1.0, n) + 1e-9);
    }
  }
}

TEST_CASE("kappa1") {
  const Kappa1Result lin3 = kappa1(linear_h(3 * kLn2));
  CHECK(lin3.status == SeriesStatus::converged);
  CHECK(std::abs(lin3.value - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(lin3.lower_bound - (2 * kLn2 + std::log(3.0))) < 1e-12);
  const Kappa1Result lin1 = kappa1(linear_h(kLn2));
  CHECK(lin1.status == SeriesStatus::divergent);
  CHECK(std::isinf(lin1.value));
  CHECK(lin1.lower_bound == -std::numeric_limits<double>::infinity());
}

TEST_CASE("kappa2 of the dgff array") {
  const Kappa2Result k = kappa2(dgff_h());
  CHECK(k.status == SeriesStatus::converged);
  CHECK(std::isfinite(k.value));
  CHECK(k.value > 0.0);
  CHECK(k.cutoff == 100000);
  CHECK(std::isfinite(k.tail_bound));
  CHECK(k.lower_bound == doctest::Approx(2 * kLn2 - 2 * std::exp(-1.0) * k.value));
  // Inner sums approach 1 + 2 zeta(3/2); increments per doubling shrink like 2^{-k/2}.
  REQUIRE(k.doubling_sup.size() >= 4);
  const auto& s = k.doubling_sup;
  for (std::size_t i = s.size() - 3; i + 1 < s.size(); ++i)
    CHECK(s[i + 1] - s[i] < 0.8 * (s[i] - s[i - 1]));
  const double limit = 1 + 2 * 2.612375348685488;
  CHECK(k.value < limit);
  CHECK(k.value + k.tail_bound >= limit);
}

TEST_CASE("Laplace diagnostics") {
  const auto grid = dyadic_s_grid(2, 10);
  REQUIRE(grid.size() == 9);
  const DiagCurve zero_g = laplace_diag_first(linear_h(kLn2), grid);
  CHECK(zero_g.increasing);
  for (const auto& p : zero_g.points) CHECK(p.value == doctest::Approx(std::log(1 / p.s)));

  const DiagCurve lin3 = laplace_diag_first(linear_h(3 * kLn2), grid);
  CHECK_FALSE(lin3.increasing);
  CHECK(lin3.points.back().value < lin3.points.front().value);
  CHECK(lin3.points.back().value < -1000);

  const HSequence log2 = closed("log2", [](int k) { return kLn2 * k + 2 * std::log(std::max(k, 1)); });
  const DiagCurve over = laplace_diag_first(log2, grid);
  CHECK_FALSE(over.increasing);
  CHECK(over.points.back().value < over.points.front().value);

  CHECK_THROWS_AS(laplace_diag_first(linear_h(kLn2), {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("Tauberian diagnostics") {
  const TauberianResult lin1 = tauberian_diag(linear_h(kLn2));
  CHECK(lin1.verdict == Verdict::no_transition_supported);
  for (std::size_t i = 0; i < lin1.k.size(); ++i) CHECK(lin1.value[i] == doctest::Approx(std::log(lin1.k[i])));

  const HSequence log2 = closed("log2", [](int k) { return kLn2 * k + 2 * std::log(std::max(k, 1)); });
  const TauberianResult over = tauberian_diag(log2);
  CHECK(over.verdict == Verdict::inconclusive);
  CHECK(over.value.back() == doctest::Approx(-std::log(over.k.back())));

  const TauberianResult boundary = tauberian_diag(log_corrected_h());
  CHECK(boundary.verdict == Verdict::inconclusive);
  for (double v : boundary.value) CHECK(std::abs(v) < 1e-9);

  // Additive second-order form with h2 = 0 reduces to the first-order sequence.
  const HSequence zero = HSequence::closed_form("zero", [](int) { return 0.0; }, true);
  const HArray additive = HArray::closed_form("additive", [](int k, int l) { return kLn2 * l + 0.0 * k; }, true);
  CHECK(tauberian_diag(additive, linear_h(kLn2), zero, 1 << 10).verdict == Verdict::no_transition_supported);
}

TEST_CASE("critical pinning force estimates") {
  const WettingReport zero = estimate_jstar(ZeroSpec{}, {8, 12, 16});
  CHECK(zero.verdict == Verdict::no_transition_supported);
  CHECK(zero.rows[2].upper < zero.rows[1].upper);
  CHECK(zero.rows[1].upper < zero.rows[0].upper);

  const WettingReport lin3 = estimate_jstar(linear_spec(3 * kLn2), {18});
  CHECK(lin3.kappa_name == "kappa1");
  CHECK(std::isfinite(lin3.rows[0].upper));
  CHECK(lin3.rows[0].upper >= lin3.lower_bound);
  CHECK(lin3.verdict == Verdict::transition_supported);

  const WettingReport dgff = estimate_jstar(dgff_preset(16), {12, 16});
  CHECK(dgff.kappa_name == "kappa2");
  CHECK(std::isfinite(dgff.rows.back().upper));
  CHECK(dgff.verdict == Verdict::transition_supported);
}

TEST_CASE("upper estimates are nonincreasing in n for fixed delta") {
  const DeltaPolicy fixed{0.05};
  const std::vector<int> depths = {4, 6, 8, 10, 12, 14};
  for (const ClusteringSpec& spec : std::vector<ClusteringSpec>{
           ZeroSpec{}, linear_spec(3 * kLn2), linear_spec(kLn2), FirstOrderSpec{log_corrected_h(), std::nullopt},
           dgff_preset(14)}) {
    const WettingReport r = estimate_jstar(spec, depths, fixed);
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].upper <= r.rows[i - 1].upper + 1e-9);
  }
}

TEST_CASE("slope estimator agrees with bisection") {
  const JStarRow row = jstar_upper(linear_spec(3 * kLn2), 12);
  REQUIRE(row.slope.has_value());
  CHECK(std::abs(*row.slope - row.upper) < 0.2);
}

TEST_CASE("tail bounds") {
  CHECK(tail_bound(ZeroSpec{}, 10) == 0.0);
  // 2 sum_{k>n} c k 2^{-k} = 2 c (n + 2) 2^{-n}.
  CHECK(tail_bound(linear_spec(1.0), 10) == doctest::Approx(2 * 12.0 / 1024.0).epsilon(1e-12));
  CHECK_THROWS_AS(tail_bound(CapacitySpec{HSequence::from_values({1.0})}, 1), std::invalid_argument);
}

TEST_CASE("dyadic parsing") {
  const Dyadic d = make_dyadic(0.375);
  CHECK(d.p == 3);
  CHECK(d.q == 3);
  CHECK(make_dyadic(1.0).q == 0);
  CHECK_THROWS_AS(make_dyadic(1.5), std::invalid_argument);
  CHECK(make_dyadic(0.3).value() == 0.3);
  CHECK_THROWS_AS(make_dyadic(0.0), std::invalid_argument);
}

TEST_CASE("first-order certificates") {
  const Certificate1 full = certificate_first(make_dyadic(1.0), 0, 5, linear_h(kLn2));
  for (int k = 0; k <= 5; ++k) CHECK(full.pattern.b[static_cast<std::size_t>(k)] == (std::int64_t{1} << (5 - k)));
  CHECK(full.pattern.cardinality() == 32);

  for (double t : {0.5, 0.25, 0.125})
    for (int j = 0; j <= 4; ++j) {
      const Dyadic td = make_dyadic(t);
      const int n0 = certificate_min_depth_first(td, j);
      const Certificate1 c = certificate_first(td, j, std::max(n0, 1), linear_h(kLn2));
      CHECK(c.pattern.is_admissible());
      CHECK(c.min_depth == n0);
      if (n0 > 1) CHECK_THROWS_AS(certificate_first(td, j, n0 - 1, linear_h(kLn2)), std::invalid_argument);
    }

  // With g_k = 2 (ln 2) k the value stays bounded; finite n approaches the limit.
  const HSequence lin1 = linear_h(kLn2), lin3 = linear_h(3 * kLn2);
  for (double t : {0.5, 0.25, 0.125}) {
    const Dyadic td = make_dyadic(t);
    const int n = std::max(certificate_min_depth_first(td, 8), 40);
    const double v = certificate_first(td, 8, n, lin1).value;
    CHECK(certificate_first(td, 8, n, lin3).value < 1.0);
    CHECK(std::abs(v - certificate_first_limit(t, 8, lin1)) < 0.05);
  }
}

TEST_CASE("a certificate term never exceeds the canonical partition function, n <= 4") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const FirstOrderSpec f = random_first_order(rng, 4);
    for (double t : {1.0, 0.5})
      for (int j = 0; j <= 2; ++j) {
        const Dyadic td = make_dyadic(t);
        const int n0 = certificate_min_depth_first(td, j);
        for (int n = std::max(n0, 1); n <= 4; ++n) {
          const Certificate1 c = certificate_first(td, j, n, f.h);
          double energy = constant_term(f, n);
          for (int k = 0; k <= n; ++k) energy += f.h(k) * static_cast<double>(c.pattern.b[static_cast<std::size_t>(k)]);
          const double term = entropy1(c.pattern).log() - energy;
          const CanonicalTable w = enum_W(f, n);
          CHECK(term <= w.ln_w(c.pattern.cardinality()) + 1e-12);
          // Summation by parts links the functional to the term.
          const double a0 = static_cast<double>(c.pattern.cardinality());
          const double via_value = a0 * (c.value - 2 * kLn2 - f.h(0)) + (n + 2) * kLn2 - constant_term(f, n);
          CHECK(term == doctest::Approx(via_value).epsilon(1e-12));
        }
      }
  }
}

TEST_CASE("second-order certificates") {
  const HArray h = dgff_h();
  for (double t : {1.0, 0.5, 0.25})
    for (int j = 0; j <= 3; ++j) {
      const Dyadic td = make_dyadic(t);
      const int n0 = certificate_min_depth_second(td, j);
      const Certificate2 c = certificate_second(td, j, std::max(n0, 1), h);
      CHECK(c.pattern.is_consistent());
      CHECK(c.pattern.first_order().is_admissible());
      CHECK(std::isfinite(c.value));
    }
  const HArray flat = HArray::closed_form("flat", [](int, int l) { return kLn2 * l; }, true);
  const Dyadic quarter = make_dyadic(0.25);
  const int n = std::max(certificate_min_depth_second(quarter, 6), 40);
  CHECK(std::abs(certificate_second(quarter, 6, n, flat).value - certificate_second_limit(0.25, 6, flat)) < 0.05);
}

TEST_CASE("certificate limit grows by about ln 2 per halving when g = 0") {
  const HSequence lin1 = linear_h(kLn2);
  double previous = certificate_first_limit(0.25, static_cast<int>(std::ceil(40 / std::log1p(0.25))), lin1);
  for (int e = 3; e <= 8; ++e) {
    const double t = std::ldexp(1.0, -e);
    const double v = certificate_first_limit(t, static_cast<int>(std::ceil(40 / std::log1p(t))), lin1);
    CHECK(std::abs((v - previous) / kLn2 - 1.0) < 0.2);
    previous = v;
  }
}
