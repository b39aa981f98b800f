#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "pwc/analysis.hpp"
#include "pwc/dp.hpp"
#include "pwc/oracle.hpp"
#include "pwc/patterns.hpp"
#include "pwc/verify.hpp"

using namespace pwc;

namespace {

const FirstOrderSpec kExample{HSequence::from_values({0, 1}), 1.0};
const HSequence kZeroH = HSequence::from_values(std::vector<double>(64, 0.0));

double rel(double ln_a, double ln_b) { return log_relative_error(ln_a, ln_b); }

}  // namespace

TEST_CASE("first-order recursion examples") {
  for (int n = 1; n <= 20; ++n)
    for (double j : {-3.0, 0.0, 3.0})
      CHECK(dp_Z_first(kZeroH, 0.0, n, j).log() ==
            doctest::Approx(std::ldexp(std::log1p(std::exp(j)), n)).epsilon(1e-12));
  // Y_d = (1 + e^J)^{2^d} - 1 for the zero spec.
  const auto y = first_order_table(kZeroH, 4, 0.3);
  for (int d = 0; d <= 4; ++d)
    CHECK(std::exp(y[static_cast<std::size_t>(d)]) ==
          doctest::Approx(std::pow(1 + std::exp(0.3), std::ldexp(1.0, d)) - 1).epsilon(1e-12));
  CHECK(dp_Z_first(kExample.h, 1.0, 1, 0.0).log() ==
        doctest::Approx(std::log(1 + 2 * std::exp(-1.0) + std::exp(-2.0))).epsilon(1e-15));

  const auto start = std::chrono::steady_clock::now();
  const double big = dp_Z_first(linear_h(3 * std::numbers::ln2), 60.0 * std::numbers::ln2, 20, 0.0).log();
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  CHECK(std::isfinite(big));
  CHECK(ms < 1.0);
}

TEST_CASE("second-order recursion examples") {
  const HArray h = HArray::from_rows({{0.3}, {0.7, 1.1}});
  const double c = 0.4;
  const double expected = std::log(1 + std::exp(-c) * (2 * std::exp(-0.7) + std::exp(-1.1 - 0.6)));
  CHECK(dp_Z_second(h, c, 1, 0.0).log() == doctest::Approx(expected).epsilon(1e-15));

  const auto spec = dgff_preset(16);
  const auto start = std::chrono::steady_clock::now();
  const double z = dp_Z(spec, 16, 0.0).log();
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  CHECK(std::isfinite(z));
  CHECK(z <= std::ldexp(std::log(2.0), 16));
  CHECK(ms < 10.0);
}

TEST_CASE("recursions match enumeration, n <= 4, 50 draws") {
  VerifyOptions opt;
  opt.depth = 4;
  opt.draws = 50;
  opt.seed = 12;
  for (const char* variant : {"first", "second", "capacity"}) {
    const SuiteResult r = verify_z_and_w(variant, opt);
    CHECK(r.checks > 0);
    CHECK_MESSAGE(r.ok(), r.failures.front());
  }
}

TEST_CASE("canonical tables") {
  for (int n = 1; n <= 6; ++n) {
    const CanonicalTable w = dp_W(ZeroSpec{}, n);
    for (std::int64_t a0 = 0; a0 <= w.max_size(); ++a0)
      CHECK(w.ln_w(a0) == doctest::Approx(log_binomial(w.max_size(), a0)).epsilon(1e-12));
  }
  const CanonicalTable ex = dp_W(kExample, 1);
  CHECK(ex.ln_w(0) == 0.0);
  CHECK(ex.ln_w(1) == doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-15));
  CHECK(ex.ln_w(2) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK_THROWS_AS(dp_W(ZeroSpec{}, kWGuardFirst + 1), std::invalid_argument);
  CHECK(dp_W(ZeroSpec{}, kWGuardFirst + 1, true).ln_w.size() == (1 << (kWGuardFirst + 1)) + 1);
}

TEST_CASE("three routes to W agree") {
  std::mt19937_64 rng(6);
  for (int n = 1; n <= 8; ++n) {
    const FirstOrderSpec f = random_first_order(rng, n);
    const double c = constant_term(f, n);
    const CanonicalTable a = dp_W_first(f.h, c, n), b = dp_W_patterns(f.h, c, n);
    for (Eigen::Index i = 0; i < a.ln_w.size(); ++i) CHECK(rel(a.ln_w(i), b.ln_w(i)) < 1e-10);
  }
}

TEST_CASE("Z from the canonical table, n <= 10") {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 10; ++n) {
    const FirstOrderSpec f = random_first_order(rng, n);
    const CanonicalTable w = dp_W(f, n);
    for (double j : {-2.0, 0.0, 2.5}) CHECK(rel(w.ln_z(j), dp_Z(f, n, j).log()) < 1e-9);
  }
  for (int n = 1; n <= 8; ++n) {
    const SecondOrderSpec s = random_second_order(rng, n);
    const CanonicalTable w = dp_W(s, n);
    for (double j : {-2.0, 0.0, 2.5}) CHECK(rel(w.ln_z(j), dp_Z(s, n, j).log()) < 1e-9);
  }
}

TEST_CASE("capacity recursion") {
  const CapacitySpec uniform{HSequence::from_values({1.0, 1.0, 1.0, 1.0, 1.0, 1.0})};
  for (int n = 1; n <= 4; ++n)
    for (double j : {-1.0, 1.0}) CHECK(rel(dp_Z(uniform, n, j).log(), enum_Z(uniform, n, j).log()) < 1e-10);
  CHECK(std::isfinite(dp_Z(uniform, 5, 0.0).log()));
  CHECK_THROWS_AS(dp_Z(uniform, 6, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dp_density(uniform, 3, 0.0), std::invalid_argument);
}

TEST_CASE("max term") {
  const FirstOrderSpec zero = as_first_order(ZeroSpec{});
  const CanonicalTable m = dp_W_maxterm(zero.h, 0.0, 2);
  CHECK(m.ln_w(2) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  for (int n = 1; n <= 8; ++n)
    CHECK(dp_W_maxterm(zero.h, 0.0, n).ln_w(1) == doctest::Approx(n * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("convexity and monotonicity of zeta, density as its derivative") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + 2 * trial;
    const ClusteringSpec spec =
        trial % 2 ? ClusteringSpec(random_second_order(rng, n)) : ClusteringSpec(random_first_order(rng, n));
    std::vector<double> z;
    for (int i = 0; i <= 60; ++i) z.push_back(dp_zeta(spec, n, -3.0 + 0.1 * i));
    for (std::size_t i = 1; i + 1 < z.size(); ++i) CHECK(z[i + 1] - 2 * z[i] + z[i - 1] >= -1e-9);
    for (std::size_t i = 1; i < z.size(); ++i) CHECK(z[i] >= z[i - 1]);
    for (double j : {-2.0, 0.0, 1.7}) {
      const double rho = dp_density(spec, n, j);
      CHECK(rho >= 0.0);
      CHECK(rho <= 1.0);
      const double step = 1e-5;
      const double numeric = (dp_zeta(spec, n, j + step) - dp_zeta(spec, n, j - step)) / (2 * step);
      CHECK(std::abs(rho - numeric) < 1e-6);
    }
  }
}

TEST_CASE("density examples") {
  for (int n : {1, 5, 20})
    for (double j : {-3.0, 0.0, 3.0})
      CHECK(std::abs(dp_density(ZeroSpec{}, n, j) - 1 / (1 + std::exp(-j))) < 1e-12);
  CHECK(dp_density(kExample, 1, 0.0) == doctest::Approx(enum_density(kExample, 1, 0.0)).epsilon(1e-14));
  CHECK(dp_density(FirstOrderSpec{linear_h(3 * std::numbers::ln2), std::nullopt}, 18, -10.0) < 1e-3);
}

TEST_CASE("entropy bound for nonnegative clustering") {
  std::mt19937_64 rng(10);
  for (int n = 1; n <= 8; ++n) {
    FirstOrderSpec f = random_first_order(rng, n);
    f.h_const = std::abs(f.h(0)) + 1.0;
    std::vector<double> shifted;
    for (int k = 0; k <= n; ++k) shifted.push_back(f.h(k) - std::min(0.0, f.h(0)));
    f.h = HSequence::from_values(shifted);
    const CanonicalTable w = dp_W(f, n);
    for (std::int64_t a0 = 0; a0 <= w.max_size(); ++a0) {
      const double eps = static_cast<double>(a0) / static_cast<double>(w.max_size());
      CHECK(w.omega(a0) <= binomial_entropy(eps) + 1e-12);
    }
  }
}

TEST_CASE("second order with k-independent rows reduces to first order") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const FirstOrderSpec f = random_first_order(rng, 13);
    const SecondOrderSpec s{HArray::from_sequence(f.h, 14), std::nullopt};
    for (int n = 1; n <= 12; ++n)
      for (double j : {-2.0, 1.0}) CHECK(rel(dp_Z(f, n, j).log(), dp_Z(s, n, j).log()) < 1e-10);
    for (int n = 1; n <= 6; ++n) {
      const CanonicalTable a = dp_W(f, n), b = dp_W(s, n);
      for (Eigen::Index i = 0; i < a.ln_w.size(); ++i) CHECK(rel(a.ln_w(i), b.ln_w(i)) < 1e-10);
    }
  }
}

TEST_CASE("derivative pairs") {
  const auto p = dp_Z_deriv_first(kExample.h, 1.0, 1, 0.0);
  CHECK(p.z.log() == doctest::Approx(dp_Z_first(kExample.h, 1.0, 1, 0.0).log()));
  CHECK(std::isfinite(p.dlogz_dj));
  const auto q = dp_Z_deriv_second(dgff_h(), 0.0, 10, 2.0);
  CHECK(std::isfinite(q.dlogz_dj));
  CHECK(q.dlogz_dj >= 0.0);
}
