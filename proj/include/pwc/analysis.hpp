#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pwc/clustering.hpp"
#include "pwc/patterns.hpp"
#include "pwc/table.hpp"

namespace pwc {

/// H(eps) = -eps ln eps - (1 - eps) ln(1 - eps).
double binomial_entropy(double eps);

/// Finite-n canonical free energy on the dyadic grid eps = a0 / 2^n.
struct OmegaCurve {
  int depth = 0;
  std::string spec_id;
  std::vector<double> eps;
  std::vector<double> omega;

  static OmegaCurve from_table(const CanonicalTable& table);
};

struct LegendreResult {
  double zeta = 0;
  double argmax = 0;
  bool unique = true;  // false when another grid point comes within 1e-9
};

/// max_eps {J eps + omega(eps)} over the grid.
LegendreResult legendre(const OmegaCurve& omega, double j);

enum class SeriesStatus { converged, divergent, unresolved };
const char* to_string(SeriesStatus s);

struct Kappa1Result {
  SeriesStatus status = SeriesStatus::unresolved;
  double value = 0;        // +inf when divergent; partial sum when unresolved
  double tail_bound = 0;   // ratio-test estimate of the remainder
  int terms = 0;
  double lower_bound = 0;  // 2 ln 2 + h_0 - ln kappa_1, -inf unless converged
};

/// kappa_1 = sum_{k>=1} 2^k e^{-h_k}.
Kappa1Result kappa1(const HSequence& h, int k_max = 10'000'000);

struct Kappa2Result {
  SeriesStatus status = SeriesStatus::unresolved;
  double value = 0;            // sup of the inner sums up to the cutoff
  int argsup = 0;
  int cutoff = 0;
  std::vector<int> doubling_k;             // k = 2, 4, 8, ... <= cutoff
  std::vector<double> doubling_sup;        // sup over inner sums up to doubling_k
  double tail_bound = 0;       // extrapolated further growth of the sup beyond the cutoff
  double lower_bound = 0;      // 2 ln 2 - 2 e^{-1} kappa_2, -inf unless converged
};

/// sum_{l<k} 2^l e^{-h_{k,l}}.
double kappa2_inner(const HArray& h, int k);
/// sup_k of the inner sums: exact for k <= 2000, then on a logarithmic grid up to k_max.
Kappa2Result kappa2(const HArray& h, int k_max = 100'000);

struct DiagPoint {
  double s = 0;
  double value = 0;        // ln(1/s) - s g^+(s) or its second-order analog; -inf if divergent
  bool divergent = false;
  long terms = 0;
};

struct DiagCurve {
  std::vector<DiagPoint> points;
  bool increasing = false;  // value strictly increases as s decreases
};

/// Laplace diagnostic with g_k = h_k - (ln 2) k. s-grid in (0, 1], decreasing.
DiagCurve laplace_diag_first(const HSequence& h, const std::vector<double>& s_grid);
/// ln(1/s) - 2 s^2 g^+(s, 2s) with g_{l,d} = h_{l+d,l} - (ln 2) l for d >= 1, 0 for d = 0.
DiagCurve laplace_diag_second(const HArray& h, const std::vector<double>& s_grid);

/// s = 2^{-lo}, ..., 2^{-hi}.
std::vector<double> dyadic_s_grid(int lo, int hi);

enum class Verdict { transition_supported, no_transition_supported, inconclusive };
const char* to_string(Verdict v);

struct TauberianResult {
  std::vector<int> k;
  std::vector<double> value;
  Verdict verdict = Verdict::inconclusive;
};

/// Sequence (ln 2) k + ln k - h_k on k = 1..k_max, verdict from its growth over doublings.
TauberianResult tauberian_diag(const HSequence& h, int k_max = 1 << 20);
/// Sequence (ln 2) k + ln k - h1_k - h2_{floor(k/2)}, after checking h_{l+d,l} = h1_l + h2_d.
TauberianResult tauberian_diag(const HArray& h, const HSequence& h1, const HSequence& h2,
                               int k_max = 1 << 20);

/// delta = fixed if set, otherwise max(1e-6, tail_n + n ln 2 / 2^n).
struct DeltaPolicy {
  std::optional<double> fixed;
  double operator()(int depth, double tail) const;
};

struct JStarRow {
  int depth = 0;
  double upper = 0;  // smallest J with zeta_n(J) - tail_n > delta; +inf if none found
  double delta = 0;
  double tail = 0;
  std::optional<double> slope;  // min_{a0>=1} -ln W_n(a0) / a0 when W is affordable
  std::string error;            // non-monotone bracket etc.
};

struct WettingReport {
  std::string spec_id;
  std::vector<JStarRow> rows;
  std::string kappa_name;  // kappa1, kappa2 or none
  double kappa = 0;
  SeriesStatus kappa_status = SeriesStatus::unresolved;
  double lower_bound = 0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> notes;
};

/// tail_n = 2 sum_{k>n} gamma_k 2^{-k}: gamma_k = h_k (first order), 2 h_{k+1,k} (second), 0 (zero).
double tail_bound(const ClusteringSpec& spec, int depth);

/// Bisection for the smallest J with zeta_n(J) - tail_n > delta.
JStarRow jstar_upper(const ClusteringSpec& spec, int depth, const DeltaPolicy& policy = {});

WettingReport estimate_jstar(const ClusteringSpec& spec, const std::vector<int>& depths,
                             const DeltaPolicy& policy = {});

/// Dyadic rational p / 2^q with odd p (or t = 1).
struct Dyadic {
  std::int64_t p = 1;
  int q = 0;
  double value() const { return std::ldexp(static_cast<double>(p), -q); }
};
Dyadic make_dyadic(double t);

struct Certificate1 {
  Pattern1 pattern;
  int min_depth = 0;
  double value = 0;  // A_n(b)
};

struct Certificate2 {
  Pattern2 pattern;
  int min_depth = 0;
  double value = 0;  // B_n(b)
};

/// Smallest n for which the constructed pattern is integral.
int certificate_min_depth_first(Dyadic t, int j);
int certificate_min_depth_second(Dyadic t, int j);

/// Pattern with b_k / a_k = t for k <= j and 1 above, and its entropy-energy functional.
Certificate1 certificate_first(Dyadic t, int j, int depth, const HSequence& h);
/// Second-order analog, b_{k,k-d} = 2 b_k t_{k-1} (1 - t_{k-1})^{d-1} (d < k), 2 b_k (1 - t_{k-1})^{k-1} (d = k).
Certificate2 certificate_second(Dyadic t, int j, int depth, const HArray& h);

/// Large-n limits of the two functionals (Stirling form), truncated where terms vanish.
double certificate_first_limit(double t, int j, const HSequence& h);
double certificate_second_limit(double t, int j, const HArray& h);

}  // namespace pwc
