#pragma once

#include <vector>

#include "pwc/clustering.hpp"
#include "pwc/logreal.hpp"
#include "pwc/table.hpp"

namespace pwc {

inline constexpr int kWGuardFirst = 12;
inline constexpr int kWGuardSecond = 10;
inline constexpr int kCapacityGuard = 5;

/// ln Z together with d ln Z / dJ.
struct ZDerivPair {
  LogReal z;
  double dlogz_dj = 0;
};

/// y[d] = ln Y_d for d = 0..n: Y_0 = e^{J - h_0}, Y_d = 2 Y_{d-1} + e^{-h_d} Y_{d-1}^2.
std::vector<double> first_order_table(const HSequence& h, int depth, double j);

/// f[d][a] = ln F_d(a) for a in [d+1, n+1] (other entries -inf):
/// F_0(a) = e^{J - h_{a,0}}, F_d(a) = 2 F_{d-1}(a) + e^{-h_{a,d}} F_{d-1}(d)^2.
std::vector<std::vector<double>> second_order_table(const HArray& h, int depth, double j);

LogReal dp_Z_first(const HSequence& h, double h_const, int depth, double j);
LogReal dp_Z_second(const HArray& h, double h_const, int depth, double j);
ZDerivPair dp_Z_deriv_first(const HSequence& h, double h_const, int depth, double j);
ZDerivPair dp_Z_deriv_second(const HArray& h, double h_const, int depth, double j);

/// Z by class-compressed recursion over (size, resistance) states; n <= 5 by default.
LogReal dp_Z_capacity(const CapacitySpec& spec, int depth, double j, int guard = kCapacityGuard);

/// Dispatches on the variant. Zero uses the first-order recursion with h = 0.
LogReal dp_Z(const ClusteringSpec& spec, int depth, double j);
/// zeta_n(J) = 2^{-n} ln Z_n(J).
double dp_zeta(const ClusteringSpec& spec, int depth, double j);
/// rho_n = 2^{-n} d ln Z / dJ, by derivative propagation. Not available for capacity.
double dp_density(const ClusteringSpec& spec, int depth, double j);

CanonicalTable dp_W_first(const HSequence& h, double h_const, int depth, int guard = kWGuardFirst);
CanonicalTable dp_W_second(const HArray& h, double h_const, int depth, int guard = kWGuardSecond);
CanonicalTable dp_W_capacity(const CapacitySpec& spec, int depth, int guard = kCapacityGuard);
/// With override_guards the per-variant depth guards are lifted.
CanonicalTable dp_W(const ClusteringSpec& spec, int depth, bool override_guards = false);

/// W through the admissible first-order patterns: sum over b of N(b) e^{-Phi(b)}.
CanonicalTable dp_W_patterns(const HSequence& h, double h_const, int depth, int guard = kWGuardFirst);
/// ln max_b N(b) e^{-Phi(b)} per a0 (max-plus variant of the pattern recursion).
CanonicalTable dp_W_maxterm(const HSequence& h, double h_const, int depth, int guard = kWGuardFirst);

/// First-order parameters of a spec: Zero maps to h = 0. Throws for other variants.
FirstOrderSpec as_first_order(const ClusteringSpec& spec);

}  // namespace pwc
