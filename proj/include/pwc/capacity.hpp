#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "pwc/tree.hpp"

namespace pwc {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Rational = boost::multiprecision::cpp_rational;

/// Level-dependent conductances on the depth-n tree. Entry l is C_l, the conductance
/// of every edge whose lower endpoint has age l (l = 0..n-1).
template <typename Scalar>
struct BasicConductanceProfile {
  int depth = 0;
  VectorX<Scalar> conductance;

  static BasicConductanceProfile uniform(int depth, Scalar c = Scalar(1)) {
    return {depth, VectorX<Scalar>::Constant(depth, c)};
  }

  VectorX<Scalar> resistance() const { return conductance.cwiseInverse(); }

  template <typename Other>
  BasicConductanceProfile<Other> cast() const {
    return {depth, conductance.template cast<Other>()};
  }
};

using ConductanceProfile = BasicConductanceProfile<double>;
using ExactConductanceProfile = BasicConductanceProfile<Rational>;

/// Throws unless the profile has one positive conductance per edge level.
template <typename Scalar>
void validate(const BasicConductanceProfile<Scalar>& prof);

/// Effective conductance between the root and A by series/parallel reduction of T(A).
/// Instantiated for double and Rational.
template <typename Scalar>
Scalar cap_reduce(const LeafSet& a, const BasicConductanceProfile<Scalar>& prof);

/// Effective resistance, 1 / cap_reduce.
template <typename Scalar>
Scalar resistance_reduce(const LeafSet& a, const BasicConductanceProfile<Scalar>& prof);

/// Minimal Dirichlet energy with f(root) = 1, f = 0 on A, from a dense harmonic solve. n <= 8.
double cap_quadratic(const LeafSet& a, const ConductanceProfile& prof);

/// alpha_l = sum_{j=l}^{n-1} R_j, alpha_n = 0.
template <typename Scalar>
VectorX<Scalar> alpha_profile(const BasicConductanceProfile<Scalar>& prof) {
  validate(prof);
  const auto r = prof.resistance();
  VectorX<Scalar> alpha(prof.depth + 1);
  alpha(prof.depth) = Scalar(0);
  for (int l = prof.depth - 1; l >= 0; --l) alpha(l) = alpha(l + 1) + r(l);
  return alpha;
}

/// A probability measure on a leaf set.
struct LeafMeasure {
  LeafSet support;
  Eigen::VectorXd weight;  // weight(i) belongs to support.members()[i]

  LeafMeasure(LeafSet support, Eigen::VectorXd weight);
};

/// E = sum_{u,v} mu(u) mu(v) alpha_{|u ^ v|}.
double flow_energy(const LeafMeasure& mu, const ConductanceProfile& prof);

/// The hitting distribution of the unit current flow from the root into A;
/// its flow energy is 1 / CAP(A).
LeafMeasure optimal_measure(const LeafSet& a, const ConductanceProfile& prof);

}  // namespace pwc
