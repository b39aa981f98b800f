#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pwc/clustering.hpp"
#include "pwc/logreal.hpp"
#include "pwc/table.hpp"

namespace pwc {

inline constexpr int kOracleMaxDepth = 4;

/// The PWC law at small depth, indexed by subset bitmask.
struct ExactDistribution {
  int depth = 0;
  double j = 0;
  double ln_z = 0;
  Eigen::VectorXd probability;
};

/// Brute-force enumeration of all 2^(2^n) subsets, n <= 4. Phi is evaluated once per
/// subset at construction; every query reuses the memoized values.
class Enumerator {
 public:
  Enumerator(const ClusteringSpec& spec, int depth);

  int depth() const { return depth_; }
  const std::vector<double>& phi_values() const { return phi_; }

  LogReal z(double j) const;
  CanonicalTable w() const;
  double density(double j) const;
  /// P(u in A) for each leaf u.
  Eigen::VectorXd inclusion(double j) const;
  ExactDistribution distribution(double j) const;

 private:
  std::vector<double> log_weights(double j) const;

  int depth_;
  std::string spec_id_;
  std::vector<double> phi_;
  std::vector<int> size_;
};

LogReal enum_Z(const ClusteringSpec& spec, int depth, double j);
CanonicalTable enum_W(const ClusteringSpec& spec, int depth);
double enum_density(const ClusteringSpec& spec, int depth, double j);

}  // namespace pwc
