#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pwc/clustering.hpp"
#include "pwc/tree.hpp"

namespace pwc {

/// SplitMix64 stream; split() derives an independent child stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  SplitMix64 split() { return SplitMix64(next() ^ 0x6a09e667f3bcc909ULL); }
  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double gumbel() { return -std::log(-std::log(uniform())); }

 private:
  std::uint64_t state_;
};

/// Exact top-down sampler for the zero, first- and second-order variants.
class Sampler {
 public:
  Sampler(const ClusteringSpec& spec, int depth, double j);

  int depth() const { return depth_; }
  LeafSet sample(SplitMix64& rng) const;
  std::vector<LeafSet> sample_many(std::size_t count, std::uint64_t seed) const;

  const std::vector<double>& first_table() const { return y_; }
  const std::vector<std::vector<double>>& second_table() const { return f_; }

 private:
  void descend_first(int d, std::uint64_t position, SplitMix64 rng, std::vector<LeafIndex>& out) const;
  void descend_second(int d, int a, std::uint64_t position, SplitMix64 rng,
                      std::vector<LeafIndex>& out) const;

  int depth_;
  bool second_ = false;
  double h_const_ = 0;
  FirstOrderSpec first_;
  SecondOrderSpec second_spec_;
  std::vector<double> y_;
  std::vector<std::vector<double>> f_;
};

struct DensityEstimate {
  double mean = 0;
  double std_error = 0;
  std::size_t samples = 0;

  bool covers(double x, double z = 3.0) const { return std::abs(x - mean) <= z * std_error; }
};

/// Monte Carlo mean of |A| / 2^n with its normal-approximation standard error.
DensityEstimate empirical_density(const ClusteringSpec& spec, int depth, double j,
                                  std::size_t samples, std::uint64_t seed);

/// Counts of each subset bitmask among samples; depth <= 4.
std::vector<std::size_t> subset_counts(const std::vector<LeafSet>& samples);

/// 1/2 sum |count/N - p| over all categories.
double total_variation(const std::vector<std::size_t>& counts, const Eigen::VectorXd& probability);

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

/// Pearson goodness of fit. Categories with expected count below min_expected are pooled.
ChiSquareResult chi_square_gof(const std::vector<std::size_t>& counts, const Eigen::VectorXd& probability,
                               double min_expected = 5.0);

}  // namespace pwc
