#include "pwc/oracle.hpp"

#include <bit>
#include <span>
#include <stdexcept>

namespace pwc {

namespace {

// Neumaier-compensated sum in a fixed order.
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

Enumerator::Enumerator(const ClusteringSpec& spec, int depth) : depth_(depth), spec_id_(describe(spec)) {
  check_depth(depth);
  if (depth > kOracleMaxDepth)
    throw std::invalid_argument("enumeration oracle limited to depth <= " +
                                std::to_string(kOracleMaxDepth));
  const std::uint64_t subsets = std::uint64_t{1} << leaf_count(depth);
  phi_.resize(subsets);
  size_.resize(subsets);
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    phi_[mask] = phi(spec, LeafSet::from_mask(depth, mask));
    size_[mask] = std::popcount(mask);
  }
}

std::vector<double> Enumerator::log_weights(double j) const {
  std::vector<double> lw(phi_.size());
  for (std::size_t mask = 0; mask < phi_.size(); ++mask) lw[mask] = j * size_[mask] - phi_[mask];
  return lw;
}

LogReal Enumerator::z(double j) const {
  const auto lw = log_weights(j);
  return LogReal::from_log(log_sum_exp<double>(lw));
}

CanonicalTable Enumerator::w() const {
  const std::size_t sizes = leaf_count(depth_) + 1;
  std::vector<std::vector<double>> by_size(sizes);
  for (std::size_t mask = 0; mask < phi_.size(); ++mask)
    by_size[static_cast<std::size_t>(size_[mask])].push_back(-phi_[mask]);
  CanonicalTable table{depth_, spec_id_, Eigen::VectorXd(static_cast<Eigen::Index>(sizes))};
  for (std::size_t a0 = 0; a0 < sizes; ++a0)
    table.ln_w(static_cast<Eigen::Index>(a0)) = log_sum_exp<double>(by_size[a0]);
  return table;
}

ExactDistribution Enumerator::distribution(double j) const {
  const auto lw = log_weights(j);
  ExactDistribution d{depth_, j, log_sum_exp<double>(lw),
                      Eigen::VectorXd(static_cast<Eigen::Index>(lw.size()))};
  for (std::size_t mask = 0; mask < lw.size(); ++mask)
    d.probability(static_cast<Eigen::Index>(mask)) = std::exp(lw[mask] - d.ln_z);
  return d;
}

double Enumerator::density(double j) const {
  const ExactDistribution d = distribution(j);
  CompensatedSum mean;
  for (std::size_t mask = 0; mask < size_.size(); ++mask)
    mean.add(d.probability(static_cast<Eigen::Index>(mask)) * size_[mask]);
  return mean.value() / static_cast<double>(leaf_count(depth_));
}

Eigen::VectorXd Enumerator::inclusion(double j) const {
  const ExactDistribution d = distribution(j);
  const std::size_t leaves = leaf_count(depth_);
  std::vector<CompensatedSum> acc(leaves);
  for (std::size_t mask = 0; mask < size_.size(); ++mask)
    for (std::size_t u = 0; u < leaves; ++u)
      if (mask >> u & 1U) acc[u].add(d.probability(static_cast<Eigen::Index>(mask)));
  Eigen::VectorXd out(static_cast<Eigen::Index>(leaves));
  for (std::size_t u = 0; u < leaves; ++u) out(static_cast<Eigen::Index>(u)) = acc[u].value();
  return out;
}

LogReal enum_Z(const ClusteringSpec& spec, int depth, double j) { return Enumerator(spec, depth).z(j); }

CanonicalTable enum_W(const ClusteringSpec& spec, int depth) { return Enumerator(spec, depth).w(); }

double enum_density(const ClusteringSpec& spec, int depth, double j) {
  return Enumerator(spec, depth).density(j);
}

}  // namespace pwc
