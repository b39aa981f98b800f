#include "pwc/sampler.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "pwc/dp.hpp"

namespace pwc {

namespace {

// Index of the largest log-weight after Gumbel perturbation.
int gumbel_choice(std::initializer_list<double> log_weights, SplitMix64& rng) {
  int best = -1, i = 0;
  double best_key = -std::numeric_limits<double>::infinity();
  for (double w : log_weights) {
    if (w != -std::numeric_limits<double>::infinity()) {
      const double key = w + rng.gumbel();
      if (best < 0 || key > best_key) {
        best = i;
        best_key = key;
      }
    }
    ++i;
  }
  return best;
}

}  // namespace

Sampler::Sampler(const ClusteringSpec& spec, int depth, double j) : depth_(depth) {
  if (std::holds_alternative<CapacitySpec>(spec))
    throw std::invalid_argument("no exact sampler for the capacity variant");
  if (const auto* s = std::get_if<SecondOrderSpec>(&spec)) {
    second_ = true;
    second_spec_ = *s;
    h_const_ = constant_term(*s, depth);
    f_ = second_order_table(s->h, depth, j);
  } else {
    first_ = as_first_order(spec);
    h_const_ = constant_term(first_, depth);
    y_ = first_order_table(first_.h, depth, j);
  }
}

LeafSet Sampler::sample(SplitMix64& rng) const {
  std::vector<LeafIndex> out;
  const double nonempty = -h_const_ + (second_ ? f_.back()[static_cast<std::size_t>(depth_) + 1] : y_.back());
  if (gumbel_choice({0.0, nonempty}, rng) == 1) {
    SplitMix64 child = rng.split();
    if (second_)
      descend_second(depth_, depth_ + 1, 0, child, out);
    else
      descend_first(depth_, 0, child, out);
  }
  return LeafSet(depth_, std::move(out));
}

void Sampler::descend_first(int d, std::uint64_t position, SplitMix64 rng, std::vector<LeafIndex>& out) const {
  if (d == 0) {
    out.push_back(position);
    return;
  }
  const double child = y_[static_cast<std::size_t>(d) - 1];
  const int choice = gumbel_choice({child, child, -first_.h(d) + 2.0 * child}, rng);
  if (choice == 0 || choice == 2) descend_first(d - 1, 2 * position, rng.split(), out);
  if (choice == 1 || choice == 2) descend_first(d - 1, 2 * position + 1, rng.split(), out);
}

void Sampler::descend_second(int d, int a, std::uint64_t position, SplitMix64 rng,
                             std::vector<LeafIndex>& out) const {
  if (d == 0) {
    out.push_back(position);
    return;
  }
  const auto& prev = f_[static_cast<std::size_t>(d) - 1];
  const double single = prev[static_cast<std::size_t>(a)];
  const int choice =
      gumbel_choice({single, single, -second_spec_.h(a, d) + 2.0 * prev[static_cast<std::size_t>(d)]}, rng);
  if (choice == 2) {
    descend_second(d - 1, d, 2 * position, rng.split(), out);
    descend_second(d - 1, d, 2 * position + 1, rng.split(), out);
  } else {
    descend_second(d - 1, a, 2 * position + static_cast<std::uint64_t>(choice), rng.split(), out);
  }
}

std::vector<LeafSet> Sampler::sample_many(std::size_t count, std::uint64_t seed) const {
  SplitMix64 rng(seed);
  std::vector<LeafSet> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SplitMix64 stream = rng.split();
    out.push_back(sample(stream));
  }
  return out;
}

DensityEstimate empirical_density(const ClusteringSpec& spec, int depth, double j, std::size_t samples,
                                  std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("empirical density needs at least two samples");
  const Sampler sampler(spec, depth, j);
  SplitMix64 rng(seed);
  const double scale = static_cast<double>(leaf_count(depth));
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    SplitMix64 stream = rng.split();
    const double x = static_cast<double>(sampler.sample(stream).size()) / scale;
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  const double variance = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(variance / static_cast<double>(samples)), samples};
}

std::vector<std::size_t> subset_counts(const std::vector<LeafSet>& samples) {
  if (samples.empty()) return {};
  const int depth = samples.front().depth();
  if (depth > 4) throw std::invalid_argument("subset counts limited to depth <= 4");
  std::vector<std::size_t> counts(std::size_t{1} << leaf_count(depth), 0);
  for (const auto& a : samples) ++counts[a.to_mask()];
  return counts;
}

double total_variation(const std::vector<std::size_t>& counts, const Eigen::VectorXd& probability) {
  if (counts.size() != static_cast<std::size_t>(probability.size()))
    throw std::invalid_argument("counts and probabilities differ in length");
  double total = 0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  double tv = 0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    tv += std::abs(static_cast<double>(counts[i]) / total - probability(static_cast<Eigen::Index>(i)));
  return tv / 2;
}

ChiSquareResult chi_square_gof(const std::vector<std::size_t>& counts, const Eigen::VectorXd& probability,
                               double min_expected) {
  if (counts.size() != static_cast<std::size_t>(probability.size()))
    throw std::invalid_argument("counts and probabilities differ in length");
  double total = 0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  ChiSquareResult r;
  double pooled_obs = 0, pooled_exp = 0;
  int bins = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probability(static_cast<Eigen::Index>(i));
    const double observed = static_cast<double>(counts[i]);
    if (expected < min_expected) {
      pooled_obs += observed;
      pooled_exp += expected;
      continue;
    }
    r.statistic += (observed - expected) * (observed - expected) / expected;
    ++bins;
  }
  if (pooled_exp > 0) {
    r.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++bins;
  }
  r.dof = bins - 1;
  if (r.dof < 1) return r;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

}  // namespace pwc
