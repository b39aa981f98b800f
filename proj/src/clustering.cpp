#include "pwc/clustering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pwc/patterns.hpp"

namespace pwc {

namespace {

constexpr int kSequenceGrid = 4096;
constexpr int kArrayGrid = 512;

std::string unavailable(const std::string& name, const std::string& index) {
  return "h-values of '" + name + "' unavailable at index " + index;
}

}  // namespace

HSequence HSequence::from_values(std::vector<double> values, std::string name) {
  HSequence h;
  h.name_ = std::move(name);
  h.values_ = std::move(values);
  for (double v : h.values_)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in '" + h.name_ + "'");
  h.nondecreasing_ = std::is_sorted(h.values_.begin(), h.values_.end());
  return h;
}

HSequence HSequence::closed_form(std::string name, std::function<double(int)> f,
                                 bool claimed_nondecreasing) {
  HSequence h;
  h.name_ = std::move(name);
  h.formula_ = std::move(f);
  bool ok = claimed_nondecreasing;
  for (int k = 0; ok && k < kSequenceGrid; ++k) ok = h.formula_(k) <= h.formula_(k + 1);
  h.nondecreasing_ = ok;
  return h;
}

double HSequence::operator()(int k) const {
  if (!available(k)) throw std::out_of_range(unavailable(name_, std::to_string(k)));
  return formula_ ? formula_(k) : values_[static_cast<std::size_t>(k)];
}

bool HSequence::available(int k) const {
  if (k < 0) return false;
  return formula_ ? true : static_cast<std::size_t>(k) < values_.size();
}

std::optional<int> HSequence::length() const {
  if (formula_) return std::nullopt;
  return static_cast<int>(values_.size());
}

HArray HArray::from_rows(std::vector<std::vector<double>> rows, std::string name) {
  HArray h;
  h.name_ = std::move(name);
  h.rows_ = std::move(rows);
  for (std::size_t i = 0; i < h.rows_.size(); ++i) {
    if (h.rows_[i].size() != i + 1)
      throw std::invalid_argument("row " + std::to_string(i + 1) + " of '" + h.name_ +
                                  "' needs " + std::to_string(i + 1) + " entries");
    for (double v : h.rows_[i])
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in '" + h.name_ + "'");
  }
  bool ok = true;
  for (std::size_t i = 0; ok && i < h.rows_.size(); ++i)
    for (std::size_t l = 0; ok && l <= i; ++l) {
      if (l + 1 <= i) ok = h.rows_[i][l] <= h.rows_[i][l + 1];
      if (ok && i + 1 < h.rows_.size()) ok = h.rows_[i][l] <= h.rows_[i + 1][l];
    }
  h.nondecreasing_ = ok;
  return h;
}

HArray HArray::closed_form(std::string name, std::function<double(int, int)> f,
                           bool claimed_nondecreasing) {
  HArray h;
  h.name_ = std::move(name);
  h.formula_ = std::move(f);
  bool ok = claimed_nondecreasing;
  for (int k = 1; ok && k < kArrayGrid; ++k)
    for (int l = 0; ok && l < k; ++l) {
      if (l + 1 < k) ok = h.formula_(k, l) <= h.formula_(k, l + 1);
      if (ok) ok = h.formula_(k, l) <= h.formula_(k + 1, l);
    }
  h.nondecreasing_ = ok;
  return h;
}

HArray HArray::from_sequence(const HSequence& seq, int max_k) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(max_k));
  for (int k = 1; k <= max_k; ++k)
    for (int l = 0; l < k; ++l) rows[static_cast<std::size_t>(k) - 1].push_back(seq(l));
  return from_rows(std::move(rows), "rows:" + seq.name());
}

double HArray::operator()(int k, int l) const {
  if (l < 0 || l >= k || !available(k))
    throw std::out_of_range(unavailable(name_, "(" + std::to_string(k) + "," + std::to_string(l) + ")"));
  return formula_ ? formula_(k, l) : rows_[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(l)];
}

bool HArray::available(int k) const {
  if (k < 1) return false;
  return formula_ ? true : static_cast<std::size_t>(k) <= rows_.size();
}

std::optional<int> HArray::rows() const {
  if (formula_) return std::nullopt;
  return static_cast<int>(rows_.size());
}

double constant_term(const FirstOrderSpec& spec, int depth) {
  return spec.h_const ? *spec.h_const : spec.h(depth);
}

double constant_term(const SecondOrderSpec& spec, int depth) {
  return spec.h_const ? *spec.h_const : spec.h(depth + 1, depth);
}

ConductanceProfile profile_for(const CapacitySpec& spec, int depth) {
  ConductanceProfile prof{depth, Eigen::VectorXd(depth)};
  for (int l = 0; l < depth; ++l) prof.conductance(l) = spec.conductance(l);
  validate(prof);
  return prof;
}

std::string describe(const ClusteringSpec& spec) {
  struct {
    std::string operator()(const ZeroSpec&) const { return "zero"; }
    std::string operator()(const FirstOrderSpec& s) const { return "first:" + s.h.name(); }
    std::string operator()(const SecondOrderSpec& s) const { return "second:" + s.h.name(); }
    std::string operator()(const CapacitySpec& s) const { return "capacity:" + s.conductance.name(); }
  } visitor;
  return std::visit(visitor, spec);
}

double phi(const ClusteringSpec& spec, const LeafSet& a) {
  if (a.empty()) return 0.0;
  const int n = a.depth();
  struct {
    const LeafSet& a;
    int n;
    double operator()(const ZeroSpec&) const { return 0.0; }
    double operator()(const FirstOrderSpec& s) const {
      const Pattern1 p = pattern1_of(a);
      double sum = constant_term(s, n);
      for (int k = 0; k <= n; ++k)
        if (p.b[static_cast<std::size_t>(k)] != 0)
          sum += s.h(k) * static_cast<double>(p.b[static_cast<std::size_t>(k)]);
      return sum;
    }
    double operator()(const SecondOrderSpec& s) const {
      const Pattern2 p = pattern2_of(a);
      double sum = constant_term(s, n);
      for (int k = 1; k <= n + 1; ++k)
        for (int l = 0; l < k; ++l)
          if (p(k, l) != 0) sum += s.h(k, l) * static_cast<double>(p(k, l));
      return sum;
    }
    double operator()(const CapacitySpec& s) const { return cap_reduce(a, profile_for(s, n)); }
  } visitor{a, n};
  return std::visit(visitor, spec);
}

MonotoneReport check_monotone(const ClusteringSpec& spec, int depth, int size_limit) {
  check_depth(depth);
  if (depth > 4) throw std::invalid_argument("check_monotone limited to depth <= 4");
  const std::uint64_t subsets = std::uint64_t{1} << leaf_count(depth);

  std::vector<double> value(subsets);
  std::vector<std::vector<std::uint64_t>> by_size(leaf_count(depth) + 1);
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    value[mask] = phi(spec, LeafSet::from_mask(depth, mask));
    by_size[static_cast<std::size_t>(std::popcount(mask))].push_back(mask);
  }
  const auto exceeds = [](double lhs, double rhs) {
    return lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs));
  };

  MonotoneReport report;
  const std::size_t limit = static_cast<std::size_t>(std::max(size_limit, 0));
  for (std::size_t size = 1; size < by_size.size() && size <= limit; ++size) {
    for (std::uint64_t ma : by_size[size]) {
      const LeafSet a = LeafSet::from_mask(depth, ma);
      for (std::uint64_t mb : by_size[size]) {
        const LeafSet b = LeafSet::from_mask(depth, mb);
        const Clustered c = is_more_clustered(a, b, size_limit);
        if (c == Clustered::too_large) {
          ++report.skipped;
          continue;
        }
        if (c == Clustered::no) continue;
        ++report.order_pairs;
        if (exceeds(value[ma], value[mb]))
          report.violations.push_back({'a', a, b, value[ma], value[mb], 0.0});
      }
    }
  }

  for (std::uint64_t ma = 1; ma < subsets; ++ma) {
    if (static_cast<std::size_t>(std::popcount(ma)) > limit) continue;
    const std::uint64_t rest = (subsets - 1) & ~ma;
    // Unordered disjoint pairs: enumerate nonempty submasks of the complement above ma.
    for (std::uint64_t mb = rest; mb != 0; mb = (mb - 1) & rest) {
      if (mb < ma || static_cast<std::size_t>(std::popcount(mb)) > limit) continue;
      ++report.union_pairs;
      if (exceeds(value[ma | mb], value[ma] + value[mb]))
        report.violations.push_back({'b', LeafSet::from_mask(depth, ma),
                                     LeafSet::from_mask(depth, mb), value[ma], value[mb],
                                     value[ma | mb]});
    }
  }
  return report;
}

HSequence linear_h(double c) {
  std::ostringstream name;
  name.precision(17);
  name << "linear:" << c;
  return HSequence::closed_form(name.str(), [c](int k) { return c * k; }, c >= 0.0);
}

HSequence log_corrected_h() {
  return HSequence::closed_form(
      "logcorrected",
      [](int k) { return std::numbers::ln2 * k + std::log(static_cast<double>(std::max(k, 1))); },
      true);
}

HArray dgff_h() {
  // Not monotone in the product order (e.g. h_{4,3} < h_{4,2}); the grid check
  // records that in the validity flag.
  return HArray::closed_form(
      "dgff",
      [](int k, int l) {
        const double m = static_cast<double>(std::min(l, k - l));
        return std::numbers::ln2 * l + 1.5 * std::max(0.0, std::log(std::max(m, 1.0)));
      },
      true);
}

SecondOrderSpec dgff_preset(int depth) {
  if (depth < 1) throw std::invalid_argument("dgff preset needs depth >= 1");
  SecondOrderSpec spec{dgff_h(), std::nullopt};
  spec.h_const = spec.h(depth + 1, depth);
  return spec;
}

}  // namespace pwc
