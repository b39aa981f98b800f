#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pwc/capacity.hpp"
#include "pwc/tree.hpp"

namespace pwc {

/// A real sequence h_0, h_1, ... given by an explicit list or a closed form.
class HSequence {
 public:
  HSequence() = default;
  static HSequence from_values(std::vector<double> values, std::string name = "explicit");
  /// `claimed_nondecreasing` is confirmed on a dense index grid before the flag is set.
  static HSequence closed_form(std::string name, std::function<double(int)> f,
                               bool claimed_nondecreasing);

  double operator()(int k) const;
  bool available(int k) const;
  /// Length of an explicit list; nullopt for closed forms.
  std::optional<int> length() const;
  const std::string& name() const { return name_; }
  bool nondecreasing() const { return nondecreasing_; }

 private:
  std::string name_;
  std::vector<double> values_;
  std::function<double(int)> formula_;
  bool nondecreasing_ = false;
};

/// A triangular array h_{k,l}, 0 <= l < k.
class HArray {
 public:
  HArray() = default;
  /// rows[k - 1] holds h_{k,0..k-1}.
  static HArray from_rows(std::vector<std::vector<double>> rows, std::string name = "explicit");
  static HArray closed_form(std::string name, std::function<double(int, int)> f,
                            bool claimed_nondecreasing);
  /// h_{k,l} = h_l, independent of k.
  static HArray from_sequence(const HSequence& h, int max_k);

  double operator()(int k, int l) const;
  bool available(int k) const;
  std::optional<int> rows() const;
  const std::string& name() const { return name_; }
  /// Product-order monotone: k <= k' and l <= l' imply h_{k,l} <= h_{k',l'}.
  bool nondecreasing() const { return nondecreasing_; }

 private:
  std::string name_;
  std::vector<std::vector<double>> rows_;
  std::function<double(int, int)> formula_;
  bool nondecreasing_ = false;
};

struct ZeroSpec {};

/// Phi(A) = sum_k h_k b_k + h for nonempty A. Missing h means h = h_n.
struct FirstOrderSpec {
  HSequence h;
  std::optional<double> h_const;
};

/// Phi(A) = sum_{k,l} h_{k,l} b_{k,l} + h for nonempty A. Missing h means h = h_{n+1,n}.
struct SecondOrderSpec {
  HArray h;
  std::optional<double> h_const;
};

/// Phi(A) = CAP(A) under the level conductances C_l.
struct CapacitySpec {
  HSequence conductance;
};

using ClusteringSpec = std::variant<ZeroSpec, FirstOrderSpec, SecondOrderSpec, CapacitySpec>;

double constant_term(const FirstOrderSpec& spec, int depth);
double constant_term(const SecondOrderSpec& spec, int depth);
ConductanceProfile profile_for(const CapacitySpec& spec, int depth);

/// Short identifier used in outputs: zero, first:<name>, second:<name>, capacity:<name>.
std::string describe(const ClusteringSpec& spec);

double phi(const ClusteringSpec& spec, const LeafSet& a);

struct MonotoneViolation {
  char condition;  // 'a': A < B but Phi(A) > Phi(B); 'b': Phi(A u B) > Phi(A) + Phi(B)
  LeafSet a, b;
  double phi_a = 0, phi_b = 0, phi_union = 0;
};

struct MonotoneReport {
  std::size_t order_pairs = 0;   // comparable pairs checked for (a)
  std::size_t union_pairs = 0;   // disjoint pairs checked for (b)
  std::size_t skipped = 0;       // pairs the order search declined as too large
  std::vector<MonotoneViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Exhaustive check of both monotonicity conditions over subsets of size <= size_limit.
/// depth <= 4.
MonotoneReport check_monotone(const ClusteringSpec& spec, int depth, int size_limit = 4);

/// h_k = c k.
HSequence linear_h(double c);
/// h_k = (ln 2) k + ln(max(k, 1)).
HSequence log_corrected_h();
/// h_{k,l} = (ln 2) l + 1.5 ln+(min(l, k - l)).
HArray dgff_h();
/// Second-order spec with the array above and h = h_{n+1,n}.
SecondOrderSpec dgff_preset(int depth);

}  // namespace pwc
