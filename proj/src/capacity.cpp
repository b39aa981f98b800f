#include "pwc/capacity.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace pwc {

template <typename Scalar>
void validate(const BasicConductanceProfile<Scalar>& prof) {
  check_depth(prof.depth);
  if (prof.conductance.size() != prof.depth)
    throw std::invalid_argument("conductance profile needs " + std::to_string(prof.depth) +
                                " levels, got " + std::to_string(prof.conductance.size()));
  for (Eigen::Index l = 0; l < prof.conductance.size(); ++l)
    if (!(prof.conductance(l) > Scalar(0)))
      throw std::invalid_argument("conductance at level " + std::to_string(l) +
                                  " is not positive");
}

namespace {

// Resistance from a vertex of the given age down to the sorted leaves below it.
template <typename Scalar>
Scalar reduce(int age, std::span<const LeafIndex> leaves, const VectorX<Scalar>& r) {
  if (age == 0) return Scalar(0);
  const LeafIndex bit = LeafIndex{1} << (age - 1);
  auto split = leaves.begin();
  while (split != leaves.end() && !(*split & bit)) ++split;
  const std::span<const LeafIndex> left(leaves.begin(), split), right(split, leaves.end());
  if (left.empty()) return r(age - 1) + reduce(age - 1, right, r);
  if (right.empty()) return r(age - 1) + reduce(age - 1, left, r);
  const Scalar x = r(age - 1) + reduce(age - 1, left, r);
  const Scalar y = r(age - 1) + reduce(age - 1, right, r);
  return x * y / (x + y);
}

void require_capacity_input(const LeafSet& a, int depth) {
  if (a.empty()) throw std::invalid_argument("capacity of an empty set");
  if (a.depth() != depth) throw std::invalid_argument("profile depth does not match leaf set");
  if (depth == 0) throw std::invalid_argument("capacity needs depth >= 1");
}

}  // namespace

template <typename Scalar>
Scalar resistance_reduce(const LeafSet& a, const BasicConductanceProfile<Scalar>& prof) {
  validate(prof);
  require_capacity_input(a, prof.depth);
  return reduce<Scalar>(prof.depth, a.members(), prof.resistance());
}

template <typename Scalar>
Scalar cap_reduce(const LeafSet& a, const BasicConductanceProfile<Scalar>& prof) {
  return Scalar(1) / resistance_reduce(a, prof);
}

template void validate(const ConductanceProfile&);
template void validate(const ExactConductanceProfile&);
template double resistance_reduce(const LeafSet&, const ConductanceProfile&);
template Rational resistance_reduce(const LeafSet&, const ExactConductanceProfile&);
template double cap_reduce(const LeafSet&, const ConductanceProfile&);
template Rational cap_reduce(const LeafSet&, const ExactConductanceProfile&);

double cap_quadratic(const LeafSet& a, const ConductanceProfile& prof) {
  validate(prof);
  require_capacity_input(a, prof.depth);
  const int n = prof.depth;
  if (n > 8) throw std::invalid_argument("cap_quadratic limited to depth <= 8");

  // Heap order: vertex 0 is the root, children of i are 2i+1 and 2i+2; leaf j is 2^n - 1 + j.
  const Eigen::Index vertices = (Eigen::Index{2} << n) - 1;
  const Eigen::Index first_leaf = (Eigen::Index{1} << n) - 1;
  auto age_of = [&](Eigen::Index v) {
    int depth_from_root = 0;
    for (Eigen::Index x = v + 1; x > 1; x >>= 1) ++depth_from_root;
    return n - depth_from_root;
  };

  // Boundary values: NaN marks an unknown.
  Eigen::VectorXd f = Eigen::VectorXd::Constant(vertices, std::numeric_limits<double>::quiet_NaN());
  f(0) = 1.0;
  for (LeafIndex leaf : a.members()) f(first_leaf + static_cast<Eigen::Index>(leaf)) = 0.0;

  std::vector<Eigen::Index> unknown_index(static_cast<std::size_t>(vertices), -1);
  Eigen::Index unknowns = 0;
  for (Eigen::Index v = 0; v < vertices; ++v)
    if (std::isnan(f(v))) unknown_index[static_cast<std::size_t>(v)] = unknowns++;

  if (unknowns > 0) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(unknowns, unknowns);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    for (Eigen::Index c = 1; c < vertices; ++c) {
      const Eigen::Index p = (c - 1) / 2;
      const double cond = prof.conductance(age_of(c));
      const Eigen::Index ip = unknown_index[static_cast<std::size_t>(p)];
      const Eigen::Index ic = unknown_index[static_cast<std::size_t>(c)];
      if (ip >= 0) lap(ip, ip) += cond;
      if (ic >= 0) lap(ic, ic) += cond;
      if (ip >= 0 && ic >= 0) {
        lap(ip, ic) -= cond;
        lap(ic, ip) -= cond;
      } else if (ip >= 0) {
        rhs(ip) += cond * f(c);
      } else if (ic >= 0) {
        rhs(ic) += cond * f(p);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(lap);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("singular harmonic system in cap_quadratic");
    const Eigen::VectorXd solution = llt.solve(rhs);
    for (Eigen::Index v = 0; v < vertices; ++v)
      if (unknown_index[static_cast<std::size_t>(v)] >= 0)
        f(v) = solution(unknown_index[static_cast<std::size_t>(v)]);
  }

  double energy = 0.0;
  for (Eigen::Index c = 1; c < vertices; ++c) {
    const double grad = f((c - 1) / 2) - f(c);
    energy += prof.conductance(age_of(c)) * grad * grad;
  }
  return energy;
}

LeafMeasure::LeafMeasure(LeafSet s, Eigen::VectorXd w) : support(std::move(s)), weight(std::move(w)) {
  if (support.empty()) throw std::invalid_argument("leaf measure on an empty set");
  if (weight.size() != static_cast<Eigen::Index>(support.size()))
    throw std::invalid_argument("leaf measure needs one weight per support leaf");
  if ((weight.array() < 0.0).any()) throw std::invalid_argument("negative leaf measure weight");
  if (std::abs(weight.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("leaf measure weights do not sum to 1");
}

double flow_energy(const LeafMeasure& mu, const ConductanceProfile& prof) {
  if (mu.support.depth() != prof.depth)
    throw std::invalid_argument("profile depth does not match measure support");
  const Eigen::VectorXd alpha = alpha_profile(prof);
  const auto& m = mu.support.members();
  const Eigen::Index size = mu.weight.size();
  Eigen::MatrixXd kernel(size, size);
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = 0; j < size; ++j)
      kernel(i, j) = alpha(lca_age(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]));
  return mu.weight.dot(kernel * mu.weight);
}

namespace {

void split_flow(int age, std::span<const LeafIndex> leaves, double flow, const Eigen::VectorXd& r,
                std::vector<double>& out, std::size_t offset) {
  if (age == 0) {
    out[offset] = flow;
    return;
  }
  const LeafIndex bit = LeafIndex{1} << (age - 1);
  auto split = leaves.begin();
  while (split != leaves.end() && !(*split & bit)) ++split;
  const std::span<const LeafIndex> left(leaves.begin(), split), right(split, leaves.end());
  if (left.empty() || right.empty()) {
    split_flow(age - 1, leaves, flow, r, out, offset);
    return;
  }
  const double x = r(age - 1) + reduce<double>(age - 1, left, r);
  const double y = r(age - 1) + reduce<double>(age - 1, right, r);
  split_flow(age - 1, left, flow * y / (x + y), r, out, offset);
  split_flow(age - 1, right, flow * x / (x + y), r, out, offset + left.size());
}

}  // namespace

LeafMeasure optimal_measure(const LeafSet& a, const ConductanceProfile& prof) {
  validate(prof);
  require_capacity_input(a, prof.depth);
  std::vector<double> w(a.size());
  split_flow(prof.depth, a.members(), 1.0, prof.resistance(), w, 0);
  Eigen::VectorXd weight = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  weight /= weight.sum();
  return LeafMeasure(a, std::move(weight));
}

}  // namespace pwc
