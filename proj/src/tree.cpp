#include "pwc/tree.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pwc {

void check_depth(int depth) {
  if (depth < 0 || depth > kMaxDepth)
    throw std::invalid_argument("tree depth " + std::to_string(depth) + " outside [0, " +
                                std::to_string(kMaxDepth) + "]");
}

VertexId make_vertex(int depth, int age, std::uint64_t position) {
  check_depth(depth);
  if (age < 0 || age > depth)
    throw std::invalid_argument("vertex age " + std::to_string(age) + " outside [0, depth]");
  if (position >= (std::uint64_t{1} << (depth - age)))
    throw std::invalid_argument("vertex position out of range for its age");
  return VertexId{depth, age, position};
}

VertexId ancestor(const VertexId& v, int age) {
  if (age < v.age || age > v.depth) throw std::invalid_argument("ancestor age out of range");
  return VertexId{v.depth, age, v.position >> (age - v.age)};
}

VertexId lca(const VertexId& u, const VertexId& v) {
  if (u.depth != v.depth) throw std::invalid_argument("lca of vertices from different trees");
  const int age = std::max(u.age, v.age);
  const std::uint64_t pu = u.position >> (age - u.age);
  const std::uint64_t pv = v.position >> (age - v.age);
  const std::uint64_t diff = pu ^ pv;
  const int extra = diff == 0 ? 0 : 64 - __builtin_clzll(diff);
  return VertexId{u.depth, age + extra, pu >> extra};
}

LeafSet::LeafSet(int depth, std::vector<LeafIndex> members)
    : depth_(depth), members_(std::move(members)) {
  check_depth(depth);
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw std::invalid_argument("duplicate leaf in leaf set");
  if (!members_.empty() && members_.back() >= leaf_count(depth))
    throw std::invalid_argument("leaf index " + std::to_string(members_.back()) +
                                " out of range for depth " + std::to_string(depth));
}

LeafSet LeafSet::from_mask(int depth, std::uint64_t mask) {
  if (depth > 6) throw std::invalid_argument("bitmask leaf sets need depth <= 6");
  std::vector<LeafIndex> m;
  for (LeafIndex i = 0; i < leaf_count(depth); ++i)
    if (mask >> i & 1U) m.push_back(i);
  if (depth < 6 && (mask >> leaf_count(depth)) != 0)
    throw std::invalid_argument("bitmask has bits beyond the leaf count");
  return LeafSet(depth, std::move(m));
}

LeafSet LeafSet::all(int depth) {
  check_depth(depth);
  if (depth > 30) throw std::invalid_argument("full leaf set too large to materialize");
  std::vector<LeafIndex> m(leaf_count(depth));
  for (LeafIndex i = 0; i < m.size(); ++i) m[i] = i;
  return LeafSet(depth, std::move(m));
}

bool LeafSet::contains(LeafIndex leaf) const {
  return std::binary_search(members_.begin(), members_.end(), leaf);
}

double LeafSet::density() const {
  return static_cast<double>(members_.size()) / static_cast<double>(leaf_count(depth_));
}

std::uint64_t LeafSet::to_mask() const {
  if (depth_ > 6) throw std::invalid_argument("bitmask leaf sets need depth <= 6");
  std::uint64_t mask = 0;
  for (LeafIndex i : members_) mask |= std::uint64_t{1} << i;
  return mask;
}

std::string LeafSet::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < members_.size(); ++i) os << (i ? "," : "") << members_[i];
  os << ']';
  return os.str();
}

std::vector<VertexId> branching_points(const LeafSet& a) {
  if (a.empty()) throw std::invalid_argument("branching points of an empty set");
  const auto& m = a.members();
  std::vector<VertexId> out;
  out.reserve(2 * m.size());
  for (LeafIndex leaf : m) out.push_back(VertexId{a.depth(), 0, leaf});
  // In sorted order every pairwise lca is the lca of some adjacent pair.
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    const int age = lca_age(m[i], m[i + 1]);
    out.push_back(VertexId{a.depth(), age, m[i] >> age});
  }
  std::sort(out.begin(), out.end(), [](const VertexId& x, const VertexId& y) {
    return x.age != y.age ? x.age < y.age : x.position < y.position;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::int64_t> beta_profile(const LeafSet& a) {
  std::vector<std::int64_t> beta(a.depth() + 1, 0);
  for (const VertexId& v : branching_points(a)) ++beta[v.age];
  for (int k = 1; k <= a.depth(); ++k) beta[k] += beta[k - 1];
  return beta;
}

const char* to_string(Clustered c) {
  switch (c) {
    case Clustered::yes: return "yes";
    case Clustered::no: return "no";
    case Clustered::too_large: return "too-large";
  }
  return "?";
}

namespace {

struct BijectionSearch {
  std::size_t m;
  std::vector<int> age_a;  // m x m
  std::vector<int> age_b;
  std::vector<int> sigma;
  std::vector<bool> used;

  bool extend(std::size_t i) {
    if (i == m) return true;
    for (std::size_t c = 0; c < m; ++c) {
      if (used[c]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j)
        ok = age_a[i * m + j] <= age_b[c * m + static_cast<std::size_t>(sigma[j])];
      if (!ok) continue;
      used[c] = true;
      sigma[i] = static_cast<int>(c);
      if (extend(i + 1)) return true;
      used[c] = false;
    }
    return false;
  }
};

}  // namespace

Clustered is_more_clustered(const LeafSet& a, const LeafSet& b, int size_limit,
                            bool use_profile_filter) {
  if (a.size() != b.size())
    throw std::invalid_argument("is_more_clustered needs sets of equal cardinality");
  if (a.depth() != b.depth()) throw std::invalid_argument("leaf sets from different trees");
  if (a.size() > static_cast<std::size_t>(std::max(size_limit, 0))) return Clustered::too_large;
  if (a.size() <= 1) return Clustered::yes;

  const auto beta_a = beta_profile(a);
  const auto beta_b = beta_profile(b);
  bool dominates = true;
  for (std::size_t k = 0; k < beta_a.size(); ++k) dominates = dominates && beta_a[k] >= beta_b[k];
  if (use_profile_filter && !dominates) return Clustered::no;

  const std::size_t m = a.size();
  BijectionSearch search{m, std::vector<int>(m * m), std::vector<int>(m * m),
                         std::vector<int>(m, -1), std::vector<bool>(m, false)};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      search.age_a[i * m + j] = lca_age(a.members()[i], a.members()[j]);
      search.age_b[i * m + j] = lca_age(b.members()[i], b.members()[j]);
    }
  if (!search.extend(0)) return Clustered::no;
  if (!dominates)
    throw std::logic_error("clustering bijection found without beta-profile dominance");
  return Clustered::yes;
}

TreeAutomorphism::TreeAutomorphism(int depth, std::vector<bool> swaps)
    : depth_(depth), swaps_(std::move(swaps)) {
  check_depth(depth);
  if (depth > 20) throw std::invalid_argument("automorphisms supported for depth <= 20");
  if (swaps_.size() != leaf_count(depth) - 1)
    throw std::invalid_argument("automorphism needs one swap flag per internal vertex");
}

TreeAutomorphism TreeAutomorphism::from_code(int depth, std::uint64_t code) {
  if (depth > 4) throw std::invalid_argument("automorphism codes supported for depth <= 4");
  std::vector<bool> swaps(leaf_count(depth) - 1);
  for (std::size_t i = 0; i < swaps.size(); ++i) swaps[i] = (code >> i) & 1U;
  return TreeAutomorphism(depth, std::move(swaps));
}

std::uint64_t TreeAutomorphism::count(int depth) {
  if (depth > 4) throw std::invalid_argument("automorphism codes supported for depth <= 4");
  return std::uint64_t{1} << (leaf_count(depth) - 1);
}

LeafIndex TreeAutomorphism::apply(LeafIndex leaf) const {
  LeafIndex image = 0;
  std::size_t node = 0;
  for (int level = depth_ - 1; level >= 0; --level) {
    const unsigned bit = (leaf >> level) & 1U;
    image = (image << 1) | (bit ^ static_cast<unsigned>(swaps_[node]));
    node = 2 * node + 1 + bit;
  }
  return image;
}

LeafSet TreeAutomorphism::apply(const LeafSet& a) const {
  if (a.depth() != depth_) throw std::invalid_argument("automorphism depth mismatch");
  std::vector<LeafIndex> out;
  out.reserve(a.size());
  for (LeafIndex leaf : a.members()) out.push_back(apply(leaf));
  return LeafSet(depth_, std::move(out));
}

}  // namespace pwc
