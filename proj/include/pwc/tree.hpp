#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace pwc {

/// Largest supported tree depth. Leaf indices are stored in 64 bits.
inline constexpr int kMaxDepth = 62;

/// Leaf indices encode the root-to-leaf path in binary, most significant bit first.
using LeafIndex = std::uint64_t;

void check_depth(int depth);

inline std::uint64_t leaf_count(int depth) { return std::uint64_t{1} << depth; }

/// A vertex of the depth-n binary tree. Ages count from the leaves (age 0)
/// up to the root (age n); `position` ranges over [0, 2^(n - age)).
struct VertexId {
  int depth = 0;
  int age = 0;
  std::uint64_t position = 0;

  friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

VertexId make_vertex(int depth, int age, std::uint64_t position);
inline VertexId leaf_vertex(int depth, LeafIndex leaf) { return make_vertex(depth, 0, leaf); }
inline VertexId root_vertex(int depth) { return make_vertex(depth, depth, 0); }

/// Ancestor of `v` at the given (older or equal) age.
VertexId ancestor(const VertexId& v, int age);

/// Youngest common ancestor of two vertices in the same tree.
VertexId lca(const VertexId& u, const VertexId& v);

/// Age of the youngest common ancestor of two leaves.
inline int lca_age(LeafIndex u, LeafIndex v) {
  return u == v ? 0 : 64 - __builtin_clzll(u ^ v);
}

/// A subset of the leaves of the depth-n tree, kept sorted and duplicate free.
class LeafSet {
 public:
  LeafSet() = default;
  LeafSet(int depth, std::vector<LeafIndex> members);

  /// Subset encoded by a bitmask over leaves (bit i set <=> leaf i present). depth <= 6.
  static LeafSet from_mask(int depth, std::uint64_t mask);
  static LeafSet all(int depth);

  int depth() const { return depth_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<LeafIndex>& members() const { return members_; }
  bool contains(LeafIndex leaf) const;

  /// Dyadic density |A| / 2^n.
  double density() const;
  std::uint64_t to_mask() const;

  std::string to_string() const;

  friend bool operator==(const LeafSet&, const LeafSet&) = default;

 private:
  int depth_ = 0;
  std::vector<LeafIndex> members_;
};

/// B(A) = {u ^ v : u, v in A}, sorted by (age, position). Leaves of A are included.
std::vector<VertexId> branching_points(const LeafSet& a);

/// beta_k = number of branching points of age <= k, for k = 0..n.
std::vector<std::int64_t> beta_profile(const LeafSet& a);

enum class Clustered { yes, no, too_large };

const char* to_string(Clustered c);

/// Decides A < B (A more clustered than B): a bijection s with
/// |u ^ v| <= |s(u) ^ s(v)| for all u, v in A. Exhaustive bijection search,
/// returning too_large when |A| exceeds size_limit. When use_profile_filter is
/// set, beta-profile dominance (a necessary condition) short-circuits to `no`.
Clustered is_more_clustered(const LeafSet& a, const LeafSet& b, int size_limit = 6,
                            bool use_profile_filter = true);

/// A tree automorphism given by a swap flag per internal vertex.
class TreeAutomorphism {
 public:
  TreeAutomorphism(int depth, std::vector<bool> swaps);

  /// The automorphism with index `code` among the 2^(2^n - 1) possible ones. depth <= 4.
  static TreeAutomorphism from_code(int depth, std::uint64_t code);
  static std::uint64_t count(int depth);

  LeafIndex apply(LeafIndex leaf) const;
  LeafSet apply(const LeafSet& a) const;

 private:
  int depth_;
  std::vector<bool> swaps_;  // heap order: root first, children of i at 2i+1, 2i+2
};

}  // namespace pwc
