#pragma once

// Geometry of the infinite d-regular tree.
//
// Vertices are named by their path from the true source: the empty label is
// the source, the first entry picks one of the d source edges and every later
// entry picks one of the d-1 edges leading away from the source. The labeling
// is a simulation convenience; estimators only go through the free functions
// below (distances, paths, neighbors) and never look at label entries.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace adiff {

class TreeContext;

class VertexLabel {
 public:
  using Step = std::uint8_t;
  using Steps = boost::container::small_vector<Step, 16>;

  /// The source.
  VertexLabel() = default;

  /// Checked construction; throws InvalidLabel when an entry is out of range.
  static VertexLabel from_steps(const TreeContext& ctx, std::span<const int> steps);
  static VertexLabel from_steps(const TreeContext& ctx, std::initializer_list<int> steps);

  /// Parses "/" or "/2/0/1".
  static VertexLabel parse(const TreeContext& ctx, std::string_view text);

  std::size_t depth() const noexcept { return steps_.size(); }
  bool is_source() const noexcept { return steps_.empty(); }
  std::span<const Step> steps() const noexcept { return {steps_.data(), steps_.size()}; }

  /// Requires !is_source().
  VertexLabel parent() const;
  /// Appends one step without range checking.
  VertexLabel child(Step step) const;

  /// True when this vertex lies on the path from the source to `other`.
  bool is_prefix_of(const VertexLabel& other) const noexcept;

  std::string to_string() const;

  friend bool operator==(const VertexLabel& a, const VertexLabel& b) noexcept {
    return a.steps_.size() == b.steps_.size() &&
           std::equal(a.steps_.begin(), a.steps_.end(), b.steps_.begin());
  }
  friend std::strong_ordering operator<=>(const VertexLabel& a, const VertexLabel& b) noexcept {
    return std::lexicographical_compare_three_way(a.steps_.begin(), a.steps_.end(),
                                                  b.steps_.begin(), b.steps_.end());
  }

 private:
  Steps steps_;
};

struct VertexLabelHash {
  std::size_t operator()(const VertexLabel& v) const noexcept;
};

/// Sorted, duplicate-free list of vertices.
using VertexSet = std::vector<VertexLabel>;

/// Sorts and removes duplicates in place.
void normalize(VertexSet& set);
bool set_contains(const VertexSet& set, const VertexLabel& v);
VertexSet set_intersection(const VertexSet& a, const VertexSet& b);

/// Degree of the tree; d >= 3.
class TreeContext {
 public:
  explicit TreeContext(int degree);

  int degree() const noexcept { return d_; }

  bool valid(const VertexLabel& v) const noexcept;
  /// Throws InvalidLabel.
  void validate(const VertexLabel& v) const;

  /// Number of neighbors of `v` that lead away from the source.
  int child_count(const VertexLabel& v) const noexcept { return v.is_source() ? d_ : d_ - 1; }

  friend bool operator==(const TreeContext&, const TreeContext&) = default;

 private:
  int d_;
};

std::size_t common_prefix(const VertexLabel& a, const VertexLabel& b) noexcept;

/// Graph distance |u| + |v| - 2 lcp(u, v).
int distance(const TreeContext& ctx, const VertexLabel& u, const VertexLabel& v);

/// Vertices of the unique u-v path, both ends included.
std::vector<VertexLabel> path_between(const TreeContext& ctx, const VertexLabel& u,
                                      const VertexLabel& v);

/// All d neighbors: the parent first (unless v is the source), then children in step order.
std::vector<VertexLabel> neighbors(const TreeContext& ctx, const VertexLabel& v);

/// The neighbor of `from` on the path to `to`. Requires from != to.
VertexLabel next_hop(const TreeContext& ctx, const VertexLabel& from, const VertexLabel& to);

/// Index of next_hop(from, to) within neighbors(from), without building labels.
int direction_toward(const TreeContext& ctx, const VertexLabel& from, const VertexLabel& to);

/// Whether x and y fall in the same component of the tree with `root` removed.
/// Throws std::invalid_argument if x or y equals root.
bool same_subtree(const TreeContext& ctx, const VertexLabel& root, const VertexLabel& x,
                  const VertexLabel& y);

/// path_between without its two endpoints.
std::vector<VertexLabel> path_interior(const TreeContext& ctx, const VertexLabel& u,
                                       const VertexLabel& v);

/// Vertices adjacent to some member of `set` but not in it.
VertexSet boundary_of(const TreeContext& ctx, std::span<const VertexLabel> set);

/// Minimal subtree spanning the terminals. Throws std::invalid_argument when empty.
VertexSet steiner_tree(const TreeContext& ctx, std::span<const VertexLabel> terminals);

/// Every vertex within `depth` of some core vertex.
VertexSet neighborhood_of_set(const TreeContext& ctx, std::span<const VertexLabel> core,
                              int depth);

/// Same as neighborhood_of_set, paired with each vertex's distance to the core,
/// in breadth-first order.
std::vector<std::pair<VertexLabel, int>> layered_neighborhood(const TreeContext& ctx,
                                                              std::span<const VertexLabel> core,
                                                              int depth);

/// |B_r(v)| = 1 + d((d-1)^r - 1)/(d-2).
std::uint64_t ball_size(int d, int r);

}  // namespace adiff
