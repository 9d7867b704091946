#pragma once

#include <cstdint>
#include <vector>

#include "adiff/rng.hpp"
#include "adiff/tree.hpp"

namespace adiff {

/// One or two adjacent vertices known to hold the virtual source. Unordered.
using VirtualSourceSet = std::vector<VertexLabel>;

/// Set of equally ranked estimates.
///
/// Either an explicit sorted list, or a union of shells {v : X(v) = h} around
/// a one- or two-vertex center, which can be far too large to list.
class CandidateSet {
 public:
  CandidateSet() = default;

  static CandidateSet of(VertexSet vertices);
  /// `centers` has one vertex or two adjacent vertices; hops are >= 1.
  static CandidateSet shells(const TreeContext& ctx, VirtualSourceSet centers,
                             std::vector<int> hops);

  bool is_explicit() const noexcept { return !shell_; }
  bool empty() const noexcept { return size() == 0; }
  std::uint64_t size() const;
  bool contains(const VertexLabel& v) const;

  /// Uniform member; consumes exactly one draw.
  VertexLabel sample(Rng& rng) const;
  /// Member number `i` in a fixed order, 0 <= i < size().
  VertexLabel nth(std::uint64_t i) const;

  /// All members, sorted. Throws BudgetExceeded above `limit`.
  VertexSet materialize(std::uint64_t limit = 1'000'000) const;

  const std::vector<int>& hops() const noexcept { return hops_; }

 private:
  std::uint64_t shell_size(int h) const;

  bool shell_ = false;
  int d_ = 3;
  VertexSet vertices_;
  VirtualSourceSet centers_;
  std::vector<int> hops_;
};

}  // namespace adiff
