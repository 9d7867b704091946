#include "adiff/candidates.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "adiff/errors.hpp"

namespace adiff {

CandidateSet CandidateSet::of(VertexSet vertices) {
  CandidateSet c;
  normalize(vertices);
  c.vertices_ = std::move(vertices);
  return c;
}

CandidateSet CandidateSet::shells(const TreeContext& ctx, VirtualSourceSet centers,
                                  std::vector<int> hops) {
  if (centers.empty() || centers.size() > 2) {
    throw std::invalid_argument("shell center must have one or two vertices");
  }
  if (centers.size() == 2 && distance(ctx, centers[0], centers[1]) != 1) {
    throw std::invalid_argument("two-vertex shell center must be an edge");
  }
  std::sort(hops.begin(), hops.end());
  hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
  if (!hops.empty() && hops.front() < 1) throw std::invalid_argument("shell hops must be >= 1");
  CandidateSet c;
  c.shell_ = true;
  c.d_ = ctx.degree();
  std::sort(centers.begin(), centers.end());
  c.centers_ = std::move(centers);
  c.hops_ = std::move(hops);
  return c;
}

std::uint64_t CandidateSet::shell_size(int h) const {
  const auto q = static_cast<std::uint64_t>(d_ - 1);
  std::uint64_t n = centers_.size() == 1 ? static_cast<std::uint64_t>(d_) : 2 * q;
  for (int i = 1; i < h; ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / q) {
      throw BudgetExceeded("candidate shell too large to count");
    }
    n *= q;
  }
  return n;
}

std::uint64_t CandidateSet::size() const {
  if (!shell_) return vertices_.size();
  std::uint64_t total = 0;
  for (int h : hops_) total += shell_size(h);
  return total;
}

bool CandidateSet::contains(const VertexLabel& v) const {
  if (!shell_) return set_contains(vertices_, v);
  const TreeContext ctx(d_);
  int x = distance(ctx, v, centers_[0]);
  if (centers_.size() == 2) x = std::min(x, distance(ctx, v, centers_[1]));
  return std::binary_search(hops_.begin(), hops_.end(), x);
}

VertexLabel CandidateSet::nth(std::uint64_t i) const {
  if (i >= size()) throw std::out_of_range("candidate index out of range");
  if (!shell_) return vertices_[static_cast<std::size_t>(i)];
  const TreeContext ctx(d_);
  int h = 0;
  for (int hop : hops_) {
    const auto n = shell_size(hop);
    if (i < n) {
      h = hop;
      break;
    }
    i -= n;
  }
  const auto q = static_cast<std::uint64_t>(d_ - 1);
  VertexLabel prev;
  VertexLabel cur;
  int remaining = h;
  if (centers_.size() == 1) {
    cur = centers_[0];
    auto first = neighbors(ctx, cur);
    const auto pick = i % static_cast<std::uint64_t>(d_);
    i /= static_cast<std::uint64_t>(d_);
    prev = cur;
    cur = first[static_cast<std::size_t>(pick)];
    --remaining;
  } else {
    const auto side = i % 2;
    i /= 2;
    cur = centers_[side];
    prev = centers_[1 - side];
  }
  for (; remaining > 0; --remaining) {
    auto next = neighbors(ctx, cur);
    next.erase(std::find(next.begin(), next.end(), prev));
    const auto pick = i % q;
    i /= q;
    prev = cur;
    cur = next[static_cast<std::size_t>(pick)];
  }
  return cur;
}

VertexLabel CandidateSet::sample(Rng& rng) const {
  const auto n = size();
  if (n == 0) throw std::logic_error("cannot sample from an empty candidate set");
  return nth(static_cast<std::uint64_t>(rng.index(static_cast<std::size_t>(n))));
}

VertexSet CandidateSet::materialize(std::uint64_t limit) const {
  if (!shell_) return vertices_;
  const auto n = size();
  if (n > limit) throw BudgetExceeded("candidate set has " + std::to_string(n) + " members");
  VertexSet out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(nth(i));
  normalize(out);
  return out;
}

}  // namespace adiff
