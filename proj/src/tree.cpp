#include "adiff/tree.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <stdexcept>
#include <unordered_set>

#include "adiff/errors.hpp"

namespace adiff {

VertexLabel VertexLabel::from_steps(const TreeContext& ctx, std::span<const int> steps) {
  VertexLabel v;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const int limit = i == 0 ? ctx.degree() : ctx.degree() - 1;
    if (steps[i] < 0 || steps[i] >= limit) {
      throw InvalidLabel("label entry " + std::to_string(steps[i]) + " at position " +
                         std::to_string(i) + " out of range for d=" +
                         std::to_string(ctx.degree()));
    }
    v.steps_.push_back(static_cast<Step>(steps[i]));
  }
  return v;
}

VertexLabel VertexLabel::from_steps(const TreeContext& ctx, std::initializer_list<int> steps) {
  return from_steps(ctx, std::span<const int>(steps.begin(), steps.size()));
}

VertexLabel VertexLabel::parse(const TreeContext& ctx, std::string_view text) {
  if (text.empty() || text.front() != '/') {
    throw InvalidLabel("vertex label must start with '/': \"" + std::string(text) + "\"");
  }
  std::vector<int> steps;
  std::size_t pos = 1;
  while (pos < text.size()) {
    std::size_t end = text.find('/', pos);
    if (end == std::string_view::npos) end = text.size();
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, value);
    if (ec != std::errc() || ptr != text.data() + end) {
      throw InvalidLabel("malformed vertex label \"" + std::string(text) + "\"");
    }
    steps.push_back(value);
    pos = end + 1;
    if (end + 1 == text.size()) throw InvalidLabel("trailing '/' in \"" + std::string(text) + "\"");
  }
  return from_steps(ctx, steps);
}

VertexLabel VertexLabel::parent() const {
  if (is_source()) throw std::logic_error("the source has no parent");
  VertexLabel p = *this;
  p.steps_.pop_back();
  return p;
}

VertexLabel VertexLabel::child(Step step) const {
  VertexLabel c = *this;
  c.steps_.push_back(step);
  return c;
}

bool VertexLabel::is_prefix_of(const VertexLabel& other) const noexcept {
  return steps_.size() <= other.steps_.size() &&
         std::equal(steps_.begin(), steps_.end(), other.steps_.begin());
}

std::string VertexLabel::to_string() const {
  if (steps_.empty()) return "/";
  std::string out;
  for (Step s : steps_) {
    out += '/';
    out += std::to_string(static_cast<int>(s));
  }
  return out;
}

std::size_t VertexLabelHash::operator()(const VertexLabel& v) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ v.depth();
  for (auto s : v.steps()) {
    h ^= s;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

void normalize(VertexSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

bool set_contains(const VertexSet& set, const VertexLabel& v) {
  return std::binary_search(set.begin(), set.end(), v);
}

VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

TreeContext::TreeContext(int degree) : d_(degree) {
  if (degree < 3 || degree > 255) {
    throw std::invalid_argument("tree degree must be in [3, 255], got " + std::to_string(degree));
  }
}

bool TreeContext::valid(const VertexLabel& v) const noexcept {
  auto steps = v.steps();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const int limit = i == 0 ? d_ : d_ - 1;
    if (steps[i] >= limit) return false;
  }
  return true;
}

void TreeContext::validate(const VertexLabel& v) const {
  if (!valid(v)) {
    throw InvalidLabel("label " + v.to_string() + " is not a vertex of T_" + std::to_string(d_));
  }
}

std::size_t common_prefix(const VertexLabel& a, const VertexLabel& b) noexcept {
  auto sa = a.steps();
  auto sb = b.steps();
  const std::size_t n = std::min(sa.size(), sb.size());
  std::size_t i = 0;
  while (i < n && sa[i] == sb[i]) ++i;
  return i;
}

int distance(const TreeContext& ctx, const VertexLabel& u, const VertexLabel& v) {
  ctx.validate(u);
  ctx.validate(v);
  const std::size_t m = common_prefix(u, v);
  return static_cast<int>(u.depth() + v.depth() - 2 * m);
}

std::vector<VertexLabel> path_between(const TreeContext& ctx, const VertexLabel& u,
                                      const VertexLabel& v) {
  ctx.validate(u);
  ctx.validate(v);
  const std::size_t m = common_prefix(u, v);
  std::vector<VertexLabel> path;
  path.reserve(u.depth() + v.depth() - 2 * m + 1);
  VertexLabel cur = u;
  path.push_back(cur);
  while (cur.depth() > m) {
    cur = cur.parent();
    path.push_back(cur);
  }
  auto vs = v.steps();
  for (std::size_t i = m; i < vs.size(); ++i) {
    cur = cur.child(vs[i]);
    path.push_back(cur);
  }
  return path;
}

std::vector<VertexLabel> neighbors(const TreeContext& ctx, const VertexLabel& v) {
  ctx.validate(v);
  std::vector<VertexLabel> out;
  out.reserve(static_cast<std::size_t>(ctx.degree()));
  if (!v.is_source()) out.push_back(v.parent());
  const int children = ctx.child_count(v);
  for (int i = 0; i < children; ++i) out.push_back(v.child(static_cast<VertexLabel::Step>(i)));
  return out;
}

VertexLabel next_hop(const TreeContext& ctx, const VertexLabel& from, const VertexLabel& to) {
  ctx.validate(from);
  ctx.validate(to);
  if (from == to) throw std::invalid_argument("next_hop: endpoints coincide");
  if (from.is_prefix_of(to)) return from.child(to.steps()[from.depth()]);
  return from.parent();
}

int direction_toward(const TreeContext& ctx, const VertexLabel& from, const VertexLabel& to) {
  if (from == to) throw std::invalid_argument("direction_toward: endpoints coincide");
  if (from.is_prefix_of(to)) {
    const int step = to.steps()[from.depth()];
    return from.is_source() ? step : step + 1;
  }
  (void)ctx;
  return 0;
}

bool same_subtree(const TreeContext& ctx, const VertexLabel& root, const VertexLabel& x,
                  const VertexLabel& y) {
  if (x == root || y == root) {
    throw std::invalid_argument("same_subtree: x and y must differ from root");
  }
  return next_hop(ctx, root, x) == next_hop(ctx, root, y);
}

std::vector<VertexLabel> path_interior(const TreeContext& ctx, const VertexLabel& u,
                                       const VertexLabel& v) {
  auto p = path_between(ctx, u, v);
  if (p.size() <= 2) return {};
  return {p.begin() + 1, p.end() - 1};
}

VertexSet boundary_of(const TreeContext& ctx, std::span<const VertexLabel> set) {
  VertexSet members(set.begin(), set.end());
  normalize(members);
  VertexSet out;
  for (const auto& v : members) {
    for (auto& w : neighbors(ctx, v)) {
      if (!set_contains(members, w)) out.push_back(std::move(w));
    }
  }
  normalize(out);
  return out;
}

VertexSet steiner_tree(const TreeContext& ctx, std::span<const VertexLabel> terminals) {
  if (terminals.empty()) throw std::invalid_argument("steiner_tree: no terminals");
  // In a tree, the paths from one terminal to all others already cover every
  // pairwise path.
  VertexSet out;
  out.push_back(terminals.front());
  ctx.validate(terminals.front());
  for (std::size_t i = 1; i < terminals.size(); ++i) {
    auto p = path_between(ctx, terminals.front(), terminals[i]);
    out.insert(out.end(), p.begin(), p.end());
  }
  normalize(out);
  return out;
}

std::vector<std::pair<VertexLabel, int>> layered_neighborhood(const TreeContext& ctx,
                                                              std::span<const VertexLabel> core,
                                                              int depth) {
  if (depth < 0) throw std::invalid_argument("neighborhood depth must be non-negative");
  std::unordered_set<VertexLabel, VertexLabelHash> seen;
  std::vector<std::pair<VertexLabel, int>> out;
  for (const auto& v : core) {
    ctx.validate(v);
    if (seen.insert(v).second) out.emplace_back(v, 0);
  }
  std::size_t frontier_begin = 0;
  for (int level = 1; level <= depth; ++level) {
    const std::size_t frontier_end = out.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      const VertexLabel v = out[i].first;
      for (auto& w : neighbors(ctx, v)) {
        if (seen.insert(w).second) out.emplace_back(std::move(w), level);
      }
    }
    frontier_begin = frontier_end;
  }
  return out;
}

VertexSet neighborhood_of_set(const TreeContext& ctx, std::span<const VertexLabel> core,
                              int depth) {
  if (core.empty()) throw std::invalid_argument("neighborhood_of_set: empty core");
  auto layered = layered_neighborhood(ctx, core, depth);
  VertexSet out;
  out.reserve(layered.size());
  for (auto& [v, level] : layered) out.push_back(std::move(v));
  normalize(out);
  return out;
}

std::uint64_t ball_size(int d, int r) {
  if (r < 0) throw std::invalid_argument("ball radius must be non-negative");
  std::uint64_t sphere = static_cast<std::uint64_t>(d);
  std::uint64_t total = 1;
  for (int i = 1; i <= r; ++i) {
    total += sphere;
    sphere *= static_cast<std::uint64_t>(d - 1);
  }
  return total;
}

}  // namespace adiff
