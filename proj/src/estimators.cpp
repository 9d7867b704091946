#include "adiff/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "adiff/errors.hpp"

namespace adiff {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-likelihoods of genuinely tied candidates agree to ~1e-15; distinct
// values for the protocols we ship differ by far more than this.
constexpr double kTieTolerance = 1e-9;

bool ties_with(double score, double best) {
  return score >= best - kTieTolerance * std::max(1.0, std::abs(best));
}

void check_same_degree(std::span<const Snapshot> snaps) {
  for (const auto& s : snaps) {
    if (s.d != snaps.front().d) throw PreconditionError("snapshots disagree on the tree degree");
  }
}

void check_count(Method m, std::size_t need, std::size_t have) {
  if (have < need) {
    throw PreconditionError(method_name(m) + " needs " + std::to_string(need) +
                            " snapshot(s), got " + std::to_string(have));
  }
}

VertexSet all_virtual_sources(std::span<const Snapshot> snaps) {
  VertexSet out;
  for (const auto& s : snaps) {
    auto vs = s.virtual_sources();
    out.insert(out.end(), vs.begin(), vs.end());
  }
  normalize(out);
  return out;
}

// Neighbors of the first snapshot's virtual sources that are not themselves
// virtual sources anywhere.
CandidateSet fallback_candidates(const TreeContext& ctx, std::span<const Snapshot> snaps) {
  const auto first = snaps.front().virtual_sources();
  const auto excluded = all_virtual_sources(snaps);
  VertexSet out;
  for (auto& v : boundary_of(ctx, first)) {
    if (!set_contains(excluded, v)) out.push_back(std::move(v));
  }
  if (out.empty()) out = boundary_of(ctx, first);
  return CandidateSet::of(std::move(out));
}

void collect_away(const TreeContext& ctx, const VertexLabel& from, const VertexLabel& prev,
                  int depth, VertexSet& out) {
  if (depth == 0) {
    out.push_back(from);
    return;
  }
  for (const auto& w : neighbors(ctx, from)) {
    if (w != prev) collect_away(ctx, w, from, depth - 1, out);
  }
}

void require_model(const ModelView& model, const Snapshot& s) {
  if (model.hop == nullptr) throw PreconditionError("likelihood estimators need a hop distribution");
  if (model.hop->degree() != s.d) throw PreconditionError("hop distribution degree differs from snapshot");
  if (s.t % 2 == 1 && model.protocol == nullptr) {
    throw PreconditionError("odd-time likelihood needs the protocol");
  }
  if (s.t < 2) throw PreconditionError("likelihood estimators need t >= 2");
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::single_mle: return "single-mle";
    case Method::two_path: return "two-path";
    case Method::three_intersection: return "three-intersection";
    case Method::k_subtree: return "k-subtree";
    case Method::generic_mle: return "generic-mle";
    case Method::mle_cases: return "mle-cases";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::single_mle, Method::two_path, Method::three_intersection,
                   Method::k_subtree, Method::generic_mle, Method::mle_cases}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument(
      "unknown estimator \"" + name +
      "\"; expected one of single-mle, two-path, three-intersection, k-subtree, generic-mle, "
      "mle-cases");
}

nlohmann::json to_json(const Estimate& e) {
  return {{"method", method_name(e.method)},
          {"chosen", e.chosen.to_string()},
          {"ties", e.candidates.size()},
          {"diagnostics", e.diagnostics}};
}

std::vector<double> log_likelihood_by_distance(const Snapshot& s, const ModelView& model) {
  require_model(model, s);
  const int r = s.radius();
  const double log_d = std::log(static_cast<double>(s.d));
  const double log_q = std::log(static_cast<double>(s.d - 1));
  std::vector<double> out(static_cast<std::size_t>(r) + 1, kNegInf);
  for (int x = 1; x <= r; ++x) {
    double weight = 0.0;
    double log_count = log_d + (x - 1) * log_q;
    if (s.t % 2 == 0) {
      weight = model.hop->at(s.t, x);
    } else {
      const double p = model.hop->at(s.t - 1, x);
      const double a = model.protocol->alpha(s.t - 1, x);
      if (s.is_ball()) {
        weight = p * a;
      } else {
        weight = p * (1.0 - a);
        log_count += log_q;
      }
    }
    if (weight > 0.0) out[static_cast<std::size_t>(x)] = std::log(weight) - log_count;
  }
  return out;
}

double single_mle_success_probability(const ModelView& model, int t) {
  if (model.hop == nullptr) throw PreconditionError("need a hop distribution");
  if (t < 2) throw PreconditionError("single MLE needs t >= 2");
  const int d = model.hop->degree();
  const double q = d - 1;
  if (t % 2 == 0) {
    double best = 0.0;
    for (int h = 1; h <= t / 2; ++h) {
      best = std::max(best, model.hop->at(t, h) / (d * std::pow(q, h - 1)));
    }
    return best;
  }
  if (model.protocol == nullptr) throw PreconditionError("odd t needs the protocol");
  double ball = 0.0;
  double moved = 0.0;
  const int te = t - 1;
  for (int h = 1; h <= te / 2; ++h) {
    const double p = model.hop->at(te, h);
    const double a = model.protocol->alpha(te, h);
    ball = std::max(ball, p * a / (d * std::pow(q, h - 1)));
    moved = std::max(moved, p * (1.0 - a) / (2.0 * std::pow(q, h)));
  }
  return ball + moved;
}

Ranked single_mle_candidates(const Snapshot& s, const ModelView& model) {
  const auto table = log_likelihood_by_distance(s, model);
  const double best = *std::max_element(table.begin(), table.end());
  if (best == kNegInf) throw std::runtime_error("single MLE: every candidate has zero likelihood");
  std::vector<int> hops;
  for (std::size_t x = 1; x < table.size(); ++x) {
    if (table[x] != kNegInf && ties_with(table[x], best)) hops.push_back(static_cast<int>(x));
  }
  Ranked r;
  r.candidates = CandidateSet::shells(s.context(), s.virtual_sources(), hops);
  r.diagnostics["hops"] = hops;
  r.diagnostics["success_probability"] = single_mle_success_probability(model, s.t);
  return r;
}

Ranked two_path_candidates(const Snapshot& s1, const Snapshot& s2) {
  const Snapshot pair[] = {s1, s2};
  check_same_degree(pair);
  const TreeContext ctx(s1.d);
  const auto vs = all_virtual_sources(pair);
  VertexSet path;
  for (auto& v : steiner_tree(ctx, vs)) {
    if (!set_contains(vs, v)) path.push_back(std::move(v));
  }
  VertexSet s;
  for (const auto& v : path) {
    if (contains(s1, v) && contains(s2, v)) s.push_back(v);
  }
  Ranked r;
  r.diagnostics["path_size"] = path.size();
  r.diagnostics["s_size"] = s.size();
  r.diagnostics["fallback"] = s.empty();
  r.candidates = s.empty() ? fallback_candidates(ctx, pair) : CandidateSet::of(std::move(s));
  return r;
}

Ranked three_intersection_candidates(const TreeContext& ctx, std::span<const VertexLabel> picks) {
  if (picks.size() != 3) throw PreconditionError("three-intersection needs three virtual sources");
  auto as_set = [&](const VertexLabel& a, const VertexLabel& b) {
    VertexSet p = path_between(ctx, a, b);
    normalize(p);
    return p;
  };
  auto common = set_intersection(as_set(picks[0], picks[1]), as_set(picks[0], picks[2]));
  common = set_intersection(common, as_set(picks[1], picks[2]));
  Ranked r;
  r.diagnostics["intersection_size"] = common.size();
  r.candidates = CandidateSet::of(std::move(common));
  return r;
}

Ranked k_subtree_candidates(const TreeContext& ctx, std::span<const VertexLabel> picks) {
  if (picks.empty()) throw PreconditionError("k-subtree needs at least one snapshot");
  const auto domain = steiner_tree(ctx, picks);
  std::vector<int> counts(static_cast<std::size_t>(ctx.degree()));
  int best = std::numeric_limits<int>::max();
  VertexSet argmin;
  for (const auto& v : domain) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& w : picks) {
      if (w != v) ++counts[static_cast<std::size_t>(direction_toward(ctx, v, w))];
    }
    const int worst = *std::max_element(counts.begin(), counts.end());
    if (worst < best) {
      best = worst;
      argmin.clear();
    }
    if (worst == best) argmin.push_back(v);
  }
  Ranked r;
  r.diagnostics["max_subtree_count"] = best;
  r.diagnostics["ill_defined"] = argmin.size() > 1;
  r.candidates = CandidateSet::of(std::move(argmin));
  return r;
}

Ranked generic_mle_candidates(std::span<const Snapshot> snaps, const ModelView& model,
                              int search_depth) {
  if (snaps.empty()) throw PreconditionError("generic-mle needs at least one snapshot");
  if (search_depth < 0) throw PreconditionError("search depth must be non-negative");
  check_same_degree(snaps);
  const TreeContext ctx(snaps.front().d);
  std::vector<std::vector<double>> tables;
  for (const auto& s : snaps) tables.push_back(log_likelihood_by_distance(s, model));

  const auto vs = all_virtual_sources(snaps);
  const auto core = steiner_tree(ctx, vs);

  // Leaving the core through a non-core neighbor raises every X_i by one per
  // step, so all vertices at fringe depth j behind core vertex c share a score.
  struct Group {
    std::size_t core_index;
    int depth;
    double score;
  };
  std::vector<Group> groups;
  std::vector<int> base(snaps.size());
  for (std::size_t ci = 0; ci < core.size(); ++ci) {
    const auto& c = core[ci];
    for (std::size_t i = 0; i < snaps.size(); ++i) base[i] = center_distance(snaps[i], c);
    bool has_exit = false;
    for (const auto& w : neighbors(ctx, c)) {
      if (!set_contains(core, w)) {
        has_exit = true;
        break;
      }
    }
    const int max_depth = has_exit ? search_depth : 0;
    for (int j = 0; j <= max_depth; ++j) {
      if (j == 0 && set_contains(vs, c)) continue;
      double score = 0.0;
      bool infected = true;
      for (std::size_t i = 0; i < snaps.size(); ++i) {
        const auto x = static_cast<std::size_t>(base[i] + j);
        if (x >= tables[i].size()) {
          infected = false;
          break;
        }
        score += tables[i][x];
      }
      if (!infected) break;  // outside some snapshot, and further out stays outside
      if (score != kNegInf) groups.push_back({ci, j, score});
    }
  }

  Ranked r;
  r.diagnostics["domain_core"] = core.size();
  if (groups.empty()) {
    r.diagnostics["fallback"] = true;
    r.candidates = fallback_candidates(ctx, snaps);
    return r;
  }
  double best = kNegInf;
  for (const auto& g : groups) best = std::max(best, g.score);
  VertexSet winners;
  bool boundary = false;
  for (const auto& g : groups) {
    if (!ties_with(g.score, best)) continue;
    const auto& c = core[g.core_index];
    if (g.depth == 0) {
      winners.push_back(c);
      continue;
    }
    if (g.depth == search_depth) boundary = true;
    for (const auto& w : neighbors(ctx, c)) {
      if (!set_contains(core, w)) collect_away(ctx, w, c, g.depth - 1, winners);
    }
  }
  r.diagnostics["fallback"] = false;
  r.diagnostics["log_likelihood"] = best;
  r.diagnostics["boundary"] = boundary;
  r.candidates = CandidateSet::of(std::move(winners));
  return r;
}

std::size_t snapshots_used(Method m, std::size_t available) {
  switch (m) {
    case Method::single_mle: return 1;
    case Method::two_path: return 2;
    case Method::three_intersection: return 3;
    case Method::mle_cases: return 2;
    case Method::k_subtree:
    case Method::generic_mle: return available;
  }
  return available;
}

namespace {

std::size_t min_snapshots(Method m) {
  switch (m) {
    case Method::two_path:
    case Method::mle_cases: return 2;
    case Method::three_intersection: return 3;
    default: return 1;
  }
}

// Ranking for estimators without internal randomness, or for a fixed choice
// of one virtual source per snapshot.
Ranked rank(const EstimatorSpec& spec, std::span<const Snapshot> snaps, const ModelView& model,
            std::span<const VertexLabel> picks) {
  const TreeContext ctx(snaps.front().d);
  switch (spec.method) {
    case Method::single_mle: return single_mle_candidates(snaps[0], model);
    case Method::two_path: return two_path_candidates(snaps[0], snaps[1]);
    case Method::three_intersection: return three_intersection_candidates(ctx, picks);
    case Method::k_subtree: return k_subtree_candidates(ctx, picks);
    case Method::generic_mle: return generic_mle_candidates(snaps, model, spec.search_depth);
    case Method::mle_cases: return uniform_mle_cases(snaps[0], snaps[1]);
  }
  throw std::logic_error("unhandled estimator");
}

bool uses_picks(Method m) { return m == Method::three_intersection || m == Method::k_subtree; }

std::span<const Snapshot> prepare(const EstimatorSpec& spec, std::span<const Snapshot> snaps) {
  check_count(spec.method, min_snapshots(spec.method), snaps.size());
  const auto used = snaps.first(snapshots_used(spec.method, snaps.size()));
  check_same_degree(used);
  return used;
}

}  // namespace

std::vector<Ranked> candidate_law(const EstimatorSpec& spec, std::span<const Snapshot> snaps,
                                  const ModelView& model, std::size_t cap) {
  const auto used = prepare(spec, snaps);
  if (!uses_picks(spec.method)) return {rank(spec, used, model, {})};

  std::vector<VirtualSourceSet> options;
  std::size_t total = 1;
  for (const auto& s : used) {
    options.push_back(s.virtual_sources());
    total *= options.back().size();
    if (total > cap) throw BudgetExceeded("too many virtual-source choices to enumerate");
  }
  std::vector<Ranked> out;
  out.reserve(total);
  std::vector<VertexLabel> picks(used.size());
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t i = 0; i < used.size(); ++i) {
      picks[i] = options[i][rest % options[i].size()];
      rest /= options[i].size();
    }
    out.push_back(rank(spec, used, model, picks));
  }
  return out;
}

Estimate run_estimator(const EstimatorSpec& spec, std::span<const Snapshot> snaps,
                       const ModelView& model, Rng& rng) {
  const auto used = prepare(spec, snaps);
  std::vector<VertexLabel> picks;
  if (uses_picks(spec.method)) {
    for (const auto& s : used) {
      auto vs = s.virtual_sources();
      picks.push_back(vs.size() == 1 ? vs[0] : vs[rng.index(vs.size())]);
    }
  }
  Ranked r = rank(spec, used, model, picks);
  Estimate e;
  e.method = spec.method;
  e.chosen = r.candidates.sample(rng);
  e.candidates = std::move(r.candidates);
  e.diagnostics = std::move(r.diagnostics);
  return e;
}

}  // namespace adiff
