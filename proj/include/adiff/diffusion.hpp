#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "adiff/protocol.hpp"
#include "adiff/tree.hpp"

namespace adiff {

/// Positions vs_0, ..., vs_T of the virtual source. vs_0 is the true source.
struct Trajectory {
  int d = 3;
  std::string protocol;
  std::uint64_t seed = 0;
  std::vector<VertexLabel> vs;

  int length() const noexcept { return static_cast<int>(vs.size()) - 1; }
  /// h_t, the distance from vs_t to the source.
  int hop(int t) const;
};

/// Samples the chain up to time T.
///
/// t = 0 -> 1 uses one draw (direction among d). Every even t >= 2 uses two
/// draws whatever alpha is: u (stay iff u < alpha(t, h_t)) then the direction
/// among the d - 1 edges leading away from the source. Odd t never moves.
Trajectory simulate(const Protocol& p, int T, std::uint64_t seed);

/// The infected subgraph at one time, kept as its virtual sources.
///
/// Even t: a ball of radius t/2 around vs_now (vs_prev == vs_now).
/// Odd t: the radius-(t-1)/2 neighborhood of {vs_prev, vs_now}; a ball when
/// the virtual source stayed, two joined trees when it moved. At t = 1
/// vs_prev is the source itself.
struct Snapshot {
  int d = 3;
  int t = 1;
  VertexLabel vs_prev;
  VertexLabel vs_now;

  bool is_ball() const noexcept { return t % 2 == 0 || vs_prev == vs_now; }
  /// Radius around the virtual-source set: floor(t/2).
  int radius() const noexcept { return t / 2; }
  /// {vs_now} for a ball, {vs_prev, vs_now} otherwise.
  std::vector<VertexLabel> virtual_sources() const;
  TreeContext context() const { return TreeContext(d); }
};

/// Builds a snapshot and checks its invariants (throws std::invalid_argument).
Snapshot make_snapshot(int d, int t, const VertexLabel& vs_prev, const VertexLabel& vs_now);

Snapshot snapshot_at(const Trajectory& tr, int t);

/// X(v): distance from v to the nearest virtual source.
int center_distance(const Snapshot& s, const VertexLabel& v);

bool contains(const Snapshot& s, const VertexLabel& v);

/// |V_t|: ball size for balls, 2((d-1)^{(t+1)/2} - 1)/(d-2) for two joined trees.
std::uint64_t infected_count(const Snapshot& s);

/// R_t = t/2 - h_t. Even t only.
int local_radius(const Trajectory& tr, int t);

/// max{r : B_r(source) inside the infected set}, by checking every vertex of
/// B_{t/2+1}(source). Slow; used to cross-check local_radius.
int local_radius_brute_force(const Snapshot& s);

nlohmann::json to_json(const Trajectory& tr);
Trajectory trajectory_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Snapshot& s);
Snapshot snapshot_from_json(const nlohmann::json& j);

}  // namespace adiff
