#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// the library's geometry or probability code.

#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

namespace testing_support {

// Explicit finite ball B_R(source) of the d-regular tree, built by BFS with
// its own string naming ("" for the source, "0.1.1" for deeper vertices).
struct ExplicitBall {
  int d;
  int radius;
  std::vector<std::string> names;
  std::vector<std::vector<int>> adj;
  std::map<std::string, int> index;

  ExplicitBall(int degree, int r) : d(degree), radius(r) {
    add("");
    std::vector<int> depth{0};
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (depth[i] == r) continue;
      const int kids = names[i].empty() ? d : d - 1;
      for (int c = 0; c < kids; ++c) {
        const std::string child = names[i].empty() ? std::to_string(c) : names[i] + "." + std::to_string(c);
        const int j = add(child);
        depth.push_back(depth[i] + 1);
        adj[i].push_back(j);
        adj[j].push_back(static_cast<int>(i));
      }
    }
  }

  int add(const std::string& name) {
    const int id = static_cast<int>(names.size());
    names.push_back(name);
    adj.emplace_back();
    index[name] = id;
    return id;
  }

  std::vector<int> bfs(int from) const {
    std::vector<int> dist(names.size(), -1);
    std::queue<int> q;
    dist[from] = 0;
    q.push(from);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
      }
    }
    return dist;
  }

  // "/0/1" style, matching the library's text form, so labels can be parsed.
  std::string slash_name(int id) const {
    const auto& n = names[id];
    if (n.empty()) return "/";
    std::string out = "/";
    for (char ch : n) out += ch == '.' ? '/' : ch;
    return out;
  }
};

inline std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace testing_support
