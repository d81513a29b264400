#pragma once

// Reference implementations used only by tests. Each one is deliberately
// naive and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Adjacency by node id, built from an edge list.
using IdGraph = std::map<std::string, std::set<std::string>>;

inline IdGraph make_graph(const std::vector<std::pair<std::string, std::string>>& edges,
                          const std::vector<std::string>& isolated = {}) {
  IdGraph g;
  for (const auto& id : isolated) g[id];
  for (const auto& [a, b] : edges) {
    g[a].insert(b);
    g[b].insert(a);
  }
  return g;
}

inline std::map<std::string, int> bfs(const IdGraph& g, const std::string& source) {
  std::map<std::string, int> dist{{source, 0}};
  std::queue<std::string> q;
  q.push(source);
  while (!q.empty()) {
    const auto cur = q.front();
    q.pop();
    for (const auto& n : g.at(cur)) {
      if (!dist.count(n)) {
        dist[n] = dist[cur] + 1;
        q.push(n);
      }
    }
  }
  return dist;
}

inline bool connected(const IdGraph& g) { return g.empty() || bfs(g, g.begin()->first).size() == g.size(); }

// Every simple path from `from` to `to` of exactly `hops` edges, found by
// exhaustive DFS. Paths exclude `from` and include `to`.
inline void enumerate_paths(const IdGraph& g, const std::string& cur, const std::string& to, int hops,
                            std::vector<std::string>& stack, std::vector<std::vector<std::string>>& out) {
  if (hops == 0) {
    if (cur == to) out.push_back(stack);
    return;
  }
  for (const auto& n : g.at(cur)) {
    if (std::find(stack.begin(), stack.end(), n) != stack.end()) continue;
    stack.push_back(n);
    enumerate_paths(g, n, to, hops - 1, stack, out);
    stack.pop_back();
  }
}

inline std::vector<std::string> smallest_shortest_path(const IdGraph& g, const std::string& from,
                                                       const std::string& to) {
  if (from == to) return {};
  const auto d = bfs(g, from).at(to);
  std::vector<std::vector<std::string>> all;
  std::vector<std::string> stack;
  enumerate_paths(g, from, to, d, stack, all);
  return *std::min_element(all.begin(), all.end());
}

// All distinct strings with the same first character and a permuted tail.
inline std::set<std::string> tail_permutations(std::string word) {
  std::set<std::string> out;
  if (word.size() < 2) return {word};
  std::sort(word.begin() + 1, word.end());
  do {
    out.insert(word);
  } while (std::next_permutation(word.begin() + 1, word.end()));
  return out;
}

struct Point {
  double x, y;
};

// NPC position by walking the route one edge at a time, accumulating length.
inline Point walk_route(const std::vector<Point>& cycle, double speed, double seconds) {
  double perimeter = 0;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const auto& a = cycle[i];
    const auto& b = cycle[(i + 1) % cycle.size()];
    perimeter += std::hypot(b.x - a.x, b.y - a.y);
  }
  double s = std::fmod(speed * seconds, perimeter);
  for (std::size_t i = 0;; i = (i + 1) % cycle.size()) {
    const auto& a = cycle[i];
    const auto& b = cycle[(i + 1) % cycle.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (s <= len) return {a.x + (b.x - a.x) * s / len, a.y + (b.y - a.y) * s / len};
    s -= len;
  }
}

// count/total*100 to two decimals, half-up, via exact decimal long division.
inline std::string percent_string(long long count, long long total) {
  const long long thousandths = count * 100000 / total;  // truncated
  long long hundredths = thousandths / 10;
  if (thousandths % 10 >= 5) ++hundredths;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", hundredths / 100, hundredths % 100);
  return buf;
}

}  // namespace oracle
