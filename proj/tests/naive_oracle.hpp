#pragma once

// Brute-force reference implementations used only by tests. They share no
// code with the library's search paths: plain BFS over every reachable
// distribution, no pruning, no memoization tricks beyond a std::set.

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <vector>

namespace naive {

using Adjacency = std::vector<std::vector<int>>;
using Counts = std::vector<int>;

/// Every distribution reachable from `start` (including `start`).
inline std::set<Counts> reachable_states(const Adjacency& adj, const Counts& start) {
  std::set<Counts> seen{start};
  std::queue<Counts> q;
  q.push(start);
  while (!q.empty()) {
    Counts s = q.front();
    q.pop();
    for (std::size_t u = 0; u < adj.size(); ++u) {
      if (s[u] < 2) continue;
      for (int v : adj[u]) {
        Counts t = s;
        t[u] -= 2;
        t[v] += 1;
        if (seen.insert(t).second) q.push(t);
      }
    }
  }
  return seen;
}

/// Largest total that can be gathered on `targets`.
inline int max_on_set(const Adjacency& adj, const Counts& start, const std::vector<int>& targets) {
  int best = 0;
  for (const auto& s : reachable_states(adj, start)) {
    int on = 0;
    for (int t : targets) on += s[t];
    best = std::max(best, on);
  }
  return best;
}

inline bool reachable(const Adjacency& adj, const Counts& start, const std::vector<int>& targets, int k) {
  return max_on_set(adj, start, targets) >= k;
}

inline bool solvable(const Adjacency& adj, const Counts& start, int k) {
  std::vector<int> best(adj.size(), 0);
  for (const auto& s : reachable_states(adj, start)) {
    for (std::size_t v = 0; v < adj.size(); ++v) best[v] = std::max(best[v], s[v]);
  }
  return std::all_of(best.begin(), best.end(), [k](int b) { return b >= k; });
}

/// Calls `f` on every distribution of exactly `total` pebbles over n vertices.
inline void for_each_distribution(int n, int total, const std::function<void(const Counts&)>& f) {
  Counts c(n, 0);
  std::function<void(int, int)> rec = [&](int v, int left) {
    if (v == n - 1) {
      c[v] = left;
      f(c);
      c[v] = 0;
      return;
    }
    for (int x = 0; x <= left; ++x) {
      c[v] = x;
      rec(v + 1, left - x);
    }
    c[v] = 0;
  };
  if (n == 0) return;
  rec(0, total);
}

/// Smallest size of a k-solvable distribution, by trying every distribution.
inline int optimal_number(const Adjacency& adj, int k) {
  const int n = static_cast<int>(adj.size());
  for (int t = 0;; ++t) {
    bool found = false;
    for_each_distribution(n, t, [&](const Counts& c) {
      if (!found && solvable(adj, c, k)) found = true;
    });
    if (found) return t;
  }
}

/// All k-solvable distributions of exactly `total` pebbles.
inline std::vector<Counts> all_solvable(const Adjacency& adj, int total, int k) {
  std::vector<Counts> out;
  for_each_distribution(static_cast<int>(adj.size()), total, [&](const Counts& c) {
    if (solvable(adj, c, k)) out.push_back(c);
  });
  return out;
}

inline Adjacency path(int n) {
  Adjacency adj(n);
  for (int i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  return adj;
}

/// Lattice points with x+y in [1, m] and x-y in [lo, lo+n-1], counted directly.
inline std::vector<std::pair<int, int>> staircase_points(int m, int n, int lo) {
  std::vector<std::pair<int, int>> pts;
  for (int x = -m - n - 2; x <= m + n + 2; ++x) {
    for (int y = -m - n - 2; y <= m + n + 2; ++y) {
      if (x + y >= 1 && x + y <= m && x - y >= lo && x - y <= lo + n - 1) pts.emplace_back(x, y);
    }
  }
  return pts;
}

}  // namespace naive
