#include "pebbling/pebble.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <numeric>

namespace pebbling {

Distribution apply_move(const PebbleGraph& g, const Distribution& dist, Move move) {
  if (dist.vertex_count() != g.size()) throw PebblingError("distribution does not match graph");
  if (move.from < 0 || move.from >= g.size() || move.to < 0 || move.to >= g.size() ||
      !g.adjacent(move.from, move.to)) {
    throw PebblingError("pebbling move along a non-edge");
  }
  if (dist[move.from] < 2) throw PebblingError("pebbling move needs two pebbles on the source");
  Distribution out = dist;
  out.add(move.from, -2);
  out.add(move.to, 1);
  return out;
}

Distribution replay(const PebbleGraph& g, Distribution dist, std::span<const Move> moves) {
  for (const auto& m : moves) dist = apply_move(g, dist, m);
  return dist;
}

double DyadicRational::value() const {
  return static_cast<double>(numerator) / static_cast<double>(static_cast<unsigned __int128>(1) << exponent);
}

bool DyadicRational::at_least(std::uint64_t k) const {
  if (k == 0) return true;
  if (exponent >= 64) return false;
  return static_cast<unsigned __int128>(numerator) >=
         (static_cast<unsigned __int128>(k) << exponent);
}

namespace {

std::vector<int> set_distances(const PebbleGraph& g, std::span<const int> targets) {
  std::vector<int> best(g.size(), -1);
  for (int t : targets) {
    auto d = g.distances_from(t);
    for (int v = 0; v < g.size(); ++v) {
      if (d[v] >= 0 && (best[v] < 0 || d[v] < best[v])) best[v] = d[v];
    }
  }
  return best;
}

}  // namespace

DyadicRational weight_bound(const PebbleGraph& g, const Distribution& dist, int target) {
  const int t[] = {target};
  return weight_bound(g, dist, t);
}

DyadicRational weight_bound(const PebbleGraph& g, const Distribution& dist,
                            std::span<const int> targets) {
  if (dist.vertex_count() != g.size()) throw PebblingError("distribution does not match graph");
  for (int t : targets) {
    if (t < 0 || t >= g.size()) throw std::invalid_argument("target outside the graph");
  }
  auto d = set_distances(g, targets);
  int exponent = 0;
  for (int v = 0; v < g.size(); ++v) {
    if (dist[v] > 0 && d[v] > exponent) exponent = d[v];
  }
  if (exponent > 120) throw std::overflow_error("weight bound exponent too large");
  unsigned __int128 numerator = 0;
  for (int v = 0; v < g.size(); ++v) {
    if (dist[v] > 0 && d[v] >= 0) {
      numerator += static_cast<unsigned __int128>(dist[v]) << (exponent - d[v]);
    }
  }
  while (exponent > 0 && numerator % 2 == 0) {
    numerator /= 2;
    --exponent;
  }
  if (numerator > std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("weight bound numerator too large");
  }
  if (numerator == 0) exponent = 0;
  return {static_cast<std::uint64_t>(numerator), exponent};
}

void ReachQuery::validate(const PebbleGraph& g) const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (targets.empty()) throw std::invalid_argument("empty target set");
  std::set<int> seen;
  for (int t : targets) {
    if (t < 0 || t >= g.size()) throw std::invalid_argument("target outside the graph");
    if (!seen.insert(t).second) throw std::invalid_argument("duplicate target");
  }
}

namespace {

/// Open-addressing set of fixed-width byte keys stored in one arena.
class StateSet {
 public:
  void reset(std::size_t key_bytes) {
    key_bytes_ = key_bytes;
    arena_.clear();
    hashes_.clear();
    slots_.assign(1 << 10, 0);
  }

  std::size_t size() const { return hashes_.size(); }

  bool insert(const std::uint8_t* key, std::uint64_t hash) {
    if ((hashes_.size() + 1) * 2 > slots_.size()) grow();
    const std::size_t mask = slots_.size() - 1;
    std::size_t i = hash & mask;
    while (slots_[i] != 0) {
      const std::uint32_t e = slots_[i] - 1;
      if (hashes_[e] == hash && std::memcmp(&arena_[e * key_bytes_], key, key_bytes_) == 0) {
        return false;
      }
      i = (i + 1) & mask;
    }
    arena_.insert(arena_.end(), key, key + key_bytes_);
    hashes_.push_back(hash);
    slots_[i] = static_cast<std::uint32_t>(hashes_.size());
    return true;
  }

 private:
  void grow() {
    std::vector<std::uint32_t> next(slots_.size() * 2, 0);
    const std::size_t mask = next.size() - 1;
    for (std::uint32_t e = 0; e < hashes_.size(); ++e) {
      std::size_t i = hashes_[e] & mask;
      while (next[i] != 0) i = (i + 1) & mask;
      next[i] = e + 1;
    }
    slots_ = std::move(next);
  }

  std::size_t key_bytes_ = 0;
  std::vector<std::uint8_t> arena_;
  std::vector<std::uint64_t> hashes_;
  std::vector<std::uint32_t> slots_;
};

std::uint64_t hash_bytes(const std::uint8_t* p, std::size_t n) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ n;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    std::uint64_t w;
    std::memcpy(&w, p + i, 8);
    h ^= w;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 32;
  }
  std::uint64_t tail = 0;
  std::memcpy(&tail, p + i, n - i);
  h ^= tail;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 29;
  return h;
}

/// Packs vertex counts (and optionally used-edge flags) into a byte key that
/// is updated in place as moves are applied and undone.
class StateKey {
 public:
  void reset(std::span<const int> counts, int max_count, int edge_flags) {
    bits_ = max_count <= 15 ? 4 : max_count <= 255 ? 8 : 16;
    if (max_count > 65535) throw PebblingError("too many pebbles for the state encoding");
    vertices_ = static_cast<int>(counts.size());
    const std::size_t count_bytes = (static_cast<std::size_t>(vertices_) * bits_ + 7) / 8;
    flag_offset_ = count_bytes;
    bytes_.assign(count_bytes + (edge_flags + 7) / 8, 0);
    for (int v = 0; v < vertices_; ++v) set(v, counts[v]);
  }

  void set(int v, int value) {
    switch (bits_) {
      case 4: {
        auto& b = bytes_[v / 2];
        b = (v % 2 == 0) ? static_cast<std::uint8_t>((b & 0xF0) | value)
                         : static_cast<std::uint8_t>((b & 0x0F) | (value << 4));
        break;
      }
      case 8:
        bytes_[v] = static_cast<std::uint8_t>(value);
        break;
      default:
        bytes_[2 * v] = static_cast<std::uint8_t>(value & 0xFF);
        bytes_[2 * v + 1] = static_cast<std::uint8_t>(value >> 8);
    }
  }

  void set_flag(int e, bool on) {
    auto& b = bytes_[flag_offset_ + e / 8];
    const auto bit = static_cast<std::uint8_t>(1u << (e % 8));
    b = on ? static_cast<std::uint8_t>(b | bit) : static_cast<std::uint8_t>(b & ~bit);
  }

  const std::uint8_t* data() const { return bytes_.data(); }
  std::size_t size() const { return bytes_.size(); }
  std::uint64_t hash() const { return hash_bytes(bytes_.data(), bytes_.size()); }

 private:
  int bits_ = 4;
  int vertices_ = 0;
  std::size_t flag_offset_ = 0;
  std::vector<std::uint8_t> bytes_;
};

constexpr int kMaxShift = 40;

}  // namespace

struct ReachabilitySolver::Impl {
  const PebbleGraph* graph_ptr = nullptr;
  PebbleGraph owned;  // used when the solver outlives the caller's graph
  int n = 0;
  int shift = 0;
  std::vector<int> dist;              // n*n
  std::vector<std::uint64_t> weight;  // n*n, weight[t*n + v]
  // Directed edge ids: edge_id[offset(u) + i] for the i-th neighbor of u.
  std::vector<int> edge_offsets;
  std::vector<int> edge_to;
  std::vector<int> reverse_edge;

  // Per-search state.
  std::vector<int> cur;
  std::vector<std::uint64_t> w;
  std::vector<char> is_target;
  std::vector<int> used;
  StateKey key;
  StateSet seen;
  std::vector<Move> path;
  std::uint64_t need = 0;
  std::uint64_t current_weight = 0;
  int on_target = 0;
  int k = 1;
  bool prune = true;
  bool forbid_reverse = false;
  std::uint64_t budget = 0;
  std::uint64_t visited = 0;
  std::vector<char>* marks = nullptr;
  int mark_k = 1;

  const PebbleGraph& g() const { return *graph_ptr; }

  void init(const PebbleGraph& graph) {
    owned = graph;
    graph_ptr = &owned;
    n = graph.size();
    dist.assign(static_cast<std::size_t>(n) * n, -1);
    int max_d = 0;
    for (int v = 0; v < n; ++v) {
      auto d = graph.distances_from(v);
      std::copy(d.begin(), d.end(), dist.begin() + static_cast<std::size_t>(v) * n);
      for (int x : d) max_d = std::max(max_d, x);
    }
    shift = std::min(max_d, kMaxShift);
    weight.assign(static_cast<std::size_t>(n) * n, 0);
    for (int t = 0; t < n; ++t) {
      for (int v = 0; v < n; ++v) weight[static_cast<std::size_t>(t) * n + v] = scaled(dist_at(v, t));
    }
    edge_offsets.assign(n + 1, 0);
    for (int u = 0; u < n; ++u) {
      for (int v : graph.neighbors(u)) edge_to.push_back(v);
      edge_offsets[u + 1] = static_cast<int>(edge_to.size());
    }
    reverse_edge.assign(edge_to.size(), -1);
    for (int u = 0; u < n; ++u) {
      for (int e = edge_offsets[u]; e < edge_offsets[u + 1]; ++e) {
        const int v = edge_to[e];
        for (int f = edge_offsets[v]; f < edge_offsets[v + 1]; ++f) {
          if (edge_to[f] == u) reverse_edge[e] = f;
        }
      }
    }
  }

  int dist_at(int u, int v) const { return dist[static_cast<std::size_t>(u) * n + v]; }

  std::uint64_t scaled(int d) const {
    if (d < 0) return 0;
    if (d > shift) return 1;
    return std::uint64_t{1} << (shift - d);
  }

  void prepare(std::span<const int> counts, std::span<const int> targets, int k_, const ReachOptions& opt) {
    if (static_cast<int>(counts.size()) != n) throw PebblingError("distribution does not match graph");
    cur.assign(counts.begin(), counts.end());
    k = k_;
    prune = opt.weight_pruning;
    forbid_reverse = opt.forbid_reverse_edges;
    budget = opt.state_budget;
    visited = 0;
    is_target.assign(n, 0);
    for (int t : targets) is_target[t] = 1;
    w.assign(n, 0);
    if (targets.size() == 1) {
      const auto* row = &weight[static_cast<std::size_t>(targets[0]) * n];
      std::copy(row, row + n, w.begin());
    } else {
      for (int v = 0; v < n; ++v) {
        int best = -1;
        for (int t : targets) {
          int d = dist_at(v, t);
          if (d >= 0 && (best < 0 || d < best)) best = d;
        }
        w[v] = scaled(best);
      }
    }
    need = static_cast<std::uint64_t>(k) << shift;
    current_weight = 0;
    on_target = 0;
    int total = 0;
    for (int v = 0; v < n; ++v) {
      current_weight += static_cast<std::uint64_t>(cur[v]) * w[v];
      if (is_target[v]) on_target += cur[v];
      total += cur[v];
    }
    used.assign(forbid_reverse ? edge_to.size() : 0, 0);
    key.reset(cur, total, forbid_reverse ? static_cast<int>(edge_to.size()) : 0);
    seen.reset(key.size());
    path.clear();
  }

  bool dfs() {
    if (on_target >= k) return true;
    if (prune && current_weight < need) return false;
    if (!seen.insert(key.data(), key.hash())) return false;
    if (++visited > budget && budget != 0) {
      throw StateBudgetExceeded("reachability state budget exceeded");
    }
    for (int u = 0; u < n; ++u) {
      if (cur[u] < 2) continue;
      for (int e = edge_offsets[u]; e < edge_offsets[u + 1]; ++e) {
        if (forbid_reverse && used[reverse_edge[e]] > 0) continue;
        const int v = edge_to[e];
        cur[u] -= 2;
        cur[v] += 1;
        key.set(u, cur[u]);
        key.set(v, cur[v]);
        current_weight = current_weight + w[v] - 2 * w[u];
        on_target += is_target[v] - 2 * is_target[u];
        if (forbid_reverse && used[e]++ == 0) key.set_flag(e, true);
        if (marks != nullptr && cur[v] >= mark_k) (*marks)[v] = 1;
        path.push_back({u, v});

        if (dfs()) return true;

        path.pop_back();
        if (forbid_reverse && --used[e] == 0) key.set_flag(e, false);
        on_target -= is_target[v] - 2 * is_target[u];
        current_weight = current_weight + 2 * w[u] - w[v];
        cur[u] += 2;
        cur[v] -= 1;
        key.set(u, cur[u]);
        key.set(v, cur[v]);
      }
    }
    return false;
  }

  // Certifies reachability inside balls of growing radius around the targets.
  // Only positive answers are trusted; std::nullopt means "not certified".
  std::optional<ReachResult> localized(std::span<const int> counts, const ReachQuery& q,
                                       const ReachOptions& opt) {
    std::vector<int> d(n, -1);
    for (int v = 0; v < n; ++v) {
      for (int t : q.targets) {
        int x = dist_at(v, t);
        if (x >= 0 && (d[v] < 0 || x < d[v])) d[v] = x;
      }
    }
    const int ecc = *std::max_element(d.begin(), d.end());
    for (int radius = 2; radius < ecc; ++radius) {
      std::vector<int> members;
      std::vector<GridCoord> coords;
      int pebbles = 0;
      for (int v = 0; v < n; ++v) {
        if (d[v] >= 0 && d[v] <= radius) {
          members.push_back(v);
          coords.push_back(g().coord(v));
          pebbles += counts[v];
        }
      }
      if (pebbles < q.k) continue;
      if (static_cast<int>(members.size()) * 2 > n) break;
      PebbleGraph ball(coords);
      std::vector<int> to_ball(n, -1);
      std::vector<int> from_ball(ball.size());
      for (int v : members) {
        int b = *ball.find(g().coord(v));
        to_ball[v] = b;
        from_ball[b] = v;
      }
      std::vector<int> sub_counts(ball.size(), 0);
      for (int v : members) sub_counts[to_ball[v]] = counts[v];
      ReachQuery sub_q{{}, q.k};
      for (int t : q.targets) sub_q.targets.push_back(to_ball[t]);
      ReachabilitySolver sub(ball);
      ReachOptions sub_opt = opt;
      sub_opt.localize = false;
      sub_opt.want_witness = true;
      ReachResult r;
      try {
        r = sub.reachable(sub_counts, sub_q, sub_opt);
      } catch (const StateBudgetExceeded&) {
        continue;
      }
      if (r.reachable) {
        for (auto& m : r.witness) m = {from_ball[m.from], from_ball[m.to]};
        if (!opt.want_witness) r.witness.clear();
        return r;
      }
    }
    return std::nullopt;
  }

  ReachResult reachable(std::span<const int> counts, const ReachQuery& q, const ReachOptions& opt) {
    q.validate(g());
    if (static_cast<int>(counts.size()) != n) throw PebblingError("distribution does not match graph");
    if (opt.localize && n > opt.localize_above) {
      int on = 0;
      for (int t : q.targets) on += counts[t];
      if (on < q.k) {
        if (auto r = localized(counts, q, opt)) return *r;
      }
    }
    prepare(counts, q.targets, q.k, opt);
    ReachResult result;
    result.reachable = dfs();
    result.states_visited = seen.size();
    if (result.reachable && opt.want_witness) result.witness = path;
    return result;
  }
};

ReachabilitySolver::ReachabilitySolver(const PebbleGraph& g) : impl_(std::make_unique<Impl>()) {
  impl_->init(g);
}
ReachabilitySolver::~ReachabilitySolver() = default;
ReachabilitySolver::ReachabilitySolver(ReachabilitySolver&&) noexcept = default;
ReachabilitySolver& ReachabilitySolver::operator=(ReachabilitySolver&&) noexcept = default;

const PebbleGraph& ReachabilitySolver::graph() const { return impl_->g(); }

std::uint64_t ReachabilitySolver::scaled_weight(int v, int target) const {
  return impl_->weight[static_cast<std::size_t>(target) * impl_->n + v];
}

int ReachabilitySolver::weight_shift() const { return impl_->shift; }

std::span<const int> ReachabilitySolver::distances(int v) const {
  return {impl_->dist.data() + static_cast<std::size_t>(v) * impl_->n,
          static_cast<std::size_t>(impl_->n)};
}

ReachResult ReachabilitySolver::reachable(std::span<const int> counts, const ReachQuery& query,
                                          const ReachOptions& options) {
  return impl_->reachable(counts, query, options);
}

SolvabilityResult ReachabilitySolver::solvable(std::span<const int> counts, int k,
                                               const ReachOptions& options) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  auto& im = *impl_;
  const int n = im.n;
  if (static_cast<int>(counts.size()) != n) throw PebblingError("distribution does not match graph");

  std::vector<std::pair<std::uint64_t, int>> order(n);
  for (int t = 0; t < n; ++t) {
    std::uint64_t total = 0;
    for (int v = 0; v < n; ++v) {
      if (counts[v] > 0) total += static_cast<std::uint64_t>(counts[v]) * scaled_weight(v, t);
    }
    order[t] = {total, t};
  }
  std::sort(order.begin(), order.end());

  std::vector<char> marks(n, 0);
  for (int v = 0; v < n; ++v) marks[v] = counts[v] >= k;
  const std::uint64_t need = static_cast<std::uint64_t>(k) << im.shift;
  for (auto [total, t] : order) {
    if (marks[t]) continue;
    if (options.weight_pruning && total < need) return {false, t};
    ReachOptions opt = options;
    opt.want_witness = false;
    ReachQuery q{{t}, k};
    ReachResult r;
    if (opt.localize && n > opt.localize_above) {
      r = im.reachable(counts, q, opt);
    } else {
      im.marks = &marks;
      im.mark_k = k;
      try {
        im.prepare(counts, q.targets, k, opt);
        r.reachable = im.dfs();
      } catch (...) {
        im.marks = nullptr;
        throw;
      }
      im.marks = nullptr;
    }
    if (!r.reachable) return {false, t};
    marks[t] = 1;
  }
  return {true, std::nullopt};
}

ReachResult is_k_reachable(const PebbleGraph& g, const Distribution& dist, const ReachQuery& query,
                           const ReachOptions& options) {
  if (dist.vertex_count() != g.size()) throw PebblingError("distribution does not match graph");
  ReachabilitySolver solver(g);
  return solver.reachable(dist.counts(), query, options);
}

SolvabilityResult is_k_solvable(const PebbleGraph& g, const Distribution& dist, int k,
                                const ReachOptions& options) {
  if (dist.vertex_count() != g.size()) throw PebblingError("distribution does not match graph");
  ReachabilitySolver solver(g);
  return solver.solvable(dist.counts(), k, options);
}

std::set<int> two_reachable_slashes(const PebbleGraph& g, const Distribution& dist) {
  if (g.slash_count() < 1) throw GraphError("graph has no slash structure");
  if (dist.vertex_count() != g.size()) throw PebblingError("distribution does not match graph");
  ReachabilitySolver solver(g);
  std::set<int> out;
  for (int s = 1; s <= g.slash_count(); ++s) {
    ReachQuery q{g.slash_vertices(s), 2};
    if (q.targets.empty()) continue;
    if (solver.reachable(dist.counts(), q).reachable) out.insert(s);
  }
  return out;
}

namespace {

/// Visits every distribution reachable from `start` once. Stops as soon as
/// `visit` returns true.
void explore_reachable(const PebbleGraph& g, std::vector<int> start,
                       const std::function<bool(std::span<const int>)>& visit) {
  const int n = g.size();
  int total = std::accumulate(start.begin(), start.end(), 0);
  StateKey key;
  key.reset(start, total, 0);
  StateSet seen;
  seen.reset(key.size());
  std::vector<int> cur = std::move(start);
  bool stop = false;
  std::function<void()> dfs = [&]() {
    if (stop || !seen.insert(key.data(), key.hash())) return;
    if (visit(cur)) {
      stop = true;
      return;
    }
    for (int u = 0; u < n && !stop; ++u) {
      if (cur[u] < 2) continue;
      for (int v : g.neighbors(u)) {
        cur[u] -= 2;
        cur[v] += 1;
        key.set(u, cur[u]);
        key.set(v, cur[v]);
        dfs();
        cur[u] += 2;
        cur[v] -= 1;
        key.set(u, cur[u]);
        key.set(v, cur[v]);
        if (stop) return;
      }
    }
  };
  dfs();
}

}  // namespace

CrossingMoves crossing_move_possible(const PebbleGraph& g, const Distribution& dist, int boundary) {
  if (dist.vertex_count() != g.size()) throw PebblingError("distribution does not match graph");
  if (boundary < 2 || boundary >= g.slash_count()) {
    throw std::out_of_range("crossing boundary must be an inner slash");
  }
  auto across = [&](std::span<const int> counts, int lower) {
    for (int u = 0; u < g.size(); ++u) {
      if (counts[u] < 2) continue;
      const int s = g.slash(u);
      if (s != lower && s != lower + 1) continue;
      for (int v : g.neighbors(u)) {
        if (g.slash(v) + g.slash(u) == 2 * lower + 1) return true;
      }
    }
    return false;
  };
  CrossingMoves out;
  explore_reachable(g, std::vector<int>(dist.counts().begin(), dist.counts().end()),
                    [&](std::span<const int> counts) {
                      out.left = out.left || across(counts, boundary - 1);
                      out.right = out.right || across(counts, boundary);
                      return out.left && out.right;
                    });
  return out;
}

SplitResult split_at_cut(const PebbleGraph& g, const Distribution& dist, int boundary,
                         CutSide side) {
  const auto crossing = crossing_move_possible(g, dist, boundary);
  if (side == CutSide::Left ? crossing.left : crossing.right) {
    throw PebblingError("a pebbling move across the chosen cut is possible");
  }
  SplitResult out;
  out.cut_after = side == CutSide::Left ? boundary - 1 : boundary;
  const int c = out.cut_after;
  const int n = g.slash_count();

  auto induced = [&](const std::vector<int>& members, const PebbleGraph& part_graph) {
    Distribution part(part_graph.size());
    for (int v : members) {
      auto h = part_graph.find(g.coord(v));
      part.set(*h, dist[v]);
    }
    return part;
  };

  if (const auto& spec = g.provenance()) {
    const auto left = staircase_segment(*spec, 1, c);
    const auto right = staircase_segment(*spec, c + 1, n - c);
    out.left_graph = build_staircase(left.part);
    out.right_graph = build_staircase(right.part);
    out.left_dist = Distribution(out.left_graph.size());
    out.right_dist = Distribution(out.right_graph.size());
    for (int v = 0; v < out.left_graph.size(); ++v) out.left_dist.set(v, dist[left.into_whole[v]]);
    for (int v = 0; v < out.right_graph.size(); ++v) out.right_dist.set(v, dist[right.into_whole[v]]);
  } else {
    std::vector<int> lv;
    std::vector<int> rv;
    std::vector<GridCoord> lc;
    std::vector<GridCoord> rc;
    for (int v = 0; v < g.size(); ++v) {
      if (g.slash(v) <= c) {
        lv.push_back(v);
        lc.push_back(g.coord(v));
      } else {
        rv.push_back(v);
        rc.push_back(g.coord(v));
      }
    }
    out.left_graph = PebbleGraph(lc);
    out.right_graph = PebbleGraph(rc);
    out.left_dist = induced(lv, out.left_graph);
    out.right_dist = induced(rv, out.right_graph);
  }

  if (!is_k_solvable(out.left_graph, out.left_dist).solvable) {
    throw PebblingError("left part of the cut is not solvable");
  }
  if (!is_k_solvable(out.right_graph, out.right_dist).solvable) {
    throw PebblingError("right part of the cut is not solvable");
  }
  return out;
}

}  // namespace pebbling
