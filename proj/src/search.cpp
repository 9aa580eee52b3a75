#include "pebbling/search.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "json.hpp"

namespace pebbling {
namespace {

using Clock = std::chrono::steady_clock;
using Counts = std::vector<int>;

constexpr std::size_t kTargetWorkItems = 256;
constexpr std::size_t kNoItem = std::numeric_limits<std::size_t>::max();

// Immutable tables shared by every worker of one size scan.
struct ScanTables {
  int n = 0;
  int size = 0;
  int k = 1;
  std::uint64_t need = 0;
  std::vector<std::uint64_t> weight;  // weight[v * n + u]
  std::vector<std::uint64_t> suffix;  // suffix[i * n + u] = max over v >= i of weight(v, u)
  std::vector<VertexMap> inverse_autos;  // non-identity automorphisms, inverted

  ScanTables(const PebbleGraph& g, int size_, int k_, const std::vector<VertexMap>& autos)
      : n(g.size()), size(size_), k(k_) {
    ReachabilitySolver solver(g);
    need = static_cast<std::uint64_t>(k) << solver.weight_shift();
    weight.resize(static_cast<std::size_t>(n) * n);
    for (int v = 0; v < n; ++v) {
      for (int u = 0; u < n; ++u) weight[v * n + u] = solver.scaled_weight(v, u);
    }
    suffix.assign(static_cast<std::size_t>(n + 1) * n, 0);
    for (int i = n - 1; i >= 0; --i) {
      for (int u = 0; u < n; ++u) suffix[i * n + u] = std::max(suffix[(i + 1) * n + u], weight[i * n + u]);
    }
    for (const auto& a : autos) {
      bool identity = true;
      for (int v = 0; v < n; ++v) identity = identity && a[v] == v;
      if (identity) continue;
      VertexMap inv(n);
      for (int v = 0; v < n; ++v) inv[a[v]] = v;
      inverse_autos.push_back(std::move(inv));
    }
  }
};

// Depth-first enumeration of count vectors: vertex 0 first, smaller counts
// first, so vectors come out in increasing lexicographic order. Each orbit is
// represented by its lexicographically smallest member, the first one met.
class Enumerator {
 public:
  Enumerator(const PebbleGraph& g, const ScanTables& t)
      : t_(t), solver_(g), counts_(t.n, 0), cov_(t.n, 0) {}

  std::function<bool()> should_stop;                  // polled every few thousand nodes
  std::function<bool(const Counts&)> on_solvable;     // return true to stop
  bool use_symmetry = true;

  std::uint64_t examined = 0;
  std::uint64_t pruned = 0;
  bool aborted = false;

  /// Runs the subtree below a fixed prefix. Returns true when stopped by on_solvable.
  bool run(const Counts& prefix) {
    std::fill(counts_.begin(), counts_.end(), 0);
    std::fill(cov_.begin(), cov_.end(), 0);
    int left = t_.size;
    for (int i = 0; i < static_cast<int>(prefix.size()); ++i) {
      place(i, prefix[i]);
      left -= prefix[i];
    }
    return dfs(static_cast<int>(prefix.size()), left);
  }

  /// Collects every prefix of length `depth` that survives coverage pruning.
  std::vector<Counts> prefixes(int depth) {
    std::vector<Counts> out;
    std::fill(counts_.begin(), counts_.end(), 0);
    std::fill(cov_.begin(), cov_.end(), 0);
    collect(0, t_.size, depth, out);
    return out;
  }

 private:
  const ScanTables& t_;
  ReachabilitySolver solver_;
  Counts counts_;
  std::vector<std::uint64_t> cov_;
  std::uint64_t nodes_ = 0;

  void place(int v, int c) {
    counts_[v] += c;
    const std::uint64_t* row = &t_.weight[static_cast<std::size_t>(v) * t_.n];
    for (int u = 0; u < t_.n; ++u) cov_[u] += static_cast<std::uint64_t>(c) * row[u];
  }
  void unplace(int v, int c) {
    counts_[v] -= c;
    const std::uint64_t* row = &t_.weight[static_cast<std::size_t>(v) * t_.n];
    for (int u = 0; u < t_.n; ++u) cov_[u] -= static_cast<std::uint64_t>(c) * row[u];
  }

  // Every vertex must still be able to collect weight k once the remaining
  // pebbles go on the best unassigned vertex for it.
  bool coverable(int next, int left) const {
    const std::uint64_t* best = &t_.suffix[static_cast<std::size_t>(next) * t_.n];
    for (int u = 0; u < t_.n; ++u) {
      if (cov_[u] + static_cast<std::uint64_t>(left) * best[u] < t_.need) return false;
    }
    return true;
  }

  bool canonical() const {
    for (const auto& inv : t_.inverse_autos) {
      for (int v = 0; v < t_.n; ++v) {
        const int image = counts_[inv[v]];
        if (image != counts_[v]) {
          if (image < counts_[v]) return false;
          break;
        }
      }
    }
    return true;
  }

  bool leaf() {
    if (use_symmetry && !canonical()) return false;
    ++examined;
    if (!solver_.solvable(counts_, t_.k).solvable) return false;
    return on_solvable(counts_);
  }

  bool dfs(int i, int left) {
    if (left == 0) return leaf();
    if ((++nodes_ & 4095) == 0 && should_stop && should_stop()) aborted = true;
    if (aborted) return false;
    for (int c = i == t_.n - 1 ? left : 0; c <= left; ++c) {
      place(i, c);
      bool stop = false;
      if (coverable(i + 1, left - c)) {
        stop = dfs(i + 1, left - c);
      } else {
        ++pruned;
      }
      unplace(i, c);
      if (stop) return true;
      if (aborted) return false;
    }
    return false;
  }

  void collect(int i, int left, int depth, std::vector<Counts>& out) {
    if (i == depth || left == 0) {
      out.emplace_back(counts_.begin(), counts_.begin() + depth);
      return;
    }
    for (int c = i == t_.n - 1 ? left : 0; c <= left; ++c) {
      place(i, c);
      if (coverable(i + 1, left - c)) {
        collect(i + 1, left - c, depth, out);
      } else {
        ++pruned;
      }
      unplace(i, c);
    }
  }
};

struct ItemResult {
  bool done = false;
  std::optional<Counts> witness;
  std::uint64_t examined = 0;
  std::uint64_t pruned = 0;
};

std::string graph_key(const PebbleGraph& g) {
  return g.provenance() ? g.provenance()->name() : g.id();
}

struct Checkpoint {
  std::string graph;
  int k = 1;
  int t = 0;
  std::size_t cursor = 0;
  std::int64_t elapsed_ms = 0;
};

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  if (path.empty()) return;
  nlohmann::json j{{"graph", cp.graph}, {"k", cp.k}, {"t", cp.t}, {"cursor", cp.cursor},
                   {"elapsed_ms", cp.elapsed_ms}};
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Checkpoint> read_checkpoint(const std::string& path) {
  if (path.empty() || !std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  try {
    return Checkpoint{j.at("graph").get<std::string>(), j.at("k").get<int>(), j.at("t").get<int>(),
                      j.at("cursor").get<std::size_t>(), j.at("elapsed_ms").get<std::int64_t>()};
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

struct ScanControl {
  std::optional<Clock::time_point> deadline;
  std::function<void(std::size_t cursor)> checkpoint;
  double checkpoint_interval_seconds = 30;
};

SizeScan scan(const PebbleGraph& g, int size, const SearchConfig& config,
              const std::vector<VertexMap>& autos, std::size_t start_item, const ScanControl& control) {
  const ScanTables tables(g, size, config.k, autos);
  SizeScan out;

  // The split into work items depends only on (graph, size, k), never on the
  // thread count, which keeps counters and the reported witness reproducible.
  std::vector<Counts> items;
  std::uint64_t prefix_pruned = 0;
  {
    Enumerator e(g, tables);
    for (int depth = 0; depth <= tables.n; ++depth) {
      e.pruned = 0;
      items = e.prefixes(depth);
      prefix_pruned = e.pruned;
      if (items.size() >= kTargetWorkItems || depth == tables.n) break;
    }
  }
  out.work_items = items.size();
  if (start_item > items.size()) throw std::invalid_argument("checkpoint cursor beyond work items");

  std::vector<ItemResult> results(items.size());
  std::atomic<std::size_t> next{start_item};
  std::atomic<std::size_t> winner{kNoItem};
  std::atomic<bool> timed_out{false};
  std::mutex mu;
  std::condition_variable cv;
  int active = std::max(1, config.threads);

  auto worker = [&] {
    Enumerator e(g, tables);
    e.use_symmetry = config.use_symmetry;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size() || i > winner.load() || timed_out.load()) break;
      e.examined = e.pruned = 0;
      e.aborted = false;
      std::optional<Counts> found;
      e.should_stop = [&] {
        if (winner.load() < i || timed_out.load()) return true;
        if (control.deadline && Clock::now() > *control.deadline) {
          timed_out = true;
          return true;
        }
        return false;
      };
      e.on_solvable = [&](const Counts& c) {
        found = c;
        return true;
      };
      e.run(items[i]);
      if (e.aborted) {
        if (timed_out.load()) break;
        continue;  // a smaller item already won
      }
      {
        std::lock_guard lock(mu);
        results[i] = {true, std::move(found), e.examined, e.pruned};
      }
      if (results[i].witness) {
        std::size_t cur = winner.load();
        while (i < cur && !winner.compare_exchange_weak(cur, i)) {
        }
      }
    }
    std::lock_guard lock(mu);
    --active;
    cv.notify_all();
  };

  std::vector<std::jthread> pool;
  for (int i = 0; i < std::max(1, config.threads); ++i) pool.emplace_back(worker);

  auto refuted_prefix = [&] {
    std::size_t c = start_item;
    while (c < results.size() && results[c].done && !results[c].witness) ++c;
    return c;
  };
  {
    std::unique_lock lock(mu);
    const auto interval = std::chrono::duration<double>(control.checkpoint_interval_seconds);
    while (active > 0) {
      if (cv.wait_for(lock, interval, [&] { return active == 0; })) break;
      if (control.checkpoint) control.checkpoint(refuted_prefix());
    }
  }
  pool.clear();

  const std::size_t w = winner.load();
  const std::size_t last = w != kNoItem ? w + 1 : refuted_prefix();
  out.pruned_by_weight = prefix_pruned;
  for (std::size_t i = start_item; i < last; ++i) {
    out.candidates_examined += results[i].examined;
    out.pruned_by_weight += results[i].pruned;
  }
  if (w != kNoItem) {
    out.witness = Distribution(*results[w].witness);
    out.cursor = w;
  } else {
    out.cursor = last;
    out.completed = last == items.size();
  }
  return out;
}

std::vector<VertexMap> search_autos(const PebbleGraph& g, const SearchConfig& config) {
  if (!config.use_symmetry) return {};
  return automorphism_generators(g, config.automorphism_vertex_cap, config.automorphism_limit);
}

}  // namespace

std::vector<VertexMap> automorphism_generators(const PebbleGraph& g, int vertex_cap, std::size_t limit) {
  VertexMap identity(g.size());
  std::iota(identity.begin(), identity.end(), 0);
  std::vector<VertexMap> out{identity};
  if (g.size() > vertex_cap) return out;
  for (auto& a : find_all_isomorphisms(g, g, limit)) {
    if (a != identity) out.push_back(std::move(a));
  }
  return out;
}

SizeScan scan_size(const PebbleGraph& g, int size, const SearchConfig& config, std::size_t start_item) {
  if (size < 0) throw std::invalid_argument("negative size");
  ScanControl control;
  if (config.budget_seconds > 0) {
    control.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                          std::chrono::duration<double>(config.budget_seconds));
  }
  control.checkpoint_interval_seconds = config.checkpoint_interval_seconds;
  return scan(g, size, config, search_autos(g, config), start_item, control);
}

SearchReport optimal_pebbling_number(const PebbleGraph& g, const SearchConfig& config) {
  if (config.k < 1) throw std::invalid_argument("k must be at least 1");
  const auto started = Clock::now();
  SearchReport report;
  report.graph_id = g.id();
  report.spec = g.provenance();
  report.k = config.k;

  const auto autos = search_autos(g, config);
  const std::string key = graph_key(g);

  // No vertex can collect k pebbles from fewer than k.
  int t = config.k;
  std::size_t start_item = 0;
  std::int64_t prior_ms = 0;
  if (auto cp = read_checkpoint(config.checkpoint_path); cp && cp->graph == key && cp->k == config.k) {
    t = std::max(cp->t, config.k);
    start_item = cp->cursor;
    prior_ms = cp->elapsed_ms;
    report.resumed = true;
  }
  report.lower_bound = t;

  std::optional<int> hint_size;
  if (config.upper_hint) {
    if (config.upper_hint->vertex_count() != g.size() || !is_k_solvable(g, *config.upper_hint, config.k).solvable) {
      throw std::invalid_argument("upper hint is not a k-solvable distribution on this graph");
    }
    hint_size = config.upper_hint->total();
  }

  auto elapsed_ms = [&] {
    return prior_ms + std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
  };

  ScanControl control;
  if (config.budget_seconds > 0) {
    control.deadline = started + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(config.budget_seconds));
  }
  control.checkpoint_interval_seconds = config.checkpoint_interval_seconds;

  for (; t <= config.max_size && (!hint_size || t < *hint_size); ++t) {
    if (!config.checkpoint_path.empty()) {
      control.checkpoint = [&, t](std::size_t cursor) {
        write_checkpoint(config.checkpoint_path, {key, config.k, t, cursor, elapsed_ms()});
      };
    }
    auto s = scan(g, t, config, autos, start_item, control);
    start_item = 0;
    report.candidates_examined += s.candidates_examined;
    report.pruned_by_weight += s.pruned_by_weight;
    if (s.witness) {
      report.upper_bound = t;
      report.witness = std::move(s.witness);
      write_checkpoint(config.checkpoint_path, {key, config.k, t, s.cursor, elapsed_ms()});
      break;
    }
    if (!s.completed) {
      report.budget_exhausted = true;
      write_checkpoint(config.checkpoint_path, {key, config.k, t, s.cursor, elapsed_ms()});
      break;
    }
    report.lower_bound = t + 1;
    write_checkpoint(config.checkpoint_path, {key, config.k, t + 1, 0, elapsed_ms()});
  }

  if (!report.upper_bound && hint_size) {
    report.upper_bound = hint_size;
    report.witness = config.upper_hint;
  }
  report.exhaustive = report.upper_bound && *report.upper_bound == report.lower_bound;
  if (report.witness && !is_k_solvable(g, *report.witness, config.k).solvable) {
    throw std::logic_error("search produced an unsolvable witness");
  }
  report.elapsed = std::chrono::milliseconds(elapsed_ms());
  return report;
}

void for_each_solvable(const PebbleGraph& g, int size, int k,
                       const std::function<void(const Distribution&)>& visit) {
  const ScanTables tables(g, size, k, {});
  Enumerator e(g, tables);
  e.use_symmetry = false;
  e.on_solvable = [&](const Counts& c) {
    visit(Distribution(c));
    return false;
  };
  e.run({});
}

PathOptimum k_optimal_size_path(int n, int k, int cap) {
  if (n < 1) throw std::invalid_argument("path needs at least one vertex");
  if (n > cap) throw std::invalid_argument("path length exceeds the enumeration cap");
  const auto path = build_grid_window(1, n);
  PathOptimum out;
  for (int t = k;; ++t) {
    for_each_solvable(path, t, k, [&](const Distribution& d) { out.witnesses.push_back(d); });
    if (!out.witnesses.empty()) {
      out.size = t;
      return out;
    }
  }
}

namespace {

std::optional<SegmentKind> segment_kind(std::span<const int> c) {
  int twos = 0;
  int others = 0;
  for (int x : c) {
    twos += x == 2;
    others += x != 1 && x != 2;
  }
  if (twos == 1 && others == 0) return SegmentKind::OneDoubled;
  if (twos != 0 || c.size() < 3) return std::nullopt;
  for (std::size_t i = 0; i + 2 < c.size(); ++i) {
    if (c[i] == 0 && c[i + 1] == 4 && c[i + 2] == 0) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        if ((j < i || j > i + 2) && c[j] != 1) return std::nullopt;
      }
      return SegmentKind::ZeroFourZero;
    }
  }
  return std::nullopt;
}

}  // namespace

PrimeSegmentReport prime_segment_decomposition(std::span<const int> counts) {
  const int n = static_cast<int>(counts.size());
  PrimeSegmentReport report;
  if (n == 0) {
    report.violation = 0;
    return report;
  }
  // parent[s]: the segment ending just before the separator that lets a
  // segment start at s.
  std::vector<std::optional<PrimeSegment>> parent(n + 1);
  std::vector<char> can_start(n, 0);
  can_start[0] = 1;
  std::optional<PrimeSegment> final_segment;
  int covered = 0;
  for (int s = 0; s < n && !final_segment; ++s) {
    if (!can_start[s]) continue;
    for (int e = s; e < n; ++e) {
      auto kind = segment_kind(counts.subspan(s, e - s + 1));
      if (!kind) continue;
      PrimeSegment seg{s, e, *kind};
      covered = std::max(covered, e + 1);
      if (e == n - 1) {
        final_segment = seg;
        break;
      }
      if (counts[e + 1] == 0 && e + 2 < n && !can_start[e + 2]) {
        can_start[e + 2] = 1;
        parent[e + 2] = seg;
        covered = std::max(covered, e + 2);
      }
    }
  }
  if (!final_segment) {
    report.violation = covered;
    return report;
  }
  report.conforms = true;
  for (std::optional<PrimeSegment> seg = final_segment; seg; seg = parent[seg->start]) {
    report.segments.push_back(*seg);
    if (seg->start > 0) report.separators.push_back(seg->start - 1);
  }
  std::reverse(report.segments.begin(), report.segments.end());
  std::reverse(report.separators.begin(), report.separators.end());
  return report;
}

CutCertificate decompose_and_bound(const PebbleGraph& g, const Distribution& dist) {
  if (!g.provenance()) throw std::invalid_argument("decompose_and_bound needs a staircase");
  const int n = g.slash_count();
  if (dist.total() >= n - 1) throw std::invalid_argument("distribution has at least n-1 pebbles");
  if (!is_k_solvable(g, dist).solvable) throw std::invalid_argument("distribution is not solvable");

  const auto reachable = two_reachable_slashes(g, dist);
  for (int s = 2; s <= n - 1; ++s) {
    if (reachable.contains(s)) continue;
    const auto crossing = crossing_move_possible(g, dist, s);
    if (crossing.left && crossing.right) continue;
    const CutSide side = crossing.left ? CutSide::Right : CutSide::Left;
    auto split = split_at_cut(g, dist, s, side);
    CutCertificate cert;
    cert.inner_slash = s;
    cert.side = side;
    cert.c = split.cut_after;
    cert.left = *split.left_graph.provenance();
    cert.right = *split.right_graph.provenance();
    cert.left_size = split.left_dist.total();
    cert.right_size = split.right_dist.total();
    return cert;
  }
  throw std::logic_error("no inner slash admits a one-sided cut");
}

}  // namespace pebbling
