#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "pebbling/distribution.hpp"
#include "pebbling/grid.hpp"

namespace pebbling {

class PebblingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a search exceeds ReachOptions::state_budget.
class StateBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Remove two pebbles from `from`, add one to the neighbor `to`.
struct Move {
  int from = 0;
  int to = 0;
  friend bool operator==(const Move&, const Move&) = default;
};

/// Throws PebblingError on a non-edge or when `from` holds fewer than two pebbles.
Distribution apply_move(const PebbleGraph& g, const Distribution& dist, Move move);
Distribution replay(const PebbleGraph& g, Distribution dist, std::span<const Move> moves);

/// numerator / 2^exponent, kept in lowest terms.
struct DyadicRational {
  std::uint64_t numerator = 0;
  int exponent = 0;

  double value() const;
  /// Exact comparison with an integer.
  bool at_least(std::uint64_t k) const;
  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
};

/// Sum over v of P(v) * 2^-d(v, targets). Never increases under a pebbling
/// move, so a value below k proves the targets are not k-reachable. Vertices
/// in other components contribute nothing.
DyadicRational weight_bound(const PebbleGraph& g, const Distribution& dist, int target);
DyadicRational weight_bound(const PebbleGraph& g, const Distribution& dist,
                            std::span<const int> targets);

/// Can k pebbles in total be gathered on `targets`?
struct ReachQuery {
  std::vector<int> targets;
  int k = 1;

  /// Throws std::invalid_argument unless k >= 1 and targets is a nonempty set
  /// of vertices of g.
  void validate(const PebbleGraph& g) const;
};

struct ReachOptions {
  bool want_witness = false;
  bool weight_pruning = true;
  /// Never use an edge in both directions along one move sequence.
  bool forbid_reverse_edges = false;
  /// On large graphs, first try to certify reachability inside growing balls
  /// around the targets before searching the whole state space.
  bool localize = true;
  /// Localization only applies to graphs with more vertices than this.
  int localize_above = 48;
  /// Abort with StateBudgetExceeded after this many states (0: unlimited).
  std::uint64_t state_budget = 0;
};

struct ReachResult {
  bool reachable = false;
  std::vector<Move> witness;
  std::uint64_t states_visited = 0;
};

struct SolvabilityResult {
  bool solvable = false;
  std::optional<int> failing_vertex;
};

/// Exact reachability decisions on one graph. Precomputes distances and
/// weight tables once, so it pays off when many distributions are checked on
/// the same graph. Not thread-safe; use one instance per thread.
class ReachabilitySolver {
 public:
  explicit ReachabilitySolver(const PebbleGraph& g);
  ~ReachabilitySolver();
  ReachabilitySolver(ReachabilitySolver&&) noexcept;
  ReachabilitySolver& operator=(ReachabilitySolver&&) noexcept;

  const PebbleGraph& graph() const;

  ReachResult reachable(std::span<const int> counts, const ReachQuery& query,
                        const ReachOptions& options = {});

  /// Targets are examined in ascending weight order, so the returned failing
  /// vertex is the first one in that order.
  SolvabilityResult solvable(std::span<const int> counts, int k, const ReachOptions& options = {});

  /// Scaled single-target weights; weight(v, t) = 2^(shift - d(v, t)), with
  /// unreachable pairs 0 and very distant pairs rounded up to 1.
  std::uint64_t scaled_weight(int v, int target) const;
  int weight_shift() const;

  /// Distance matrix row; -1 for unreachable.
  std::span<const int> distances(int v) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ReachResult is_k_reachable(const PebbleGraph& g, const Distribution& dist, const ReachQuery& query,
                           const ReachOptions& options = {});
SolvabilityResult is_k_solvable(const PebbleGraph& g, const Distribution& dist, int k = 1,
                                const ReachOptions& options = {});

/// Slashes whose vertex set is 2-reachable.
std::set<int> two_reachable_slashes(const PebbleGraph& g, const Distribution& dist);

struct CrossingMoves {
  bool left = false;   // across slashes (boundary - 1, boundary)
  bool right = false;  // across slashes (boundary, boundary + 1)
};

/// Decided by exploring every reachable distribution. `boundary` must be an
/// inner slash.
CrossingMoves crossing_move_possible(const PebbleGraph& g, const Distribution& dist, int boundary);

enum class CutSide { Left, Right };

struct SplitResult {
  int cut_after = 0;  // the cut lies between slashes cut_after and cut_after + 1
  PebbleGraph left_graph;
  Distribution left_dist;
  PebbleGraph right_graph;
  Distribution right_dist;
};

/// Deletes the edges between two consecutive slashes (on the `side` of
/// `boundary`) and returns both components with their induced distributions.
/// Staircase inputs yield canonical staircase parts. Throws PebblingError if a
/// move across the cut is possible or if a part is not solvable.
SplitResult split_at_cut(const PebbleGraph& g, const Distribution& dist, int boundary,
                         CutSide side);

}  // namespace pebbling
