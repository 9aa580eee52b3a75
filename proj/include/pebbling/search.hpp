#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "pebbling/distribution.hpp"
#include "pebbling/grid.hpp"
#include "pebbling/pebble.hpp"

namespace pebbling {

struct SearchConfig {
  int k = 1;
  int threads = 1;
  /// Wall-clock budget for the whole search; 0 means unlimited.
  double budget_seconds = 0;
  /// Largest size attempted before giving up.
  int max_size = 64;
  bool use_symmetry = true;
  /// Automorphism search is skipped above this many vertices.
  int automorphism_vertex_cap = 64;
  std::size_t automorphism_limit = 4096;
  /// A known k-solvable distribution; the search stops below its size.
  std::optional<Distribution> upper_hint;
  /// Progress file for resumable searches; empty disables checkpointing.
  std::string checkpoint_path;
  double checkpoint_interval_seconds = 30;
};

/// Outcome of an optimality search. When `exhaustive` is set the optimum is
/// lower_bound == *upper_bound; otherwise only the interval is known.
struct SearchReport {
  std::string graph_id;
  std::optional<StaircaseSpec> spec;
  int k = 1;
  int lower_bound = 0;
  std::optional<int> upper_bound;
  std::optional<Distribution> witness;
  std::uint64_t candidates_examined = 0;
  std::uint64_t pruned_by_weight = 0;
  std::chrono::milliseconds elapsed{0};
  bool exhaustive = false;
  bool budget_exhausted = false;
  bool resumed = false;

  /// The optimum; only meaningful when exhaustive.
  int optimal_size() const { return upper_bound.value_or(lower_bound); }
};

/// Result of scanning all candidates of one size.
struct SizeScan {
  std::optional<Distribution> witness;
  std::uint64_t candidates_examined = 0;
  std::uint64_t pruned_by_weight = 0;
  bool completed = true;  // false when stopped by the deadline
  std::size_t work_items = 0;
  std::size_t cursor = 0;  // work items fully refuted
};

/// Least size of a k-solvable distribution, with a witness. Returns a
/// non-exhaustive report (interval) when the budget runs out.
SearchReport optimal_pebbling_number(const PebbleGraph& g, const SearchConfig& config = {});

/// First k-solvable distribution of exactly `size` pebbles in enumeration
/// order (up to symmetry), or a refutation of the whole size.
SizeScan scan_size(const PebbleGraph& g, int size, const SearchConfig& config,
                   std::size_t start_item = 0);

/// Calls `visit` on every k-solvable distribution of exactly `size` pebbles
/// (no symmetry reduction).
void for_each_solvable(const PebbleGraph& g, int size, int k,
                       const std::function<void(const Distribution&)>& visit);

/// All automorphisms found (identity first); identity only above the vertex cap.
std::vector<VertexMap> automorphism_generators(const PebbleGraph& g, int vertex_cap = 64,
                                               std::size_t limit = 4096);

struct PathOptimum {
  int size = 0;
  std::vector<Distribution> witnesses;
};

/// Minimal k-solvable size of the n-vertex path and every minimal witness.
/// Throws std::invalid_argument when n exceeds `cap`.
PathOptimum k_optimal_size_path(int n, int k = 2, int cap = 14);

enum class SegmentKind { OneDoubled, ZeroFourZero };

struct PrimeSegment {
  int start = 0;  // inclusive, 0-based
  int end = 0;    // inclusive
  SegmentKind kind = SegmentKind::OneDoubled;
};

struct PrimeSegmentReport {
  bool conforms = false;
  std::vector<PrimeSegment> segments;
  std::vector<int> separators;     // unoccupied vertices between segments
  std::optional<int> violation;    // first position no parse can cover
};

/// Splits a path distribution into prime segments separated by single empty
/// vertices: a segment is all ones except one 2, or all ones except one
/// consecutive 0,4,0 block.
PrimeSegmentReport prime_segment_decomposition(std::span<const int> counts);

struct CutCertificate {
  int inner_slash = 0;  // the slash that is not 2-reachable
  CutSide side = CutSide::Left;
  int c = 0;            // cut between slashes c and c + 1
  StaircaseSpec left;
  StaircaseSpec right;
  int left_size = 0;
  int right_size = 0;
};

/// For a solvable distribution with fewer than n-1 pebbles on an n-slash
/// staircase: locate an inner slash that is not 2-reachable, cut beside it
/// and return both parts. Throws std::invalid_argument when the size
/// hypothesis fails or the distribution is not solvable.
CutCertificate decompose_and_bound(const PebbleGraph& g, const Distribution& dist);

}  // namespace pebbling
