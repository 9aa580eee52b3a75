#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pebbling/distribution.hpp"

namespace pebbling {

/// A vertex of the infinite square grid.
struct GridCoord {
  int x = 0;
  int y = 0;

  /// Index of the positive diagonal through this point (x - y).
  int positive_diagonal() const { return x - y; }
  /// Index of the negative diagonal through this point (x + y).
  int negative_diagonal() const { return x + y; }

  static GridCoord from_diagonals(int negative, int positive) {
    return {(negative + positive) / 2, (negative - positive) / 2};
  }

  auto operator<=>(const GridCoord&) const = default;
};

enum class Variant { Plain, Prime };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

/// Width m, length n and variant of a staircase graph.
///
/// The staircase is the subgraph of the grid induced by the points whose
/// negative diagonal lies in [1, m] and whose positive diagonal lies in a
/// window of n consecutive values. For odd m the window is [0, n-1]
/// (Plain) or [1, n] (Prime); for even m it is always [1, n] and the Prime
/// variant is an alias of Plain.
struct StaircaseSpec {
  int width = 0;
  int length = 0;
  Variant variant = Variant::Plain;

  /// Throws std::invalid_argument when m < 1 or n < 1.
  void validate() const;
  /// Prime collapses to Plain for even widths.
  StaircaseSpec normalized() const;
  /// Lowest positive diagonal of the window.
  int first_positive_diagonal() const;

  std::string name() const;  // "S3,7" or "S'3,7"
  static StaircaseSpec parse(const std::string& text);

  bool operator==(const StaircaseSpec& other) const;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite induced subgraph of the square grid.
///
/// Vertices are ordered by (slash index, x). Slashes are the positive
/// diagonals, numbered from 1 starting at the lowest occupied one (for
/// staircases: starting at the first diagonal of the window, so a staircase
/// of length n always has slashes 1..n). Negative diagonals are numbered the
/// same way. Instances are immutable after construction.
class PebbleGraph {
 public:
  PebbleGraph() = default;
  /// Builds the induced subgraph on `vertices` (duplicates are rejected).
  explicit PebbleGraph(std::vector<GridCoord> vertices,
                       std::optional<StaircaseSpec> provenance = std::nullopt);

  int size() const { return static_cast<int>(coords_.size()); }
  const GridCoord& coord(int v) const { return coords_[v]; }
  std::span<const GridCoord> coords() const { return coords_; }
  std::span<const int> neighbors(int v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  bool adjacent(int u, int v) const;
  int edge_count() const { return static_cast<int>(adjacency_.size() / 2); }
  /// Edges as (u, v) with u < v, sorted.
  std::vector<std::pair<int, int>> edges() const;

  /// 1-based slash number of v.
  int slash(int v) const { return slash_[v]; }
  int slash_count() const { return slash_count_; }
  /// Vertices of slash s (1-based), in vertex order.
  std::vector<int> slash_vertices(int s) const;
  /// 1-based negative diagonal number of v.
  int negative_diagonal(int v) const { return neg_diag_[v]; }
  int negative_diagonal_count() const { return neg_diag_count_; }

  const std::optional<StaircaseSpec>& provenance() const { return provenance_; }

  /// Index of the vertex at `c`, if present.
  std::optional<int> find(GridCoord c) const;

  /// BFS distances from v; -1 marks unreachable vertices.
  std::vector<int> distances_from(int v) const;
  bool connected() const;

  /// Human-readable id, e.g. "S3,7" or "grid3x4" or "graph9".
  std::string id() const;

  friend bool operator==(const PebbleGraph& a, const PebbleGraph& b) {
    return a.coords_ == b.coords_ && a.provenance_ == b.provenance_;
  }

 private:
  std::vector<GridCoord> coords_;
  std::vector<int> offsets_;
  std::vector<int> adjacency_;
  std::vector<int> slash_;
  std::vector<int> neg_diag_;
  int slash_count_ = 0;
  int neg_diag_count_ = 0;
  int slash_origin_ = 0;
  std::optional<StaircaseSpec> provenance_;
  std::string label_;

  friend PebbleGraph build_grid_window(int rows, int cols);
};

PebbleGraph build_staircase(const StaircaseSpec& spec);
/// rows x cols grid with x in [1, cols] and y in [1, rows].
PebbleGraph build_grid_window(int rows, int cols);

/// A surjection from the vertices of `source` onto those of `target` such that
/// {h1, h2} is a target edge iff some source edge maps onto it. Edges of the
/// source may collapse onto a single target vertex.
class QuotientMap {
 public:
  /// Throws GraphError unless the assignment is surjective and satisfies the
  /// quotient condition.
  QuotientMap(PebbleGraph source, PebbleGraph target, std::vector<int> assignment);

  const PebbleGraph& source() const { return source_; }
  const PebbleGraph& target() const { return target_; }
  int operator()(int v) const { return assignment_[v]; }
  std::span<const int> assignment() const { return assignment_; }

 private:
  PebbleGraph source_;
  PebbleGraph target_;
  std::vector<int> assignment_;
};

/// A vertex bijection between two graphs, as source index -> target index.
using VertexMap = std::vector<int>;

/// True iff `map` is a bijection preserving adjacency and non-adjacency.
bool is_isomorphism(const PebbleGraph& a, const PebbleGraph& b, std::span<const int> map);

/// Explicit isomorphism S(a) -> S(b) for the known isomorphic families
/// (width/length swap, Plain/Prime for even length, even-width aliasing),
/// falling back to exhaustive search when both graphs have at most
/// `exhaustive_limit` vertices.
std::optional<VertexMap> staircase_isomorphism(const StaircaseSpec& a, const StaircaseSpec& b,
                                               int exhaustive_limit = 20);

/// Exhaustive backtracking isomorphism search.
std::optional<VertexMap> find_isomorphism(const PebbleGraph& a, const PebbleGraph& b);
/// All isomorphisms a -> b, stopping after `limit` of them. With a == b this
/// enumerates the automorphism group.
std::vector<VertexMap> find_all_isomorphisms(const PebbleGraph& a, const PebbleGraph& b,
                                             std::size_t limit);

/// P_phi(h) = sum of P(g) over the preimages g of h. Throws GraphError if
/// `dist` is not defined on map.source().
Distribution collapse(const QuotientMap& map, const Distribution& dist);

/// Slashes [first_slash, first_slash + length) of the staircase `whole` form a
/// staircase of their own. Returns its canonical spec and the embedding of the
/// canonical graph's vertices into build_staircase(whole). The part's variant
/// is fixed by the parity of its first positive diagonal.
struct SegmentEmbedding {
  StaircaseSpec part;
  VertexMap into_whole;
};
SegmentEmbedding staircase_segment(const StaircaseSpec& whole, int first_slash, int length);

/// Maps slash s of g to vertex s of the path on slash_count() vertices.
QuotientMap slash_to_path_map(const PebbleGraph& g);

/// Collapses a 7-wide staircase to the 6-wide one by identifying the first
/// and third negative diagonals.
QuotientMap merge_negative_diagonals_7to6(const PebbleGraph& g);

}  // namespace pebbling
