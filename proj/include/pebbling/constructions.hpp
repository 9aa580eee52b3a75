#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "pebbling/distribution.hpp"
#include "pebbling/grid.hpp"

namespace pebbling {

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Family { Width3, Width4, Width5, Width6, Width7, Width7Prime, WidenedFrom, GridSevenDiagonal };

std::string to_string(Family f);

struct SizeRange {
  int low = 0;
  int high = 0;
  bool contains(int v) const { return low <= v && v <= high; }
  friend bool operator==(const SizeRange&, const SizeRange&) = default;
};

struct ConstructionPlan {
  Family family = Family::Width3;
  std::optional<StaircaseSpec> spec;  // staircase families
  int rows = 0;                       // grid window
  int cols = 0;
  int widened_from = 0;               // width before widen()
  SizeRange expected_size;
};

/// A staircase together with a distribution on build_staircase(spec).
struct Placed {
  StaircaseSpec spec;
  Distribution dist;
};

struct Construction {
  ConstructionPlan plan;
  Placed placed;
};

/// Optional external source of base witnesses (e.g. a persistent cache).
/// Returned distributions are re-verified before use.
using WitnessProvider = std::function<std::optional<Distribution>(const StaircaseSpec&)>;
void set_witness_provider(WitnessProvider provider);

/// Optimal solvable distribution of a small staircase (width 2..8, length up
/// to 9; length up to 8 at width 8), found by exhaustive search and memoized.
/// Throws ConstructionError outside that range.
Distribution base_witness(const StaircaseSpec& spec);

/// Glues `right` after the last slash of `left`. The right block must be the
/// segment the combined staircase has there; for even length it may be given
/// in the other, isomorphic, variant. The result is re-verified.
Placed concatenate(const Placed& left, const Placed& right);

/// Upper-bound distributions for 7-wide staircases. Lengths up to 8 use the
/// searched optimum; longer ones follow the recipes: n+1 for S'(n = 3 mod 4),
/// n+2 for S'(n = 1 mod 4, n >= 13) and even n >= 10, n+3 for plain odd n.
/// Verified before return.
Distribution seven_wide_pattern(int n, Variant variant);

/// Adds a negative diagonal m+1 and extra pebbles on diagonal m at every
/// fourth slash (plus the last vertex of diagonal m). Returns the canonical
/// (m+1)-wide staircase. Throws std::invalid_argument if `dist` is not
/// solvable and ConstructionError if the result fails verification.
Placed widen(const StaircaseSpec& spec, const Distribution& dist);

/// Seven-diagonal pattern on the rows x cols grid window, patched at the
/// border until every vertex is certified reachable.
Distribution grid_seven_diagonal(int rows, int cols);

/// Best construction for a staircase of width 3..7: optimal base blocks
/// chained by dynamic programming for widths 3..6, seven_wide_pattern for
/// width 7.
Construction construct(const StaircaseSpec& spec);

}  // namespace pebbling
