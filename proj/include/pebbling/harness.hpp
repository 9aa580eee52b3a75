#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pebbling/constructions.hpp"
#include "pebbling/search.hpp"

namespace pebbling {

inline constexpr const char* kEngineVersion = "1.0";

class UnstatedValue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values stated by one width theorem. Exceptions override the formula;
/// `unspecified` lists lengths the theorem excludes without giving a value.
struct TheoremTable {
  std::string family;  // "width3" ... "width8"
  int width = 0;
  std::function<std::optional<SizeRange>(int n, Variant v)> formula;
  std::map<std::pair<int, Variant>, SizeRange> exceptions;
  std::set<std::pair<int, Variant>> unspecified;
  /// Width 7: staircases on which the lower bound n+1 is claimed to be attained.
  std::set<std::pair<int, Variant>> sharp;
  std::string source;
};

/// Tables for widths 3..8; throws std::invalid_argument otherwise.
const TheoremTable& theorem_table(int width);
const TheoremTable& theorem_table(const std::string& family);

/// Exact value (low == high) or the width-7 interval. Throws
/// UnstatedValue for lengths the theorem leaves open.
SizeRange expected_value(const TheoremTable& table, int n, Variant variant);
bool claimed_sharp(const TheoremTable& table, int n, Variant variant);

struct CacheEntry {
  StaircaseSpec spec;
  int k = 1;
  int size = 0;
  Distribution witness;
  bool exhaustive = false;
  bool derived = false;  // value not stated by the theorems
  std::uint64_t candidates_examined = 0;
  std::uint64_t pruned_by_weight = 0;
  std::string engine_version;
  std::string timestamp;
};

/// Witnesses keyed by (normalized spec, k), stored as one JSON document.
/// Entries whose witness does not re-verify are dropped on load.
class WitnessCache {
 public:
  WitnessCache() = default;
  explicit WitnessCache(std::string path) : path_(std::move(path)) {}

  /// Missing file: empty cache bound to `path`.
  static WitnessCache load(const std::string& path);
  /// Writes to a temporary file and renames it over the target.
  void save() const;

  std::optional<CacheEntry> find(const StaircaseSpec& spec, int k) const;
  void put(CacheEntry entry);
  std::size_t size() const { return entries_.size(); }
  std::size_t dropped_on_load() const { return dropped_; }
  const std::string& path() const { return path_; }
  std::vector<CacheEntry> entries() const;

  /// Exhaustive k = 1 entries, for base_witness().
  WitnessProvider provider() const;

 private:
  std::string path_;
  std::map<std::string, CacheEntry> entries_;
  std::size_t dropped_ = 0;
};

enum class Verdict { Match, Mismatch, Contained, Derived, Incomplete, Skipped };
std::string to_string(Verdict v);

struct VerifyRow {
  StaircaseSpec spec;
  std::optional<SizeRange> expected;  // nullopt: not stated by the theorem
  bool claimed_sharp = false;
  SearchReport search;
  Verdict verdict = Verdict::Incomplete;
  std::string note;
};

struct VerifyReport {
  std::string family;
  std::vector<VerifyRow> rows;
  bool any_mismatch() const;
  bool complete() const;
};

struct VerifyConfig {
  SearchConfig search;
  WitnessCache* cache = nullptr;
  /// Re-run the search even on a cache hit and fail on disagreement.
  bool revalidate = false;
  /// Run S6,8, S6,9, S7,7, S7,8 and S8,n (n >= 8) instead of skipping them.
  bool long_profile = false;
};

/// Runs optimal_pebbling_number on every (n, variant) and compares it with
/// the theorem table. Distinct variants of even-width staircases collapse.
VerifyReport verify_theorem(const TheoremTable& table, int n_lo, int n_hi,
                            const std::vector<Variant>& variants, const VerifyConfig& config);

/// Best known construction used as the search's upper hint, if any.
std::optional<Distribution> known_upper_bound(const StaircaseSpec& spec);

struct ExperimentRow {
  StaircaseSpec spec;
  int construction = 0;
  std::optional<int> lower;  // from search within budget
  std::optional<int> upper;
  bool exhaustive = false;
};

struct ExperimentReport {
  std::string id;
  std::vector<ExperimentRow> rows;
  std::optional<double> slope;
  std::optional<double> intercept;
  std::vector<double> residuals;
};

/// "width7": constructions against search intervals.
/// "width8": widened 7-wide constructions (and search where affordable),
///           slope fitted over the best known upper bounds.
/// "width7k": `multiple` stacked 7-wide constructions, slope fitted.
/// Throws std::invalid_argument on an unknown id.
ExperimentReport run_conjecture_experiment(const std::string& id, int n_lo, int n_hi,
                                           const SearchConfig& search, int multiple = 1,
                                           bool run_search = true);

/// Stacks `copies` 7-wide constructions across the negative diagonals of
/// S_{7*copies, n}. Verified before return.
Placed stacked_seven_wide(int copies, int n);

/// Least-squares line through (x, y); requires two distinct x values.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  std::vector<double> residuals;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct SuiteResult {
  std::string name;
  int samples = 0;
  int passed = 0;
  std::vector<std::string> failures;  // first few failing cases
  bool ok() const { return samples > 0 && passed == samples; }
};

/// Uncovered slashes, one-sided cuts and solvable split parts on random
/// solvable staircase distributions.
SuiteResult lemma_suite(unsigned seed, int samples);
/// Reachability transfers to the slash-to-path and 7->6 collapses.
SuiteResult collapse_suite(unsigned seed, int samples);

}  // namespace pebbling
