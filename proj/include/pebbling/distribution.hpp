#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pebbling {

/// Pebble counts indexed by vertex, with a cached total.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(int vertex_count) : counts_(vertex_count, 0) {}
  /// Throws std::invalid_argument on negative counts.
  explicit Distribution(std::vector<int> counts);

  int vertex_count() const { return static_cast<int>(counts_.size()); }
  /// |P|, the number of pebbles.
  int total() const { return total_; }
  int operator[](int v) const { return counts_[v]; }
  std::span<const int> counts() const { return counts_; }

  /// Throws std::invalid_argument if the count would become negative.
  void add(int v, int delta);
  void set(int v, int count) { add(v, count - counts_[v]); }

  bool empty() const { return total_ == 0; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<int> counts_;
  int total_ = 0;
};

}  // namespace pebbling
