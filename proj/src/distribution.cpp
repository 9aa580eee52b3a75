#include "pebbling/distribution.hpp"

#include <numeric>

namespace pebbling {

Distribution::Distribution(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw std::invalid_argument("negative pebble count");
  }
  total_ = std::accumulate(counts_.begin(), counts_.end(), 0);
}

void Distribution::add(int v, int delta) {
  if (counts_.at(v) + delta < 0) throw std::invalid_argument("negative pebble count");
  counts_[v] += delta;
  total_ += delta;
}

}  // namespace pebbling
