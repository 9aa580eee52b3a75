#pragma once

#include <string>

#include "json.hpp"
#include "pebbling/distribution.hpp"
#include "pebbling/grid.hpp"
#include "pebbling/harness.hpp"
#include "pebbling/pebble.hpp"
#include "pebbling/search.hpp"

namespace pebbling {

using Json = nlohmann::ordered_json;

Json to_json(const PebbleGraph& g);
/// Rebuilds the staircase when "spec" is present (and checks the vertex
/// list), otherwise the induced subgraph of the listed coordinates.
PebbleGraph graph_from_json(const Json& j);

/// Graph as a spec object when it is a staircase, otherwise as graph JSON.
Json to_json(const PebbleGraph& g, const Distribution& d);
struct PlacedGraph {
  PebbleGraph graph;
  Distribution dist;
};
PlacedGraph distribution_from_json(const Json& j);
Json moves_json(const std::vector<Move>& moves);

Json to_json(const SearchReport& r, bool with_timing = true);
Json to_json(const VerifyReport& r);
Json to_json(const ExperimentReport& r);
Json to_json(const SuiteResult& r);

std::string verify_markdown(const VerifyReport& r);
std::string experiment_markdown(const ExperimentReport& r);

/// Undirected DOT graph; vertices are placed at their grid coordinates and
/// labelled with their pebble count when a distribution is given.
std::string to_dot(const PebbleGraph& g, const Distribution* dist = nullptr);

/// "1,0,2" -> counts.
Distribution parse_counts(const std::string& text);

}  // namespace pebbling
