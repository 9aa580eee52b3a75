#include "pebbling/io.hpp"

#include <cstdio>
#include <sstream>

namespace pebbling {

namespace {

Json spec_json(const StaircaseSpec& s) {
  const auto w = s.normalized();
  return {{"m", w.width}, {"n", w.length}, {"variant", to_string(w.variant)}};
}

StaircaseSpec spec_from_json(const Json& j) {
  if (j.is_string()) return StaircaseSpec::parse(j.get<std::string>());
  return {j.at("m").get<int>(), j.at("n").get<int>(), variant_from_string(j.value("variant", std::string("plain")))};
}

Json pebbles_json(const Distribution& d) {
  Json out = Json::array();
  for (int v = 0; v < d.vertex_count(); ++v) {
    if (d[v] > 0) out.push_back({v, d[v]});
  }
  return out;
}

Json range_json(const std::optional<SizeRange>& r) {
  if (!r) return nullptr;
  return {{"low", r->low}, {"high", r->high}};
}

std::string range_text(const std::optional<SizeRange>& r) {
  if (!r) return "unstated";
  if (r->low == r->high) return std::to_string(r->low);
  return "[" + std::to_string(r->low) + ", " + std::to_string(r->high) + "]";
}

std::string interval_text(const SearchReport& r) {
  if (r.exhaustive) return std::to_string(r.optimal_size());
  return "[" + std::to_string(r.lower_bound) + ", " + (r.upper_bound ? std::to_string(*r.upper_bound) : "?") + "]";
}

std::optional<std::pair<int, int>> grid_shape(const PebbleGraph& g) {
  int rows = 0, cols = 0;
  if (std::sscanf(g.id().c_str(), "grid%dx%d", &rows, &cols) == 2) return std::pair{rows, cols};
  return std::nullopt;
}

}  // namespace

Json to_json(const PebbleGraph& g) {
  Json j;
  j["spec"] = g.provenance() ? spec_json(*g.provenance()) : Json(nullptr);
  if (auto shape = grid_shape(g)) j["grid"] = {{"rows", shape->first}, {"cols", shape->second}};
  j["vertices"] = Json::array();
  for (const auto& c : g.coords()) j["vertices"].push_back({c.x, c.y});
  j["edges"] = Json::array();
  for (const auto& [u, v] : g.edges()) j["edges"].push_back({u, v});
  return j;
}

PebbleGraph graph_from_json(const Json& j) {
  if (j.is_string() || j.contains("m")) return build_staircase(spec_from_json(j));
  std::vector<GridCoord> coords;
  for (const auto& p : j.at("vertices")) coords.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  PebbleGraph g;
  if (j.contains("spec") && !j["spec"].is_null()) {
    g = build_staircase(spec_from_json(j["spec"]));
  } else if (j.contains("grid")) {
    g = build_grid_window(j["grid"].at("rows").get<int>(), j["grid"].at("cols").get<int>());
  } else {
    return PebbleGraph(std::move(coords));
  }
  if (!coords.empty() && !std::equal(coords.begin(), coords.end(), g.coords().begin(), g.coords().end())) {
    throw GraphError("vertex list does not match " + g.id());
  }
  return g;
}

Json to_json(const PebbleGraph& g, const Distribution& d) {
  Json j;
  j["graph"] = g.provenance() ? spec_json(*g.provenance()) : to_json(g);
  j["size"] = d.total();
  j["pebbles"] = pebbles_json(d);
  return j;
}

PlacedGraph distribution_from_json(const Json& j) {
  PlacedGraph out{graph_from_json(j.at("graph")), {}};
  out.dist = Distribution(out.graph.size());
  for (const auto& p : j.at("pebbles")) {
    const int v = p.at(0).get<int>();
    if (v < 0 || v >= out.graph.size()) throw std::invalid_argument("pebble on a missing vertex");
    out.dist.add(v, p.at(1).get<int>());
  }
  return out;
}

Json moves_json(const std::vector<Move>& moves) {
  Json out = Json::array();
  for (const auto& m : moves) out.push_back({m.from, m.to});
  return out;
}

Json to_json(const SearchReport& r, bool with_timing) {
  Json j;
  j["graph"] = r.graph_id;
  j["spec"] = r.spec ? spec_json(*r.spec) : Json(nullptr);
  j["k"] = r.k;
  j["optimal_size"] = r.exhaustive ? Json(r.optimal_size()) : Json(nullptr);
  j["lower_bound"] = r.lower_bound;
  j["upper_bound"] = r.upper_bound ? Json(*r.upper_bound) : Json(nullptr);
  j["witness"] = r.witness ? Json{{"size", r.witness->total()}, {"pebbles", pebbles_json(*r.witness)}} : Json(nullptr);
  j["candidates_examined"] = r.candidates_examined;
  j["pruned_by_weight"] = r.pruned_by_weight;
  if (with_timing) j["elapsed_ms"] = r.elapsed.count();
  j["exhaustive"] = r.exhaustive;
  j["budget_exhausted"] = r.budget_exhausted;
  if (with_timing) j["resumed"] = r.resumed;
  return j;
}

Json to_json(const VerifyReport& r) {
  Json j;
  j["family"] = r.family;
  j["engine_version"] = kEngineVersion;
  j["rows"] = Json::array();
  int mismatches = 0, incomplete = 0, skipped = 0, derived = 0;
  for (const auto& row : r.rows) {
    mismatches += row.verdict == Verdict::Mismatch;
    incomplete += row.verdict == Verdict::Incomplete;
    skipped += row.verdict == Verdict::Skipped;
    derived += row.verdict == Verdict::Derived;
    Json e;
    e["spec"] = row.spec.name();
    e["expected"] = range_json(row.expected);
    e["value_source"] = row.expected ? "stated" : "derived";
    e["claimed_sharp"] = row.claimed_sharp;
    e["verdict"] = to_string(row.verdict);
    e["note"] = row.note;
    e["search"] = row.verdict == Verdict::Skipped ? Json(nullptr) : to_json(row.search, false);
    j["rows"].push_back(std::move(e));
  }
  j["summary"] = {{"rows", r.rows.size()},
                  {"mismatches", mismatches},
                  {"incomplete", incomplete},
                  {"skipped", skipped},
                  {"derived", derived}};
  return j;
}

Json to_json(const ExperimentReport& r) {
  Json j;
  j["conjecture"] = r.id;
  j["rows"] = Json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"spec", row.spec.name()},
                         {"construction", row.construction},
                         {"lower_bound", row.lower ? Json(*row.lower) : Json(nullptr)},
                         {"upper_bound", row.upper ? Json(*row.upper) : Json(nullptr)},
                         {"exhaustive", row.exhaustive}});
  }
  j["slope"] = r.slope ? Json(*r.slope) : Json(nullptr);
  j["intercept"] = r.intercept ? Json(*r.intercept) : Json(nullptr);
  j["residuals"] = r.residuals;
  return j;
}

Json to_json(const SuiteResult& r) {
  return {{"suite", r.name}, {"samples", r.samples}, {"passed", r.passed}, {"failures", r.failures}};
}

std::string verify_markdown(const VerifyReport& r) {
  std::ostringstream out;
  out << "## " << r.family << "\n\n";
  out << "| graph | expected | source | computed | exhaustive | verdict | candidates | note |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : r.rows) {
    out << "| " << row.spec.name() << " | " << range_text(row.expected) << (row.claimed_sharp ? " (sharp)" : "")
        << " | " << (row.expected ? "stated" : "derived") << " | "
        << (row.verdict == Verdict::Skipped ? "-" : interval_text(row.search)) << " | "
        << (row.search.exhaustive ? "yes" : "no") << " | " << to_string(row.verdict) << " | "
        << row.search.candidates_examined << " | " << row.note << " |\n";
  }
  return out.str();
}

std::string experiment_markdown(const ExperimentReport& r) {
  std::ostringstream out;
  out << "## conjecture " << r.id << "\n\n";
  out << "| graph | construction | search interval |\n|---|---|---|\n";
  for (const auto& row : r.rows) {
    out << "| " << row.spec.name() << " | " << row.construction << " | ";
    if (row.lower) {
      out << "[" << *row.lower << ", " << (row.upper ? std::to_string(*row.upper) : "?") << "]"
          << (row.exhaustive ? " exact" : "");
    } else {
      out << "-";
    }
    out << " |\n";
  }
  if (r.slope) out << "\nleast-squares slope " << *r.slope << ", intercept " << *r.intercept << "\n";
  return out.str();
}

std::string to_dot(const PebbleGraph& g, const Distribution* dist) {
  std::ostringstream out;
  out << "graph \"" << g.id() << "\" {\n  node [shape=circle];\n";
  for (int v = 0; v < g.size(); ++v) {
    const auto c = g.coord(v);
    out << "  v" << v << " [label=\"";
    if (dist) {
      out << (*dist)[v];
    } else {
      out << c.x << "," << c.y;
    }
    out << "\", pos=\"" << c.x << "," << c.y << "!\"";
    if (dist && (*dist)[v] > 0) out << ", style=filled, fillcolor=lightgray";
    out << "];\n";
  }
  for (int s = 1; s <= g.slash_count(); ++s) {
    out << "  { rank=same;";
    for (int v : g.slash_vertices(s)) out << " v" << v << ";";
    out << " }\n";
  }
  for (const auto& [u, v] : g.edges()) out << "  v" << u << " -- v" << v << ";\n";
  out << "}\n";
  return out.str();
}

Distribution parse_counts(const std::string& text) {
  std::vector<int> counts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int c = 0;
    try {
      c = std::stoi(item, &used);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad pebble count '" + item + "'");
    }
    if (used != item.size() && item.find_first_not_of(" ", used) != std::string::npos) {
      throw std::invalid_argument("bad pebble count '" + item + "'");
    }
    counts.push_back(c);
  }
  return Distribution(std::move(counts));
}

}  // namespace pebbling
