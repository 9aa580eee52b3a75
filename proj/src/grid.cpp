#include "pebbling/grid.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <regex>
#include <set>

namespace pebbling {

std::string to_string(Variant v) { return v == Variant::Plain ? "plain" : "prime"; }

Variant variant_from_string(const std::string& s) {
  if (s == "plain") return Variant::Plain;
  if (s == "prime") return Variant::Prime;
  throw std::invalid_argument("unknown staircase variant '" + s + "'");
}

void StaircaseSpec::validate() const {
  if (width < 1 || length < 1) {
    throw std::invalid_argument("staircase width and length must be positive");
  }
}

StaircaseSpec StaircaseSpec::normalized() const {
  StaircaseSpec s = *this;
  if (width % 2 == 0) s.variant = Variant::Plain;
  return s;
}

int StaircaseSpec::first_positive_diagonal() const {
  if (width % 2 == 0) return 1;
  return variant == Variant::Prime ? 1 : 0;
}

std::string StaircaseSpec::name() const {
  const auto n = normalized();
  return std::string(n.variant == Variant::Prime ? "S'" : "S") + std::to_string(width) + "," +
         std::to_string(length);
}

StaircaseSpec StaircaseSpec::parse(const std::string& text) {
  static const std::regex pattern(R"(^\s*S('?)(\d+)\s*,\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) {
    throw std::invalid_argument("cannot parse staircase '" + text + "' (expected e.g. S3,7 or S'3,7)");
  }
  StaircaseSpec spec{std::stoi(m[2]), std::stoi(m[3]),
                     m[1].length() > 0 ? Variant::Prime : Variant::Plain};
  spec.validate();
  return spec;
}

bool StaircaseSpec::operator==(const StaircaseSpec& other) const {
  const auto a = normalized();
  const auto b = other.normalized();
  return a.width == b.width && a.length == b.length && a.variant == b.variant;
}

PebbleGraph::PebbleGraph(std::vector<GridCoord> vertices, std::optional<StaircaseSpec> provenance)
    : provenance_(provenance) {
  if (vertices.empty()) throw GraphError("graph has no vertices");
  int min_pos = vertices.front().positive_diagonal();
  int min_neg = vertices.front().negative_diagonal();
  int max_pos = min_pos;
  int max_neg = min_neg;
  for (const auto& c : vertices) {
    min_pos = std::min(min_pos, c.positive_diagonal());
    max_pos = std::max(max_pos, c.positive_diagonal());
    min_neg = std::min(min_neg, c.negative_diagonal());
    max_neg = std::max(max_neg, c.negative_diagonal());
  }
  int neg_origin = min_neg;
  slash_origin_ = min_pos;
  if (provenance_) {
    slash_origin_ = provenance_->first_positive_diagonal();
    neg_origin = 1;
    slash_count_ = provenance_->length;
    neg_diag_count_ = provenance_->width;
  } else {
    slash_count_ = max_pos - min_pos + 1;
    neg_diag_count_ = max_neg - min_neg + 1;
  }

  std::sort(vertices.begin(), vertices.end(), [](const GridCoord& a, const GridCoord& b) {
    return std::pair(a.positive_diagonal(), a.x) < std::pair(b.positive_diagonal(), b.x);
  });
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end()) {
    throw GraphError("duplicate vertex");
  }
  coords_ = std::move(vertices);

  const int n = size();
  std::map<GridCoord, int> index;
  for (int v = 0; v < n; ++v) index.emplace(coords_[v], v);

  offsets_.assign(n + 1, 0);
  slash_.resize(n);
  neg_diag_.resize(n);
  static constexpr int dx[] = {1, -1, 0, 0};
  static constexpr int dy[] = {0, 0, 1, -1};
  for (int v = 0; v < n; ++v) {
    const auto& c = coords_[v];
    slash_[v] = c.positive_diagonal() - slash_origin_ + 1;
    neg_diag_[v] = c.negative_diagonal() - neg_origin + 1;
    std::vector<int> nb;
    for (int d = 0; d < 4; ++d) {
      auto it = index.find({c.x + dx[d], c.y + dy[d]});
      if (it != index.end()) nb.push_back(it->second);
    }
    std::sort(nb.begin(), nb.end());
    adjacency_.insert(adjacency_.end(), nb.begin(), nb.end());
    offsets_[v + 1] = static_cast<int>(adjacency_.size());
  }
  label_ = provenance_ ? provenance_->name() : "graph" + std::to_string(n);
}

bool PebbleGraph::adjacent(int u, int v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<int, int>> PebbleGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < size(); ++u) {
    for (int v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<int> PebbleGraph::slash_vertices(int s) const {
  std::vector<int> out;
  for (int v = 0; v < size(); ++v) {
    if (slash_[v] == s) out.push_back(v);
  }
  return out;
}

std::optional<int> PebbleGraph::find(GridCoord c) const {
  auto it = std::lower_bound(coords_.begin(), coords_.end(), c,
                             [](const GridCoord& a, const GridCoord& b) {
                               return std::pair(a.positive_diagonal(), a.x) <
                                      std::pair(b.positive_diagonal(), b.x);
                             });
  if (it != coords_.end() && *it == c) return static_cast<int>(it - coords_.begin());
  return std::nullopt;
}

std::vector<int> PebbleGraph::distances_from(int v) const {
  std::vector<int> dist(size(), -1);
  std::queue<int> q;
  dist[v] = 0;
  q.push(v);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int w : neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

bool PebbleGraph::connected() const {
  auto d = distances_from(0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

std::string PebbleGraph::id() const { return label_; }

PebbleGraph build_staircase(const StaircaseSpec& spec) {
  spec.validate();
  const auto s = spec.normalized();
  const int lo = s.first_positive_diagonal();
  std::vector<GridCoord> vertices;
  for (int b = lo; b < lo + s.length; ++b) {
    for (int a = 1; a <= s.width; ++a) {
      if ((a - b) % 2 == 0) vertices.push_back(GridCoord::from_diagonals(a, b));
    }
  }
  if (vertices.empty()) throw GraphError("staircase " + s.name() + " has no vertices");
  return PebbleGraph(std::move(vertices), s);
}

PebbleGraph build_grid_window(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be positive");
  std::vector<GridCoord> vertices;
  for (int y = 1; y <= rows; ++y) {
    for (int x = 1; x <= cols; ++x) vertices.push_back({x, y});
  }
  PebbleGraph g(std::move(vertices));
  g.label_ = "grid" + std::to_string(rows) + "x" + std::to_string(cols);
  return g;
}

QuotientMap::QuotientMap(PebbleGraph source, PebbleGraph target, std::vector<int> assignment)
    : source_(std::move(source)), target_(std::move(target)), assignment_(std::move(assignment)) {
  if (static_cast<int>(assignment_.size()) != source_.size()) {
    throw GraphError("quotient assignment does not cover the source graph");
  }
  std::vector<char> hit(target_.size(), 0);
  for (int h : assignment_) {
    if (h < 0 || h >= target_.size()) throw GraphError("quotient assignment out of range");
    hit[h] = 1;
  }
  if (std::find(hit.begin(), hit.end(), 0) != hit.end()) {
    throw GraphError("quotient assignment is not surjective");
  }
  std::set<std::pair<int, int>> images;
  for (auto [u, v] : source_.edges()) {
    int a = assignment_[u];
    int b = assignment_[v];
    if (a == b) continue;
    images.emplace(std::min(a, b), std::max(a, b));
  }
  auto target_edges = target_.edges();
  if (images != std::set<std::pair<int, int>>(target_edges.begin(), target_edges.end())) {
    throw GraphError("assignment violates the quotient condition");
  }
}

Distribution collapse(const QuotientMap& map, const Distribution& dist) {
  if (dist.vertex_count() != map.source().size()) {
    throw GraphError("distribution is not defined on the quotient source");
  }
  Distribution out(map.target().size());
  for (int v = 0; v < dist.vertex_count(); ++v) {
    if (dist[v] > 0) out.add(map(v), dist[v]);
  }
  return out;
}

bool is_isomorphism(const PebbleGraph& a, const PebbleGraph& b, std::span<const int> map) {
  if (a.size() != b.size() || static_cast<int>(map.size()) != a.size()) return false;
  std::vector<char> used(b.size(), 0);
  for (int h : map) {
    if (h < 0 || h >= b.size() || used[h]) return false;
    used[h] = 1;
  }
  for (int u = 0; u < a.size(); ++u) {
    for (int v = u + 1; v < a.size(); ++v) {
      if (a.adjacent(u, v) != b.adjacent(map[u], map[v])) return false;
    }
  }
  return true;
}

namespace {

/// Backtracking over vertices of `a` in BFS order; candidates in `b` must
/// match degree and adjacency to all previously mapped vertices.
void enumerate_isomorphisms(const PebbleGraph& a, const PebbleGraph& b, std::size_t limit,
                            std::vector<VertexMap>& out) {
  if (a.size() != b.size() || a.edge_count() != b.edge_count()) return;
  const int n = a.size();
  auto degree_profile = [](const PebbleGraph& g) {
    std::vector<int> d(g.size());
    for (int v = 0; v < g.size(); ++v) d[v] = static_cast<int>(g.neighbors(v).size());
    return d;
  };
  auto da = degree_profile(a);
  auto db = degree_profile(b);
  {
    auto sa = da;
    auto sb = db;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return;
  }

  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (int root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::queue<int> q;
    q.push(root);
    seen[root] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      order.push_back(u);
      for (int w : a.neighbors(u)) {
        if (!seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
      }
    }
  }

  VertexMap map(n, -1);
  std::vector<char> used(n, 0);
  std::function<bool(int)> extend = [&](int depth) -> bool {
    if (depth == n) {
      out.push_back(map);
      return out.size() >= limit;
    }
    const int u = order[depth];
    for (int h = 0; h < n; ++h) {
      if (used[h] || db[h] != da[u]) continue;
      bool ok = true;
      for (int i = 0; i < depth && ok; ++i) {
        int w = order[i];
        ok = a.adjacent(u, w) == b.adjacent(h, map[w]);
      }
      if (!ok) continue;
      map[u] = h;
      used[h] = 1;
      if (extend(depth + 1)) return true;
      used[h] = 0;
      map[u] = -1;
    }
    return false;
  };
  extend(0);
}

// Candidate coordinate transform of a staircase, in (negative, positive)
// diagonal coordinates.
using DiagonalTransform = std::function<std::pair<int, int>(int, int)>;

std::optional<VertexMap> apply_transform(const PebbleGraph& ga, const PebbleGraph& gb,
                                         const DiagonalTransform& t) {
  VertexMap map(ga.size());
  for (int v = 0; v < ga.size(); ++v) {
    const auto& c = ga.coord(v);
    auto [na, pb] = t(c.negative_diagonal(), c.positive_diagonal());
    if ((na - pb) % 2 != 0) return std::nullopt;
    auto h = gb.find(GridCoord::from_diagonals(na, pb));
    if (!h) return std::nullopt;
    map[v] = *h;
  }
  if (!is_isomorphism(ga, gb, map)) return std::nullopt;
  return map;
}

}  // namespace

std::optional<VertexMap> find_isomorphism(const PebbleGraph& a, const PebbleGraph& b) {
  std::vector<VertexMap> out;
  enumerate_isomorphisms(a, b, 1, out);
  if (out.empty()) return std::nullopt;
  return out.front();
}

std::vector<VertexMap> find_all_isomorphisms(const PebbleGraph& a, const PebbleGraph& b,
                                             std::size_t limit) {
  std::vector<VertexMap> out;
  if (limit > 0) enumerate_isomorphisms(a, b, limit, out);
  return out;
}

std::optional<VertexMap> staircase_isomorphism(const StaircaseSpec& a, const StaircaseSpec& b,
                                               int exhaustive_limit) {
  const auto sa = a.normalized();
  const auto sb = b.normalized();
  const auto ga = build_staircase(sa);
  const auto gb = build_staircase(sb);
  if (ga.size() != gb.size() || ga.edge_count() != gb.edge_count()) return std::nullopt;

  const int lo_a = sa.first_positive_diagonal();
  const int lo_b = sb.first_positive_diagonal();
  std::vector<DiagonalTransform> families;
  if (sa.width == sb.width && sa.length == sb.length) {
    families.push_back([](int na, int pb) { return std::pair(na, pb); });
    // Reverse the slash order; realizes S'm,n ~ Sm,n for even n.
    const int n = sa.length;
    families.push_back([=](int na, int pb) { return std::pair(na, lo_a + lo_b + n - 1 - pb); });
    const int m = sa.width;
    families.push_back([=](int na, int pb) { return std::pair(m + 1 - na, pb + lo_b - lo_a); });
  }
  if (sa.width == sb.length && sa.length == sb.width) {
    // Exchange the roles of the two diagonal families.
    const int m = sa.width;
    const int n = sa.length;
    for (bool flip_neg : {false, true}) {
      for (bool flip_pos : {false, true}) {
        families.push_back([=](int na, int pb) {
          int new_neg = flip_neg ? n + lo_a - pb : pb - lo_a + 1;
          int new_pos = flip_pos ? lo_b + m - na : na - 1 + lo_b;
          return std::pair(new_neg, new_pos);
        });
      }
    }
  }
  for (const auto& t : families) {
    if (auto map = apply_transform(ga, gb, t)) return map;
  }
  if (ga.size() <= exhaustive_limit) return find_isomorphism(ga, gb);
  return std::nullopt;
}

SegmentEmbedding staircase_segment(const StaircaseSpec& whole, int first_slash, int length) {
  const auto w = whole.normalized();
  w.validate();
  if (first_slash < 1 || length < 1 || first_slash + length - 1 > w.length) {
    throw GraphError("segment outside the staircase");
  }
  const int m = w.width;
  const int first_diag = w.first_positive_diagonal() + first_slash - 1;
  StaircaseSpec part{m, length, Variant::Plain};
  if (m % 2 == 1 && first_diag % 2 != 0) part.variant = Variant::Prime;
  const int shift = first_diag - part.first_positive_diagonal();
  // An odd shift only happens for even widths; reflecting the negative
  // diagonals restores the parity there.
  const bool reflect = shift % 2 != 0;

  const auto whole_graph = build_staircase(w);
  const auto part_graph = build_staircase(part);
  VertexMap map(part_graph.size());
  for (int v = 0; v < part_graph.size(); ++v) {
    const auto& c = part_graph.coord(v);
    int a = reflect ? m + 1 - c.negative_diagonal() : c.negative_diagonal();
    int b = c.positive_diagonal() + shift;
    auto h = whole_graph.find(GridCoord::from_diagonals(a, b));
    if (!h) throw GraphError("segment embedding left the staircase");
    map[v] = *h;
  }
  return {part, std::move(map)};
}

QuotientMap slash_to_path_map(const PebbleGraph& g) {
  if (g.slash_count() < 1) throw GraphError("graph has no slash structure");
  auto path = build_grid_window(1, g.slash_count());
  std::vector<int> assignment(g.size());
  for (int v = 0; v < g.size(); ++v) assignment[v] = g.slash(v) - 1;
  return QuotientMap(g, std::move(path), std::move(assignment));
}

QuotientMap merge_negative_diagonals_7to6(const PebbleGraph& g) {
  const auto& spec = g.provenance();
  if (!spec || spec->width != 7) throw GraphError("7->6 collapse needs a 7-wide staircase");
  const int lo = spec->first_positive_diagonal();
  auto target = build_staircase({6, spec->length, Variant::Plain});
  std::vector<int> assignment(g.size());
  for (int v = 0; v < g.size(); ++v) {
    const auto& c = g.coord(v);
    int a = c.negative_diagonal();
    int b = c.positive_diagonal();
    if (a == 1) a = 3;
    int new_neg = lo % 2 == 0 ? a - 1 : 8 - a;
    int new_pos = b - lo + 1;
    auto h = target.find(GridCoord::from_diagonals(new_neg, new_pos));
    if (!h) throw GraphError("7->6 collapse left the target staircase");
    assignment[v] = *h;
  }
  return QuotientMap(g, std::move(target), std::move(assignment));
}

}  // namespace pebbling
