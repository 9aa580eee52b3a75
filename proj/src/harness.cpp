#include "pebbling/harness.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "pebbling/io.hpp"

namespace pebbling {

namespace {

using Key = std::pair<int, Variant>;

SizeRange exact(int v) { return {v, v}; }

TheoremTable make_width3() {
  TheoremTable t;
  t.family = "width3";
  t.width = 3;
  t.formula = [](int n, Variant v) -> std::optional<SizeRange> {
    if (n < 2) return std::nullopt;
    const int k = n / 4;
    const int r = n % 4;
    if (v == Variant::Prime && r == 3) return exact(3 * k + 2);
    return exact(3 * k + r);
  };
  t.unspecified = {{1, Variant::Plain}, {1, Variant::Prime}};
  t.source = "width-3 theorem: 3k+r, and 3k+2 for S' with r = 3 (n = 4k+r >= 2)";
  return t;
}

TheoremTable make_width4() {
  TheoremTable t;
  t.family = "width4";
  t.width = 4;
  t.formula = [](int n, Variant) -> std::optional<SizeRange> { return exact(3 * (n / 4) + n % 4); };
  t.exceptions = {{{1, Variant::Plain}, exact(2)}, {{2, Variant::Plain}, exact(3)}};
  t.source = "width-4 theorem: 3k+r except S4,1 = 2 and S4,2 = 3";
  return t;
}

TheoremTable make_width5() {
  TheoremTable t;
  t.family = "width5";
  t.width = 5;
  t.formula = [](int n, Variant) -> std::optional<SizeRange> { return exact(4 * (n / 5) + n % 5); };
  t.exceptions = {{{3, Variant::Plain}, exact(4)},
                  {{3, Variant::Prime}, exact(4)},
                  {{7, Variant::Prime}, exact(7)}};
  t.unspecified = {{1, Variant::Plain}, {1, Variant::Prime}, {2, Variant::Plain},
                   {2, Variant::Prime}, {7, Variant::Plain}};
  t.source = "width-5 theorem: 4k+r except n in {1,2,3,7}; S5,3 = S'5,3 = 4, S'5,7 = 7";
  return t;
}

TheoremTable make_width6() {
  TheoremTable t;
  t.family = "width6";
  t.width = 6;
  t.formula = [](int n, Variant) -> std::optional<SizeRange> { return exact(n); };
  t.exceptions = {{{3, Variant::Plain}, exact(5)},
                  {{4, Variant::Plain}, exact(5)},
                  {{8, Variant::Plain}, exact(9)},
                  {{9, Variant::Plain}, exact(10)}};
  t.unspecified = {{1, Variant::Plain}, {2, Variant::Plain}};
  t.source = "width-6 theorem: n except n in {1,2,3,4,8,9}; S6,3 = S6,4 = 5, S6,8 = 9, S6,9 = 10";
  return t;
}

TheoremTable make_width7() {
  TheoremTable t;
  t.family = "width7";
  t.width = 7;
  t.formula = [](int n, Variant) -> std::optional<SizeRange> { return SizeRange{n + 1, n + 3}; };
  for (int n : {5, 6, 7, 8}) t.sharp.insert({n, Variant::Plain});
  for (int n : {6, 8}) t.sharp.insert({n, Variant::Prime});
  for (int n = 3; n <= 256; n += 4) t.sharp.insert({n, Variant::Prime});
  t.source = "width-7 theorem: n+1 <= value <= n+3, lower bound attained on S7,5..S7,8 and S'7,(3 mod 4)";
  return t;
}

TheoremTable make_width8() {
  TheoremTable t;
  t.family = "width8";
  t.width = 8;
  t.formula = [](int, Variant) -> std::optional<SizeRange> { return std::nullopt; };
  t.exceptions = {{{8, Variant::Plain}, exact(11)}};
  t.source = "computer search result S8,8 = 11";
  return t;
}

Key table_key(const TheoremTable& t, int n, Variant v) {
  return {n, t.width % 2 == 0 ? Variant::Plain : v};
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string cache_key(const StaircaseSpec& spec, int k) {
  return spec.normalized().name() + "/k" + std::to_string(k);
}

bool long_run_case(const StaircaseSpec& s) {
  const auto w = s.normalized();
  if (w.width == 6) return w.length == 8 || w.length == 9;
  if (w.width == 7) return w.length == 7 || w.length == 8;
  if (w.width == 8) return w.length >= 8;
  return w.width > 8;
}

SearchReport report_from_cache(const CacheEntry& e, const PebbleGraph& g) {
  SearchReport r;
  r.graph_id = g.id();
  r.spec = e.spec.normalized();
  r.k = e.k;
  r.lower_bound = e.size;
  r.upper_bound = e.size;
  r.witness = e.witness;
  r.candidates_examined = e.candidates_examined;
  r.pruned_by_weight = e.pruned_by_weight;
  r.exhaustive = true;
  return r;
}

Verdict judge(const std::optional<SizeRange>& expected, bool sharp, const SearchReport& r, int n) {
  const int lo = r.lower_bound;
  const int hi = r.upper_bound.value_or(std::numeric_limits<int>::max());
  if (!expected) return r.exhaustive ? Verdict::Derived : Verdict::Incomplete;
  if (hi < expected->low || lo > expected->high) return Verdict::Mismatch;
  if (sharp && lo > n + 1) return Verdict::Mismatch;
  if (!r.exhaustive) return Verdict::Incomplete;
  if (expected->low == expected->high) return Verdict::Match;
  if (sharp) return lo == n + 1 ? Verdict::Match : Verdict::Mismatch;
  return Verdict::Contained;
}

std::optional<Distribution> seven_to_eight(int n) {
  const auto seven = construct({7, n, Variant::Plain});
  auto wide = widen(seven.placed.spec, seven.placed.dist);
  if (!(wide.spec == StaircaseSpec{8, n, Variant::Plain})) return std::nullopt;
  return wide.dist;
}

int vertex_at(const PebbleGraph& g, int a, int b) {
  auto v = g.find(GridCoord::from_diagonals(a, b));
  if (!v) throw std::logic_error("missing staircase vertex");
  return *v;
}

}  // namespace

const TheoremTable& theorem_table(int width) {
  static const std::vector<TheoremTable> tables = {make_width3(), make_width4(), make_width5(),
                                                   make_width6(), make_width7(), make_width8()};
  if (width < 3 || width > 8) throw std::invalid_argument("no theorem table for width " + std::to_string(width));
  return tables[width - 3];
}

const TheoremTable& theorem_table(const std::string& family) {
  if (family.size() == 6 && family.rfind("width", 0) == 0) return theorem_table(family[5] - '0');
  throw std::invalid_argument("unknown family " + family);
}

SizeRange expected_value(const TheoremTable& table, int n, Variant variant) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const auto key = table_key(table, n, variant);
  if (auto it = table.exceptions.find(key); it != table.exceptions.end()) return it->second;
  if (!table.unspecified.count(key)) {
    if (auto v = table.formula(n, key.second)) return *v;
  }
  throw UnstatedValue(StaircaseSpec{table.width, n, variant}.normalized().name() +
                           " is not stated by the " + table.family + " theorem");
}

bool claimed_sharp(const TheoremTable& table, int n, Variant variant) {
  return table.sharp.count(table_key(table, n, variant)) > 0;
}

WitnessCache WitnessCache::load(const std::string& path) {
  WitnessCache cache(path);
  std::ifstream in(path);
  if (!in) return cache;
  const auto doc = Json::parse(in);
  for (const auto& j : doc.at("entries")) {
    CacheEntry e;
    e.spec = StaircaseSpec::parse(j.at("spec").get<std::string>());
    e.k = j.at("k").get<int>();
    e.size = j.at("size").get<int>();
    e.witness = parse_counts(j.at("witness").get<std::string>());
    e.exhaustive = j.at("exhaustive").get<bool>();
    e.derived = j.value("derived", false);
    e.candidates_examined = j.value("candidates_examined", std::uint64_t{0});
    e.pruned_by_weight = j.value("pruned_by_weight", std::uint64_t{0});
    e.engine_version = j.value("engine_version", std::string{});
    e.timestamp = j.value("timestamp", std::string{});
    const auto g = build_staircase(e.spec.normalized());
    ReachOptions opt;
    opt.localize_above = 16;
    if (e.witness.vertex_count() != g.size() || e.witness.total() != e.size ||
        !is_k_solvable(g, e.witness, e.k, opt).solvable) {
      ++cache.dropped_;
      continue;
    }
    cache.entries_[cache_key(e.spec, e.k)] = std::move(e);
  }
  return cache;
}

void WitnessCache::save() const {
  if (path_.empty()) throw std::logic_error("cache has no file");
  Json doc;
  doc["engine_version"] = kEngineVersion;
  doc["entries"] = Json::array();
  for (const auto& [key, e] : entries_) {
    std::string counts;
    for (int c : e.witness.counts()) counts += (counts.empty() ? "" : ",") + std::to_string(c);
    doc["entries"].push_back({{"spec", e.spec.normalized().name()},
                              {"k", e.k},
                              {"size", e.size},
                              {"witness", counts},
                              {"exhaustive", e.exhaustive},
                              {"derived", e.derived},
                              {"candidates_examined", e.candidates_examined},
                              {"pruned_by_weight", e.pruned_by_weight},
                              {"engine_version", e.engine_version},
                              {"timestamp", e.timestamp}});
  }
  const std::filesystem::path target(path_);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const auto tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << doc.dump(1) << '\n';
    if (!out) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

std::optional<CacheEntry> WitnessCache::find(const StaircaseSpec& spec, int k) const {
  if (auto it = entries_.find(cache_key(spec, k)); it != entries_.end()) return it->second;
  return std::nullopt;
}

void WitnessCache::put(CacheEntry entry) {
  entry.spec = entry.spec.normalized();
  if (entry.engine_version.empty()) entry.engine_version = kEngineVersion;
  if (entry.timestamp.empty()) entry.timestamp = now_utc();
  entries_[cache_key(entry.spec, entry.k)] = std::move(entry);
}

std::vector<CacheEntry> WitnessCache::entries() const {
  std::vector<CacheEntry> out;
  for (const auto& [key, e] : entries_) out.push_back(e);
  return out;
}

WitnessProvider WitnessCache::provider() const {
  auto snapshot = std::make_shared<std::map<std::string, CacheEntry>>(entries_);
  return [snapshot](const StaircaseSpec& spec) -> std::optional<Distribution> {
    auto it = snapshot->find(cache_key(spec, 1));
    if (it == snapshot->end() || !it->second.exhaustive) return std::nullopt;
    return it->second.witness;
  };
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Match: return "match";
    case Verdict::Mismatch: return "mismatch";
    case Verdict::Contained: return "contained";
    case Verdict::Derived: return "derived";
    case Verdict::Incomplete: return "incomplete";
    case Verdict::Skipped: return "skipped";
  }
  return "unknown";
}

bool VerifyReport::any_mismatch() const {
  return std::any_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.verdict == Verdict::Mismatch; });
}

bool VerifyReport::complete() const {
  return std::none_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.verdict == Verdict::Incomplete; });
}

std::optional<Distribution> known_upper_bound(const StaircaseSpec& spec) {
  const auto w = spec.normalized();
  if (w.width >= 3 && w.width <= 6 && w.length > 9) return construct(w).placed.dist;
  if (w.width == 7 && w.length > 8) return construct(w).placed.dist;
  if (w.width == 8 && w.length > 8) return seven_to_eight(w.length);
  return std::nullopt;
}

VerifyReport verify_theorem(const TheoremTable& table, int n_lo, int n_hi,
                            const std::vector<Variant>& variants, const VerifyConfig& config) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("bad length range");
  VerifyReport report;
  report.family = table.family;
  std::vector<Variant> vs = variants;
  if (table.width % 2 == 0) vs = {Variant::Plain};
  for (int n = n_lo; n <= n_hi; ++n) {
    for (Variant v : vs) {
      VerifyRow row;
      row.spec = StaircaseSpec{table.width, n, v}.normalized();
      try {
        row.expected = expected_value(table, n, v);
      } catch (const UnstatedValue&) {
      }
      row.claimed_sharp = claimed_sharp(table, n, v);
      const auto g = build_staircase(row.spec);
      row.search.graph_id = g.id();
      row.search.spec = row.spec;
      row.search.k = config.search.k;

      if (long_run_case(row.spec) && !config.long_profile) {
        row.verdict = Verdict::Skipped;
        row.note = "long profile";
        report.rows.push_back(std::move(row));
        continue;
      }

      std::optional<CacheEntry> hit;
      if (config.cache) hit = config.cache->find(row.spec, config.search.k);
      if (hit && hit->exhaustive) {
        row.search = report_from_cache(*hit, g);
        if (config.revalidate) {
          auto fresh = optimal_pebbling_number(g, config.search);
          if (fresh.exhaustive && fresh.optimal_size() != hit->size) {
            row.verdict = Verdict::Mismatch;
            row.note = "cache holds " + std::to_string(hit->size) + ", search gives " +
                       std::to_string(fresh.optimal_size());
            report.rows.push_back(std::move(row));
            continue;
          }
        }
      } else {
        auto search = config.search;
        if (!search.upper_hint) search.upper_hint = known_upper_bound(row.spec);
        if (!search.checkpoint_path.empty()) {
          search.checkpoint_path += "." + row.spec.name();
        }
        row.search = optimal_pebbling_number(g, search);
        if (config.cache && row.search.exhaustive && row.search.witness) {
          CacheEntry e;
          e.spec = row.spec;
          e.k = config.search.k;
          e.size = row.search.optimal_size();
          e.witness = *row.search.witness;
          e.exhaustive = true;
          e.derived = !row.expected;
          e.candidates_examined = row.search.candidates_examined;
          e.pruned_by_weight = row.search.pruned_by_weight;
          config.cache->put(std::move(e));
        }
      }
      row.verdict = judge(row.expected, row.claimed_sharp, row.search, n);
      if (!row.expected) row.note = "not stated by the theorem";
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("x values must not all coincide");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) fit.residuals.push_back(y[i] - (fit.slope * x[i] + fit.intercept));
  return fit;
}

Placed stacked_seven_wide(int copies, int n) {
  if (copies < 1 || n < 1) throw std::invalid_argument("need at least one copy and one slash");
  const int m = 7 * copies;
  const StaircaseSpec whole = StaircaseSpec{m, n, Variant::Plain}.normalized();
  const auto g = build_staircase(whole);
  const int lo = whole.first_positive_diagonal();
  Distribution d(g.size());
  for (int j = 0; j < copies; ++j) {
    // Strip j (negative diagonals 7j+1..7j+7) is a 7-wide staircase whose
    // window is shifted by `delta` to restore the parity condition.
    const int lo_strip = (lo + j) % 2;
    const int delta = lo_strip - lo;
    const StaircaseSpec part{7, n, lo_strip == 0 ? Variant::Plain : Variant::Prime};
    const auto h = build_staircase(part);
    const auto dist = construct(part).placed.dist;
    for (int v = 0; v < h.size(); ++v) {
      if (dist[v] == 0) continue;
      const auto c = h.coord(v);
      d.add(vertex_at(g, c.negative_diagonal() + 7 * j, c.positive_diagonal() - delta), dist[v]);
    }
  }
  ReachOptions opt;
  opt.localize_above = 16;
  if (!is_k_solvable(g, d, 1, opt).solvable) throw ConstructionError("stacked seven-wide distribution is not solvable");
  return {whole, d};
}

ExperimentReport run_conjecture_experiment(const std::string& id, int n_lo, int n_hi,
                                           const SearchConfig& search, int multiple, bool run_search) {
  if (id != "width7" && id != "width8" && id != "width7k") throw std::invalid_argument("unknown conjecture " + id);
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("bad length range");
  ExperimentReport report;
  report.id = id == "width7k" ? "width7k:" + std::to_string(multiple) : id;

  auto measure = [&](ExperimentRow& row, const Distribution& upper) {
    if (!run_search) return;
    auto cfg = search;
    cfg.upper_hint = upper;
    const auto r = optimal_pebbling_number(build_staircase(row.spec), cfg);
    row.lower = r.lower_bound;
    row.upper = r.upper_bound;
    row.exhaustive = r.exhaustive;
  };

  std::vector<double> xs, ys;
  for (int n = n_lo; n <= n_hi; ++n) {
    if (id == "width7") {
      for (Variant v : {Variant::Plain, Variant::Prime}) {
        if (n % 2 == 0 && v == Variant::Prime) continue;
        ExperimentRow row;
        row.spec = {7, n, v};
        const auto c = construct(row.spec);
        row.construction = c.placed.dist.total();
        measure(row, c.placed.dist);
        report.rows.push_back(row);
      }
    } else if (id == "width8") {
      ExperimentRow row;
      row.spec = {8, n, Variant::Plain};
      const auto d = seven_to_eight(n);
      if (!d) throw std::logic_error("widen produced an unexpected staircase");
      row.construction = d->total();
      measure(row, *d);
      report.rows.push_back(row);
    } else {
      if (multiple < 1) throw std::invalid_argument("multiple must be positive");
      ExperimentRow row;
      const auto p = stacked_seven_wide(multiple, n);
      row.spec = p.spec;
      row.construction = p.dist.total();
      if (multiple == 1) measure(row, p.dist);
      report.rows.push_back(row);
    }
  }
  for (const auto& row : report.rows) {
    xs.push_back(row.spec.length);
    ys.push_back(std::min(row.construction, row.upper.value_or(row.construction)));
  }
  std::set<double> distinct(xs.begin(), xs.end());
  if (distinct.size() >= 2) {
    const auto fit = fit_line(xs, ys);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.residuals = fit.residuals;
  }
  return report;
}

namespace {

struct PoolItem {
  StaircaseSpec spec;
  Distribution dist;
};

// Every solvable distribution with at most n pebbles on a fixed set of small
// staircases, grouped by (spec, size).
const std::vector<std::vector<PoolItem>>& solvable_pool() {
  static const auto pool = [] {
    std::vector<std::vector<PoolItem>> groups;
    std::vector<StaircaseSpec> specs;
    for (int n = 3; n <= 9; ++n) {
      specs.push_back({3, n, Variant::Plain});
      specs.push_back({3, n, Variant::Prime});
    }
    for (int n = 3; n <= 8; ++n) specs.push_back({4, n, Variant::Plain});
    for (int n = 3; n <= 6; ++n) {
      specs.push_back({5, n, Variant::Plain});
      specs.push_back({5, n, Variant::Prime});
    }
    for (int n = 5; n <= 6; ++n) specs.push_back({6, n, Variant::Plain});
    for (const auto& s : specs) {
      const auto g = build_staircase(s);
      for (int t = 1; t <= s.length; ++t) {
        std::vector<PoolItem> group;
        for_each_solvable(g, t, 1, [&](const Distribution& d) { group.push_back({s, d}); });
        if (!group.empty()) groups.push_back(std::move(group));
      }
    }
    return groups;
  }();
  return pool;
}

void record(SuiteResult& r, bool ok, const std::string& what) {
  ++r.samples;
  if (ok) {
    ++r.passed;
  } else if (r.failures.size() < 5) {
    r.failures.push_back(what);
  }
}

std::string describe(const StaircaseSpec& s, const Distribution& d) {
  std::string out = s.name() + " [";
  for (int i = 0; i < d.vertex_count(); ++i) out += (i ? "," : "") + std::to_string(d[i]);
  return out + "]";
}

}  // namespace

SuiteResult lemma_suite(unsigned seed, int samples) {
  SuiteResult result;
  result.name = "lemma suite";
  const auto& pool = solvable_pool();
  std::vector<const std::vector<PoolItem>*> small;
  for (const auto& group : pool) {
    if (group.front().dist.total() < group.front().spec.length - 1) small.push_back(&group);
  }
  std::mt19937 rng(seed);
  for (int i = 0; i < samples; ++i) {
    // Alternate between the whole pool and the part small enough for the
    // cut lemmas so both hypotheses are exercised.
    const auto& group = i % 2 == 0 ? pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]
                                   : *small[std::uniform_int_distribution<std::size_t>(0, small.size() - 1)(rng)];
    const auto& item = group[std::uniform_int_distribution<std::size_t>(0, group.size() - 1)(rng)];
    const auto g = build_staircase(item.spec);
    const int n = item.spec.length;
    bool ok = static_cast<int>(two_reachable_slashes(g, item.dist).size()) < n;
    if (ok && item.dist.total() < n - 1) {
      try {
        const auto cert = decompose_and_bound(g, item.dist);
        const auto split = split_at_cut(g, item.dist, cert.inner_slash, cert.side);
        ok = cert.inner_slash > 1 && cert.inner_slash < n &&
             split.left_dist.total() + split.right_dist.total() == item.dist.total() &&
             is_k_solvable(split.left_graph, split.left_dist).solvable &&
             is_k_solvable(split.right_graph, split.right_dist).solvable;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    record(result, ok, describe(item.spec, item.dist));
  }
  return result;
}

SuiteResult collapse_suite(unsigned seed, int samples) {
  SuiteResult result;
  result.name = "collapse suite";
  std::mt19937 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int i = 0; i < samples; ++i) {
    const int m = uniform(0, 1) ? 7 : uniform(3, 6);
    const int n = uniform(2, 6);
    const StaircaseSpec spec{m, n, uniform(0, 1) ? Variant::Prime : Variant::Plain};
    const auto g = build_staircase(spec);
    Distribution d(g.size());
    const int pebbles = uniform(2, 8);
    for (int p = 0; p < pebbles; ++p) d.add(uniform(0, g.size() - 1), 1);
    std::set<int> targets;
    const int count = uniform(1, 3);
    while (static_cast<int>(targets.size()) < count) targets.insert(uniform(0, g.size() - 1));
    const int k = uniform(1, 2);
    const ReachQuery q{{targets.begin(), targets.end()}, k};
    const bool source = is_k_reachable(g, d, q).reachable;

    std::vector<QuotientMap> maps{slash_to_path_map(g)};
    if (m == 7) maps.push_back(merge_negative_diagonals_7to6(g));
    bool ok = true;
    for (const auto& phi : maps) {
      std::set<int> image;
      for (int t : targets) image.insert(phi(t));
      const bool target = is_k_reachable(phi.target(), collapse(phi, d), {{image.begin(), image.end()}, k}).reachable;
      if (source && !target) ok = false;
    }
    record(result, ok, describe(spec, d));
  }
  return result;
}

}  // namespace pebbling
