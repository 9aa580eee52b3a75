// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "naive_oracle.hpp"
#include "pebbling/constructions.hpp"
#include "pebbling/harness.hpp"
#include "pebbling/io.hpp"
#include "pebbling/search.hpp"

using namespace pebbling;

namespace {

// Wall-clock limits (seconds) per criterion, from the targets in the criteria.
constexpr double kLimitWidth3 = 300;
constexpr double kLimitWidth4 = 600;
constexpr double kLimitWidth5 = 1800;
constexpr double kLimitWidth6 = 3600;
constexpr int kOracleSamples = 500;
constexpr int kLemmaSamples = 200;
constexpr int kCollapseSamples = 200;
constexpr unsigned kSeed = 20240611;
constexpr int kConstructionMaxLength = 40;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

VerifyConfig long_config() {
  VerifyConfig cfg;
  cfg.search.threads = threads();
  cfg.long_profile = true;
  return cfg;
}

// Every row must carry the given verdict.
void expect_rows(Outcome& out, const VerifyReport& r, Verdict want) {
  for (const auto& row : r.rows) {
    if (row.verdict != want) {
      out.fail(row.spec.name() + " " + to_string(row.verdict) + " (computed " +
               std::to_string(row.search.lower_bound) + ".." +
               (row.search.upper_bound ? std::to_string(*row.search.upper_bound) : "?") + ")");
    }
  }
}

std::string values(const VerifyReport& r) {
  std::string s;
  for (const auto& row : r.rows) {
    s += (s.empty() ? "" : " ") + row.spec.name() + "=" +
         (row.search.exhaustive ? std::to_string(row.search.optimal_size()) : "?");
  }
  return s;
}

Outcome width_theorem(int width, int lo, int hi, double limit) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = verify_theorem(theorem_table(width), lo, hi, {Variant::Plain, Variant::Prime}, long_config());
  expect_rows(out, r, Verdict::Match);
  const double secs = seconds_since(t0);
  if (secs > limit) out.fail("took " + std::to_string(secs) + " s");
  out.note(values(r));
  return out;
}

Outcome criterion3() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto main = verify_theorem(theorem_table(5), 3, 6, {Variant::Plain, Variant::Prime}, long_config());
  expect_rows(out, main, Verdict::Match);
  const auto seven = verify_theorem(theorem_table(5), 7, 7, {Variant::Plain, Variant::Prime}, long_config());
  for (const auto& row : seven.rows) {
    const Verdict want = row.spec.variant == Variant::Prime ? Verdict::Match : Verdict::Derived;
    if (row.verdict != want) out.fail(row.spec.name() + " " + to_string(row.verdict));
  }
  if (seconds_since(t0) > kLimitWidth5) out.fail("over time");
  out.note(values(main) + " " + values(seven) + " (S5,7 derived)");
  return out;
}

Outcome criterion4() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = verify_theorem(theorem_table(6), 3, 9, {Variant::Plain}, long_config());
  expect_rows(out, r, Verdict::Match);
  if (seconds_since(t0) > kLimitWidth6) out.fail("over time");
  out.note(values(r));

  // Interrupt S6,9 early, then resume from the checkpoint.
  const auto path = (std::filesystem::temp_directory_path() / "pebbling_acceptance_s69.ckpt").string();
  std::filesystem::remove(path);
  const auto g = build_staircase({6, 9});
  SearchConfig cfg;
  cfg.threads = threads();
  cfg.checkpoint_path = path;
  cfg.budget_seconds = 0.2;
  const auto first = optimal_pebbling_number(g, cfg);
  cfg.budget_seconds = 0;
  const auto second = optimal_pebbling_number(g, cfg);
  if (first.exhaustive) {
    out.note("S6,9 finished inside 0.2 s, resume not exercised");
  } else if (!second.resumed) {
    out.fail("S6,9 did not resume from its checkpoint");
  }
  if (!second.exhaustive || second.optimal_size() != 10) out.fail("resumed S6,9 did not settle at 10");
  out.note("S6,9 resumed from [" + std::to_string(first.lower_bound) + ", ?] to " +
           std::to_string(second.optimal_size()));
  std::filesystem::remove(path);
  return out;
}

Outcome criterion5() {
  Outcome out;
  const auto cfg = long_config();
  ReachOptions ro;
  ro.localize_above = 16;
  for (int n : {5, 6}) {
    const auto r = optimal_pebbling_number(build_staircase({7, n}), cfg.search);
    if (!r.exhaustive || r.optimal_size() != n + 1) out.fail("S7," + std::to_string(n) + " not closed at n+1");
  }
  for (int n : {7, 8}) {
    for (Variant v : {Variant::Plain, Variant::Prime}) {
      const StaircaseSpec spec{7, n, v};
      const auto g = build_staircase(spec);
      const auto r = optimal_pebbling_number(g, cfg.search);
      const bool verified = r.witness && is_k_solvable(g, *r.witness, 1, ro).solvable;
      if (!r.exhaustive || !verified) {
        out.fail(spec.name() + " unsettled");
        continue;
      }
      if (r.optimal_size() < n + 1 || r.optimal_size() > n + 3) out.fail(spec.name() + " outside [n+1, n+3]");
      if (r.optimal_size() != n + 1) {
        out.fail("no witness of size " + std::to_string(n + 1) + " on " + spec.name() + ": exhaustive search gives " +
                 std::to_string(r.optimal_size()));
      }
    }
  }
  const auto c = construct({7, 7, Variant::Prime});
  if (c.placed.dist.total() != 8) out.fail("S'7,7 construction has " + std::to_string(c.placed.dist.total()));
  out.note("S7,5=6, S7,6=7 exhaustive; S'7,7 construction 8");
  return out;
}

Outcome criterion6() {
  Outcome out;
  const auto g = build_staircase({8, 8});
  SearchConfig cfg;
  cfg.threads = threads();
  const auto r = optimal_pebbling_number(g, cfg);
  if (!r.witness || r.witness->total() != 11 || !is_k_solvable(g, *r.witness).solvable) {
    out.fail("no verified witness of size 11");
  }
  if (r.exhaustive) {
    if (r.optimal_size() != 11) out.fail("exhaustive value " + std::to_string(r.optimal_size()));
    out.note("exhaustive: size 10 refuted, " + std::to_string(r.candidates_examined) + " candidates");
  } else {
    out.note("interval [" + std::to_string(r.lower_bound) + ", 11]");
  }
  return out;
}

Outcome criterion7() {
  Outcome out;
  int witnesses = 0;
  for (int n = 2; n <= 10; ++n) {
    const auto r = k_optimal_size_path(n, 2);
    if (r.size != n + 1) out.fail("P" + std::to_string(n) + " 2-optimal size " + std::to_string(r.size));
    const auto path = build_grid_window(1, n);
    for (const auto& w : r.witnesses) {
      ++witnesses;
      if (!prime_segment_decomposition(w.counts()).conforms) out.fail("witness on P" + std::to_string(n) + " not prime");
      for (int v = 0; v < n; ++v) {
        if (is_k_reachable(path, w, {{v}, 5}).reachable) out.fail("5-reachable vertex on P" + std::to_string(n));
      }
    }
  }
  out.note(std::to_string(witnesses) + " minimal witnesses checked");
  return out;
}

naive::Adjacency adjacency(const PebbleGraph& g) {
  naive::Adjacency adj(g.size());
  for (int v = 0; v < g.size(); ++v) {
    for (int u : g.neighbors(v)) adj[v].push_back(u);
  }
  return adj;
}

Outcome criterion8() {
  Outcome out;
  std::mt19937 rng(kSeed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int agree = 0;
  int positive = 0;
  for (int i = 0; i < kOracleSamples; ++i) {
    const int size = uniform(2, 12);
    std::set<GridCoord> cells;
    while (static_cast<int>(cells.size()) < size) cells.insert({uniform(0, 4), uniform(0, 4)});
    const PebbleGraph g({cells.begin(), cells.end()});
    naive::Counts counts(g.size(), 0);
    const int pebbles = uniform(0, 8);
    for (int p = 0; p < pebbles; ++p) ++counts[uniform(0, g.size() - 1)];
    std::set<int> targets;
    const int count = uniform(1, 2);
    while (static_cast<int>(targets.size()) < count) targets.insert(uniform(0, g.size() - 1));
    const int k = uniform(1, 3);
    const std::vector<int> t(targets.begin(), targets.end());
    const bool fast = is_k_reachable(g, Distribution(counts), {t, k}).reachable;
    const bool slow = naive::reachable(adjacency(g), counts, t, k);
    agree += fast == slow;
    positive += slow;
  }
  if (agree != kOracleSamples) out.fail(std::to_string(kOracleSamples - agree) + " disagreements");
  out.note(std::to_string(agree) + "/" + std::to_string(kOracleSamples) + " agree (" + std::to_string(positive) +
           " reachable)");
  return out;
}

Outcome suite(const SuiteResult& r) {
  Outcome out;
  if (!r.ok()) out.fail(r.failures.empty() ? "no samples" : "first failure " + r.failures.front());
  out.note(std::to_string(r.passed) + "/" + std::to_string(r.samples));
  return out;
}

Outcome criterion11() {
  Outcome out;
  int checked = 0;
  ReachOptions ro;
  ro.localize_above = 16;
  for (int m = 3; m <= 7; ++m) {
    for (int n = 1; n <= kConstructionMaxLength; ++n) {
      for (Variant v : {Variant::Plain, Variant::Prime}) {
        const StaircaseSpec spec = StaircaseSpec{m, n, v}.normalized();
        if (!(spec == StaircaseSpec{m, n, v})) continue;
        const auto c = construct(spec);
        const auto g = build_staircase(spec);
        const int size = c.placed.dist.total();
        ++checked;
        if (!is_k_solvable(g, c.placed.dist, 1, ro).solvable) out.fail(spec.name() + " construction not solvable");
        try {
          const auto want = expected_value(theorem_table(m), n, v);
          if (!want.contains(size)) out.fail(spec.name() + " construction has " + std::to_string(size));
        } catch (const UnstatedValue&) {
        }
      }
    }
  }
  // Widen every optimal base witness; widen() re-verifies its output.
  int widened = 0;
  for (int m = 3; m <= 7; ++m) {
    for (int n = 1; n <= 8; ++n) {
      for (Variant v : {Variant::Plain, Variant::Prime}) {
        const StaircaseSpec spec = StaircaseSpec{m, n, v}.normalized();
        if (!(spec == StaircaseSpec{m, n, v})) continue;
        try {
          widen(spec, base_witness(spec));
          ++widened;
        } catch (const std::exception& e) {
          out.fail("widen " + spec.name() + ": " + e.what());
        }
      }
    }
  }
  const auto cache = WitnessCache::load(PEBBLE_CACHE_FILE);
  int cached = 0;
  for (const auto& e : cache.entries()) {
    if (e.k != 1 || !e.exhaustive || e.spec.width > 7) continue;
    try {
      widen(e.spec, e.witness);
      ++cached;
    } catch (const std::exception& ex) {
      out.fail("widen cached " + e.spec.name() + ": " + ex.what());
    }
  }
  if (cached == 0) out.fail("no cached optima in " + std::string(PEBBLE_CACHE_FILE));
  out.note(std::to_string(checked) + " constructions, " + std::to_string(widened) + " widened base optima, " +
           std::to_string(cached) + " widened cached optima");
  return out;
}

std::string run_cli(const std::string& args, int& status) {
  const std::string cmd = std::string(PEBBLE_CLI) + " " + args;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw std::runtime_error("cannot run " + cmd);
  std::string output;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) output.append(buf.data(), got);
  status = pclose(pipe.release());
  return output;
}

Outcome criterion12() {
  Outcome out;
  for (const std::string family : {"width4 --n 1..8", "width5 --n 1..7", "width7 --n 5..6"}) {
    int s1 = 0, s8 = 0;
    const auto a = run_cli("verify --format json --threads 1 --family " + family, s1);
    const auto b = run_cli("verify --format json --threads 8 --family " + family, s8);
    if (a.empty() || a != b) out.fail(family + " reports differ");
    if (s1 != 0 || s8 != 0) out.fail(family + " exit status " + std::to_string(s1) + "/" + std::to_string(s8));
  }
  out.note("verify JSON identical for --threads 1 and 8");
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "width-3 theorem, n = 2..10", [] { return width_theorem(3, 2, 10, kLimitWidth3); }},
      {2, "width-4 theorem, n = 1..8", [] { return width_theorem(4, 1, 8, kLimitWidth4); }},
      {3, "width-5 theorem", criterion3},
      {4, "width-6 theorem, n = 3..9", criterion4},
      {5, "width-7 theorem", criterion5},
      {6, "S8,8 = 11", criterion6},
      {7, "2-optimal paths and prime segments", criterion7},
      {8, "oracle equivalence", criterion8},
      {9, "lemma suite", [] { return suite(lemma_suite(kSeed, kLemmaSamples)); }},
      {10, "collapsing", [] { return suite(collapse_suite(kSeed, kCollapseSamples)); }},
      {11, "constructions", criterion11},
      {12, "determinism across thread counts", criterion12},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1fs", seconds_since(t0));
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << secs
              << "): " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
