// Command-line front end: graph generation, searches, reachability queries,
// constructions, collapses, theorem verification and conjecture experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pebbling/constructions.hpp"
#include "pebbling/harness.hpp"
#include "pebbling/io.hpp"
#include "pebbling/pebble.hpp"
#include "pebbling/search.hpp"

using namespace pebbling;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

// Per-search budget of the default profile when --budget-seconds is not given.
constexpr double kDefaultVerifyBudget = 600;

struct Globals {
  int k = 1;
  double budget_seconds = 0;
  int threads = 1;
  std::string checkpoint;
  std::string cache;
  std::string format = "text";
  unsigned seed = 1;
  std::string profile = "default";
};

struct GraphArgs {
  std::string spec;
  std::string grid;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_graph_options(CLI::App* cmd, GraphArgs& args) {
  auto* s = cmd->add_option("--spec", args.spec, "staircase, e.g. S3,7 or S'7,11");
  auto* g = cmd->add_option("--grid", args.grid, "grid window ROWSxCOLS");
  s->excludes(g);
}

std::pair<int, int> grid_shape(const std::string& text) {
  int rows = 0, cols = 0;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> rows >> x >> cols) || x != 'x' || rows < 1 || cols < 1) throw UsageError("bad --grid " + text);
  return {rows, cols};
}

PebbleGraph graph_of(const GraphArgs& args) {
  if (!args.spec.empty()) return build_staircase(StaircaseSpec::parse(args.spec));
  if (!args.grid.empty()) {
    const auto [rows, cols] = grid_shape(args.grid);
    return build_grid_window(rows, cols);
  }
  throw UsageError("one of --spec or --grid is required");
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("bad range " + text);
  }
}

SearchConfig search_config(const Globals& g) {
  SearchConfig c;
  c.k = g.k;
  c.threads = g.threads;
  c.budget_seconds = g.budget_seconds;
  c.checkpoint_path = g.checkpoint;
  return c;
}

std::string counts_text(const Distribution& d) {
  std::string out;
  for (int v = 0; v < d.vertex_count(); ++v) out += (v ? "," : "") + std::to_string(d[v]);
  return out;
}

void print_distribution(const Globals& opt, const PebbleGraph& g, const Distribution& d) {
  if (opt.format == "json") {
    std::cout << to_json(g, d).dump(2) << '\n';
  } else if (opt.format == "dot") {
    std::cout << to_dot(g, &d);
  } else {
    std::cout << g.id() << " size " << d.total() << "\ncounts " << counts_text(d) << '\n';
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::optional<WitnessCache> open_cache(const Globals& opt) {
  if (opt.cache.empty()) return std::nullopt;
  auto cache = WitnessCache::load(opt.cache);
  if (cache.dropped_on_load() > 0) {
    std::cerr << "cache: dropped " << cache.dropped_on_load() << " entries that failed re-verification\n";
  }
  set_witness_provider(cache.provider());
  return cache;
}

int cmd_gen(const Globals& opt, const GraphArgs& args) {
  const auto g = graph_of(args);
  if (opt.format == "json") {
    std::cout << to_json(g).dump(2) << '\n';
  } else if (opt.format == "dot") {
    std::cout << to_dot(g);
  } else {
    std::cout << g.id() << ": " << g.size() << " vertices, " << g.edge_count() << " edges, " << g.slash_count()
              << " slashes\n";
    for (int v = 0; v < g.size(); ++v) {
      std::cout << "  " << v << " (" << g.coord(v).x << "," << g.coord(v).y << ") slash " << g.slash(v) << '\n';
    }
  }
  return kExitOk;
}

int cmd_optimal(const Globals& opt, const GraphArgs& args) {
  const auto g = graph_of(args);
  auto cache = open_cache(opt);
  SearchReport report;
  std::optional<CacheEntry> hit;
  if (cache && g.provenance()) hit = cache->find(*g.provenance(), opt.k);
  if (hit && hit->exhaustive) {
    report.graph_id = g.id();
    report.spec = g.provenance();
    report.k = opt.k;
    report.lower_bound = report.upper_bound.emplace(hit->size);
    report.witness = hit->witness;
    report.candidates_examined = hit->candidates_examined;
    report.pruned_by_weight = hit->pruned_by_weight;
    report.exhaustive = true;
  } else {
    auto cfg = search_config(opt);
    if (g.provenance() && opt.k == 1) cfg.upper_hint = known_upper_bound(*g.provenance());
    report = optimal_pebbling_number(g, cfg);
    if (cache && g.provenance() && report.exhaustive && report.witness) {
      CacheEntry e;
      e.spec = *g.provenance();
      e.k = opt.k;
      e.size = report.optimal_size();
      e.witness = *report.witness;
      e.exhaustive = true;
      e.candidates_examined = report.candidates_examined;
      e.pruned_by_weight = report.pruned_by_weight;
      const auto w = e.spec.normalized();
      if (w.width >= 3 && w.width <= 8) {
        try {
          expected_value(theorem_table(w.width), w.length, w.variant);
        } catch (const UnstatedValue&) {
          e.derived = true;
        }
      } else {
        e.derived = true;
      }
      cache->put(std::move(e));
      cache->save();
    }
  }
  if (opt.format == "json") {
    std::cout << to_json(report).dump(2) << '\n';
  } else {
    if (report.exhaustive) {
      std::cout << report.graph_id << " k=" << report.k << " optimal " << report.optimal_size() << '\n';
    } else {
      std::cout << report.graph_id << " k=" << report.k << " interval [" << report.lower_bound << ", "
                << (report.upper_bound ? std::to_string(*report.upper_bound) : "?") << "]\n";
    }
    if (report.witness) std::cout << "witness " << counts_text(*report.witness) << '\n';
    std::cout << "candidates " << report.candidates_examined << ", pruned " << report.pruned_by_weight << ", "
              << report.elapsed.count() << " ms\n";
    if (opt.format == "dot" && report.witness) std::cout << to_dot(g, &*report.witness);
  }
  return report.exhaustive ? kExitOk : kExitBudget;
}

PlacedGraph load_distribution(const GraphArgs& args, const std::string& counts, const std::string& file) {
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot read " + file);
    return distribution_from_json(Json::parse(in));
  }
  auto g = graph_of(args);
  auto d = parse_counts(counts);
  if (d.vertex_count() != g.size()) {
    throw UsageError("--dist has " + std::to_string(d.vertex_count()) + " counts, graph has " +
                     std::to_string(g.size()) + " vertices");
  }
  return {std::move(g), std::move(d)};
}

int cmd_reach(const Globals& opt, const GraphArgs& args, const std::string& counts, const std::string& file,
              const std::vector<int>& targets, int slash, bool witness) {
  const auto [g, d] = load_distribution(args, counts, file);
  ReachOptions ro;
  ro.want_witness = witness;
  Json out;
  bool yes = false;
  if (targets.empty() && slash == 0) {
    const auto r = is_k_solvable(g, d, opt.k, ro);
    yes = r.solvable;
    out = {{"graph", g.id()}, {"k", opt.k}, {"query", "solvable"}, {"result", yes}};
    out["failing_vertex"] = r.failing_vertex ? Json(*r.failing_vertex) : Json(nullptr);
    if (opt.format != "json") {
      std::cout << (yes ? "solvable" : "not solvable");
      if (r.failing_vertex) {
        const auto c = g.coord(*r.failing_vertex);
        std::cout << "; vertex " << *r.failing_vertex << " (" << c.x << "," << c.y << ") is not " << opt.k
                  << "-reachable";
      }
      std::cout << '\n';
    }
  } else {
    ReachQuery q{targets, opt.k};
    if (slash != 0) {
      if (slash < 1 || slash > g.slash_count()) throw UsageError("no slash " + std::to_string(slash));
      q.targets = g.slash_vertices(slash);
    }
    q.validate(g);
    const auto r = is_k_reachable(g, d, q, ro);
    yes = r.reachable;
    out = {{"graph", g.id()}, {"k", opt.k}, {"targets", q.targets}, {"result", yes}};
    if (witness && yes) out["witness"] = moves_json(r.witness);
    if (opt.format != "json") {
      std::cout << (yes ? "reachable" : "not reachable") << '\n';
      if (witness && yes) {
        for (const auto& m : r.witness) std::cout << "  " << m.from << " -> " << m.to << '\n';
      }
    }
  }
  if (opt.format == "json") std::cout << out.dump(2) << '\n';
  return yes ? kExitOk : kExitMismatch;
}

int cmd_construct(const Globals& opt, const GraphArgs& args, const std::string& widen_from) {
  auto cache = open_cache(opt);
  if (!widen_from.empty()) {
    const auto base = StaircaseSpec::parse(widen_from).normalized();
    const auto c = construct(base);
    const auto wide = widen(c.placed.spec, c.placed.dist);
    if (opt.format == "text") std::cout << "widened from " << base.name() << " (" << c.placed.dist.total() << ")\n";
    print_distribution(opt, build_staircase(wide.spec), wide.dist);
    return kExitOk;
  }
  if (!args.grid.empty()) {
    const auto [rows, cols] = grid_shape(args.grid);
    print_distribution(opt, build_grid_window(rows, cols), grid_seven_diagonal(rows, cols));
    return kExitOk;
  }
  if (args.spec.empty()) throw UsageError("one of --spec, --grid or --widen-from is required");
  const auto c = construct(StaircaseSpec::parse(args.spec));
  if (opt.format == "text") {
    std::cout << "family " << to_string(c.plan.family) << ", expected size [" << c.plan.expected_size.low << ", "
              << c.plan.expected_size.high << "]\n";
  }
  print_distribution(opt, build_staircase(c.placed.spec), c.placed.dist);
  return kExitOk;
}

int cmd_collapse(const Globals& opt, const GraphArgs& args, const std::string& counts, const std::string& file,
                 const std::string& map) {
  const auto [g, d] = load_distribution(args, counts, file);
  const auto phi = map == "slash" ? slash_to_path_map(g) : merge_negative_diagonals_7to6(g);
  const auto image = collapse(phi, d);
  if (opt.format == "text") {
    std::cout << "assignment";
    for (int v : phi.assignment()) std::cout << ' ' << v;
    std::cout << '\n';
  }
  print_distribution(opt, phi.target(), image);
  return kExitOk;
}

int cmd_verify(const Globals& opt, const std::string& family, const std::string& range, const std::string& variant,
               const std::string& report_path, bool revalidate) {
  const auto& table = theorem_table(family);
  const auto [lo, hi] = parse_range(range);
  std::vector<Variant> variants;
  if (variant == "both") {
    variants = {Variant::Plain, Variant::Prime};
  } else {
    variants = {variant_from_string(variant)};
  }
  auto cache = open_cache(opt);
  VerifyConfig cfg;
  cfg.search = search_config(opt);
  cfg.long_profile = opt.profile == "long";
  if (cfg.search.budget_seconds == 0 && !cfg.long_profile) cfg.search.budget_seconds = kDefaultVerifyBudget;
  cfg.cache = cache ? &*cache : nullptr;
  cfg.revalidate = revalidate;
  const auto report = verify_theorem(table, lo, hi, variants, cfg);
  if (cache) cache->save();
  const auto json = to_json(report).dump(2);
  const auto md = verify_markdown(report);
  if (!report_path.empty()) {
    write_file(report_path + ".md", md);
    write_file(report_path + ".json", json + "\n");
  }
  std::cout << (opt.format == "json" ? json + "\n" : md);
  if (report.any_mismatch()) {
    std::cerr << "verify: mismatch against the " << table.family << " theorem\n";
    return kExitMismatch;
  }
  return report.complete() ? kExitOk : kExitBudget;
}

int cmd_experiment(const Globals& opt, const std::string& id, const std::string& range, int multiple, int samples,
                   bool no_search, const std::string& report_path) {
  Json json;
  std::string md;
  bool ok = true;
  if (id == "lemmas" || id == "collapse") {
    const auto r = id == "lemmas" ? lemma_suite(opt.seed, samples) : collapse_suite(opt.seed, samples);
    json = to_json(r);
    json["seed"] = opt.seed;
    md = r.name + ": " + std::to_string(r.passed) + "/" + std::to_string(r.samples) + " (seed " +
         std::to_string(opt.seed) + ")\n";
    for (const auto& f : r.failures) md += "  failed: " + f + "\n";
    ok = r.ok();
  } else {
    const auto [lo, hi] = parse_range(range);
    auto cfg = search_config(opt);
    if (cfg.budget_seconds == 0 && opt.profile != "long") cfg.budget_seconds = 60;
    const auto r = run_conjecture_experiment(id, lo, hi, cfg, multiple, !no_search);
    json = to_json(r);
    md = experiment_markdown(r);
  }
  if (!report_path.empty()) {
    write_file(report_path + ".md", md);
    write_file(report_path + ".json", json.dump(2) + "\n");
  }
  std::cout << (opt.format == "json" ? json.dump(2) + "\n" : md);
  return ok ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact optimal pebbling on staircase graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals opt;
  app.add_option("--k", opt.k, "pebbles required on each target")->check(CLI::PositiveNumber);
  app.add_option("--budget-seconds", opt.budget_seconds, "wall-clock budget per search (0: unlimited)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--threads", opt.threads, "search worker threads")->check(CLI::PositiveNumber);
  app.add_option("--checkpoint", opt.checkpoint, "checkpoint file for resumable searches");
  app.add_option("--cache", opt.cache, "witness cache file");
  app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"json", "dot", "text"}));
  app.add_option("--seed", opt.seed, "seed for randomized suites");
  app.add_option("--profile", opt.profile, "default or long")->check(CLI::IsMember({"default", "long"}));

  GraphArgs graph;
  std::string counts, dist_file, widen_from, map = "slash", family, range = "1..8", variant = "both", report;
  std::string conjecture;
  std::vector<int> targets;
  int slash = 0, multiple = 1, samples = 200;
  bool witness = false, revalidate = false, no_search = false;

  auto* gen = app.add_subcommand("gen", "emit a graph");
  add_graph_options(gen, graph);

  auto* optimal = app.add_subcommand("optimal", "compute the (k-)optimal pebbling number");
  add_graph_options(optimal, graph);

  auto* reach = app.add_subcommand("reach", "decide reachability or solvability");
  add_graph_options(reach, graph);
  reach->add_option("--dist", counts, "pebble counts in vertex order, comma separated");
  reach->add_option("--dist-file", dist_file, "distribution JSON");
  reach->add_option("--target", targets, "target vertex (repeatable)");
  reach->add_option("--slash", slash, "target slash");
  reach->add_flag("--witness", witness, "print a move sequence");

  auto* cons = app.add_subcommand("construct", "emit a verified construction");
  add_graph_options(cons, graph);
  cons->add_option("--widen-from", widen_from, "widen the construction of this staircase");

  auto* col = app.add_subcommand("collapse", "apply a quotient map");
  add_graph_options(col, graph);
  col->add_option("--dist", counts, "pebble counts in vertex order");
  col->add_option("--dist-file", dist_file, "distribution JSON");
  col->add_option("--map", map, "slash or 7to6")->check(CLI::IsMember({"slash", "7to6"}));

  auto* ver = app.add_subcommand("verify", "check a width theorem against search");
  ver->add_option("--family", family, "width3 .. width8")->required();
  ver->add_option("--n", range, "length or range a..b");
  ver->add_option("--variant", variant, "plain, prime or both")->check(CLI::IsMember({"plain", "prime", "both"}));
  ver->add_option("--report", report, "write <path>.md and <path>.json");
  ver->add_flag("--revalidate", revalidate, "re-run searches behind cache hits");

  auto* exp = app.add_subcommand("experiment", "measure a conjecture or run a property suite");
  exp->add_option("--conjecture", conjecture, "width7, width8, width7k, lemmas or collapse")
      ->required()
      ->check(CLI::IsMember({"width7", "width8", "width7k", "lemmas", "collapse"}));
  exp->add_option("--n", range, "length or range a..b");
  exp->add_option("--multiple", multiple, "number of 7-wide strips for width7k")->check(CLI::PositiveNumber);
  exp->add_option("--samples", samples, "samples for property suites")->check(CLI::PositiveNumber);
  exp->add_flag("--no-search", no_search, "constructions only");
  exp->add_option("--report", report, "write <path>.md and <path>.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(opt, graph);
    if (*optimal) return cmd_optimal(opt, graph);
    if (*reach) return cmd_reach(opt, graph, counts, dist_file, targets, slash, witness);
    if (*cons) return cmd_construct(opt, graph, widen_from);
    if (*col) return cmd_collapse(opt, graph, counts, dist_file, map);
    if (*ver) return cmd_verify(opt, family, range, variant, report, revalidate);
    if (*exp) return cmd_experiment(opt, conjecture, range, multiple, samples, no_search, report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
