#include "pebbling/pebble.hpp"

#include <gtest/gtest.h>

#include <random>

#include "naive_oracle.hpp"

namespace pebbling {
namespace {

PebbleGraph path(int n) { return build_grid_window(1, n); }

naive::Adjacency adjacency(const PebbleGraph& g) {
  naive::Adjacency adj(g.size());
  for (int v = 0; v < g.size(); ++v) adj[v].assign(g.neighbors(v).begin(), g.neighbors(v).end());
  return adj;
}

TEST(ApplyMove, Definition) {
  auto p2 = path(2);
  auto d = apply_move(p2, Distribution({2, 0}), {0, 1});
  EXPECT_EQ(d, Distribution({0, 1}));

  auto p3 = path(3);
  Distribution e({4, 0, 0});
  e = apply_move(p3, e, {0, 1});
  e = apply_move(p3, e, {0, 1});
  e = apply_move(p3, e, {1, 2});
  EXPECT_EQ(e, Distribution({0, 0, 1}));
  EXPECT_EQ(e.total(), 1);
}

TEST(ApplyMove, Errors) {
  auto p3 = path(3);
  EXPECT_THROW(apply_move(p3, Distribution({1, 0, 0}), {0, 1}), PebblingError);
  EXPECT_THROW(apply_move(p3, Distribution({2, 0, 0}), {0, 2}), PebblingError);
}

TEST(WeightBound, Values) {
  auto p3 = path(3);
  auto one = weight_bound(p3, Distribution({1, 0, 0}), 0);
  EXPECT_EQ(one, (DyadicRational{1, 0}));
  auto four_far = weight_bound(p3, Distribution({4, 0, 0}), 2);
  EXPECT_EQ(four_far, (DyadicRational{1, 0}));

  auto p2 = path(2);
  Distribution three({3, 0});
  auto w = weight_bound(p2, three, 1);
  EXPECT_EQ(w, (DyadicRational{3, 1}));
  // The bound is 3/2 but only one pebble can be delivered.
  EXPECT_TRUE(is_k_reachable(p2, three, {{1}, 1}).reachable);
  EXPECT_FALSE(is_k_reachable(p2, three, {{1}, 2}).reachable);
  EXPECT_EQ(naive::max_on_set(adjacency(p2), {3, 0}, {1}), 1);
}

TEST(WeightBound, DisconnectedContributesNothing) {
  auto g = build_staircase({3, 1, Variant::Prime});
  auto w = weight_bound(g, Distribution({5, 0}), 1);
  EXPECT_EQ(w.numerator, 0u);
}

TEST(WeightBound, NeverIncreasesUnderMoves) {
  std::mt19937 rng(11);
  auto g = build_staircase({5, 5, Variant::Plain});
  for (int trial = 0; trial < 200; ++trial) {
    Distribution d(g.size());
    for (int i = 0; i < 8; ++i) d.add(static_cast<int>(rng() % g.size()), 1);
    std::vector<Move> moves;
    for (int u = 0; u < g.size(); ++u) {
      if (d[u] >= 2) {
        for (int v : g.neighbors(u)) moves.push_back({u, v});
      }
    }
    if (moves.empty()) continue;
    auto m = moves[rng() % moves.size()];
    auto next = apply_move(g, d, m);
    const int t = static_cast<int>(rng() % g.size());
    EXPECT_LE(weight_bound(g, next, t).value(), weight_bound(g, d, t).value());
  }
}

TEST(Reachability, Examples) {
  auto s32 = build_staircase({3, 2, Variant::Plain});
  Distribution ones(std::vector<int>(s32.size(), 1));
  for (int t = 0; t < s32.size(); ++t) EXPECT_TRUE(is_k_reachable(s32, ones, {{t}, 1}).reachable);

  auto p3 = path(3);
  EXPECT_TRUE(is_k_reachable(p3, Distribution({0, 4, 0}), {{0}, 2}).reachable);
  EXPECT_FALSE(is_k_reachable(p3, Distribution({0, 3, 0}), {{0}, 2}).reachable);
}

TEST(Reachability, WitnessReplays) {
  auto g = build_staircase({4, 4, Variant::Plain});
  Distribution d(g.size());
  d.set(2, 4);
  d.set(7, 1);
  ReachOptions opt;
  opt.want_witness = true;
  for (int t = 0; t < g.size(); ++t) {
    auto r = is_k_reachable(g, d, {{t}, 1}, opt);
    if (!r.reachable) continue;
    auto end = replay(g, d, r.witness);
    EXPECT_GE(end[t], 1);
    EXPECT_LE(static_cast<int>(r.witness.size()), d.total());
  }
}

TEST(Reachability, QueryValidation) {
  auto g = path(3);
  Distribution d({1, 1, 1});
  EXPECT_THROW(is_k_reachable(g, d, {{}, 1}), std::invalid_argument);
  EXPECT_THROW(is_k_reachable(g, d, {{0}, 0}), std::invalid_argument);
  EXPECT_THROW(is_k_reachable(g, d, {{5}, 1}), std::invalid_argument);
  EXPECT_THROW(is_k_reachable(g, Distribution(2), {{0}, 1}), PebblingError);
}

TEST(Solvability, Examples) {
  auto p4 = path(4);
  EXPECT_TRUE(is_k_solvable(p4, Distribution({0, 2, 1, 0})).solvable);
  auto bad = is_k_solvable(p4, Distribution({0, 2, 0, 0}));
  EXPECT_FALSE(bad.solvable);
  ASSERT_TRUE(bad.failing_vertex.has_value());
  EXPECT_EQ(*bad.failing_vertex, 3);  // the fourth vertex

  // 2^eccentricity pebbles on one vertex always suffice.
  auto g = build_staircase({4, 5, Variant::Plain});
  int ecc = 0;
  for (int x : g.distances_from(0)) ecc = std::max(ecc, x);
  Distribution big(g.size());
  big.set(0, 1 << ecc);
  EXPECT_TRUE(is_k_solvable(g, big).solvable);
}

TEST(Solvability, ResultIndependentOfPruning) {
  std::mt19937 rng(5);
  auto g = build_staircase({4, 5, Variant::Plain});
  for (int trial = 0; trial < 100; ++trial) {
    Distribution d(g.size());
    for (int i = 0; i < 5; ++i) d.add(static_cast<int>(rng() % g.size()), 1);
    ReachOptions plain;
    plain.weight_pruning = false;
    const bool a = is_k_solvable(g, d).solvable;
    const bool b = is_k_solvable(g, d, 1, plain).solvable;
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, naive::solvable(adjacency(g), {d.counts().begin(), d.counts().end()}, 1));
  }
}

TEST(Reachability, NoReverseEdgeRestrictionMatchesOracle) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    auto g = build_staircase({2 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 3),
                              Variant::Plain});
    Distribution d(g.size());
    const int pebbles = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < pebbles; ++i) d.add(static_cast<int>(rng() % g.size()), 1);
    const int t = static_cast<int>(rng() % g.size());
    const int k = 1 + static_cast<int>(rng() % 3);
    ReachOptions opt;
    opt.forbid_reverse_edges = true;
    const bool expect = naive::reachable(adjacency(g), {d.counts().begin(), d.counts().end()}, {t}, k);
    EXPECT_EQ(is_k_reachable(g, d, {{t}, k}, opt).reachable, expect);
  }
}

TEST(Reachability, LocalizedSearchOnLargeGraph) {
  auto g = build_grid_window(9, 9);
  Distribution d(g.size());
  d.set(*g.find({5, 5}), 4);
  ReachOptions opt;
  opt.want_witness = true;
  auto near = is_k_reachable(g, d, {{*g.find({5, 7})}, 1}, opt);
  ASSERT_TRUE(near.reachable);
  EXPECT_GE(replay(g, d, near.witness)[*g.find({5, 7})], 1);
  EXPECT_FALSE(is_k_reachable(g, d, {{*g.find({1, 1})}, 1}, opt).reachable);
}

TEST(TwoReachableSlashes, Examples) {
  auto g = build_staircase({3, 3, Variant::Plain});
  Distribution d(g.size());
  d.set(g.slash_vertices(2).front(), 4);
  EXPECT_EQ(two_reachable_slashes(g, d), (std::set<int>{1, 2, 3}));

  auto h = build_staircase({5, 6, Variant::Plain});
  EXPECT_TRUE(two_reachable_slashes(h, Distribution(h.size())).empty());
}

TEST(CrossingMoves, Examples) {
  auto g = build_staircase({3, 4, Variant::Plain});
  auto none = crossing_move_possible(g, Distribution(g.size()), 2);
  EXPECT_FALSE(none.left);
  EXPECT_FALSE(none.right);

  Distribution d(g.size());
  d.set(g.slash_vertices(1).front(), 2);
  auto c = crossing_move_possible(g, d, 2);
  EXPECT_TRUE(c.left);
  EXPECT_FALSE(c.right);

  EXPECT_THROW(crossing_move_possible(g, d, 1), std::out_of_range);
  EXPECT_THROW(crossing_move_possible(g, d, 4), std::out_of_range);
}

TEST(SplitAtCut, EmptyRightPartIsRejected) {
  auto g = build_staircase({3, 4, Variant::Plain});
  Distribution d(g.size());
  d.set(g.slash_vertices(1).front(), 1);
  d.set(g.slash_vertices(2).front(), 1);
  EXPECT_THROW(split_at_cut(g, d, 3, CutSide::Right), PebblingError);
}

TEST(SplitAtCut, CrossingCutIsRejected) {
  auto g = build_staircase({3, 4, Variant::Plain});
  Distribution d(g.size());
  d.set(g.slash_vertices(1).front(), 2);
  EXPECT_THROW(split_at_cut(g, d, 2, CutSide::Left), PebblingError);
}

}  // namespace
}  // namespace pebbling
