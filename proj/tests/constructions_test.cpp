#include "pebbling/constructions.hpp"

#include <gtest/gtest.h>

#include "pebbling/pebble.hpp"

namespace pebbling {
namespace {

StaircaseSpec plain(int m, int n) { return {m, n, Variant::Plain}; }
StaircaseSpec prime(int m, int n) { return {m, n, Variant::Prime}; }

bool solvable(const StaircaseSpec& spec, const Distribution& d) {
  return is_k_solvable(build_staircase(spec), d).solvable;
}

Placed block(const StaircaseSpec& s) { return {s, base_witness(s)}; }

TEST(BaseWitness, SizesAndSolvability) {
  for (auto [spec, size] : {std::pair{plain(3, 2), 2}, {plain(6, 8), 9}, {prime(5, 7), 7}, {plain(4, 4), 3}}) {
    auto d = base_witness(spec);
    EXPECT_EQ(d.total(), size) << spec.name();
    EXPECT_TRUE(solvable(spec, d));
  }
  EXPECT_THROW(base_witness(plain(3, 12)), ConstructionError);
  EXPECT_THROW(base_witness(plain(9, 3)), ConstructionError);
}

TEST(BaseWitness, ProviderIsUsedWhenValid) {
  int calls = 0;
  set_witness_provider([&](const StaircaseSpec& s) -> std::optional<Distribution> {
    ++calls;
    if (s == plain(3, 4)) return Distribution(std::vector<int>(build_staircase(s).size(), 1));
    return std::nullopt;
  });
  EXPECT_EQ(base_witness(plain(3, 4)).total(), 6);  // taken as given, only re-verified
  EXPECT_EQ(base_witness(plain(3, 5)).total(), 4);
  EXPECT_EQ(calls, 2);
  set_witness_provider(nullptr);
  EXPECT_EQ(base_witness(plain(3, 4)).total(), 3);
}

TEST(Concatenate, WorkedExamples) {
  auto s48 = concatenate(block(plain(4, 4)), block(plain(4, 4)));
  EXPECT_EQ(s48.spec, plain(4, 8));
  EXPECT_EQ(s48.dist.total(), 6);

  Placed chain = block(plain(5, 5));
  for (int k = 2; k <= 4; ++k) {
    // Odd-length blocks alternate variants along a 5-wide staircase.
    chain = concatenate(chain, block(k % 2 == 0 ? prime(5, 5) : plain(5, 5)));
    EXPECT_EQ(chain.spec, plain(5, 5 * k));
    EXPECT_EQ(chain.dist.total(), 4 * k);
  }

  auto s611 = concatenate(block(plain(6, 5)), block(plain(6, 6)));
  EXPECT_EQ(s611.spec, plain(6, 11));
  EXPECT_EQ(s611.dist.total(), 11);
  EXPECT_TRUE(solvable(s611.spec, s611.dist));
}

TEST(Concatenate, Errors) {
  EXPECT_THROW(concatenate(block(plain(4, 4)), block(plain(5, 4))), std::invalid_argument);
  // After an odd-length plain 3-wide block the next slash starts a prime block.
  EXPECT_THROW(concatenate(block(plain(3, 3)), block(plain(3, 3))), std::invalid_argument);
  EXPECT_NO_THROW(concatenate(block(plain(3, 3)), block(prime(3, 3))));
  // Even-length right blocks may come in either variant.
  EXPECT_NO_THROW(concatenate(block(plain(3, 3)), block(plain(3, 4))));
}

TEST(Concatenate, Associative) {
  auto a = block(plain(4, 3));
  auto b = block(plain(4, 4));
  auto c = block(plain(4, 5));
  auto left = concatenate(concatenate(a, b), c);
  auto right = concatenate(a, concatenate(b, c));
  EXPECT_EQ(left.spec, right.spec);
  EXPECT_EQ(left.dist, right.dist);
}

TEST(SevenWide, PatternSizes) {
  EXPECT_EQ(seven_wide_pattern(7, Variant::Prime).total(), 8);
  EXPECT_EQ(seven_wide_pattern(8, Variant::Plain).total(), 10);
  EXPECT_EQ(seven_wide_pattern(9, Variant::Plain).total(), 12);
  EXPECT_EQ(seven_wide_pattern(11, Variant::Prime).total(), 12);
  for (int n = 9; n <= 24; ++n) {
    for (auto v : {Variant::Plain, Variant::Prime}) {
      auto d = seven_wide_pattern(n, v);
      const bool odd_plain = n % 2 == 1 && v == Variant::Plain;
      const int expected = odd_plain ? n + 3 : (v == Variant::Prime && n % 4 == 3) ? n + 1 : n + 2;
      EXPECT_EQ(d.total(), n == 9 && v == Variant::Prime ? n + 3 : expected) << n;
      EXPECT_TRUE(solvable({7, n, v}, d)) << n;
    }
  }
}

TEST(Widen, SizesAndSolvability) {
  auto d = base_witness(plain(7, 8));
  auto w = widen(plain(7, 8), d);
  EXPECT_EQ(w.spec, plain(8, 8));
  EXPECT_GE(w.dist.total(), 12);
  EXPECT_GT(w.dist.total(), 11);
  EXPECT_TRUE(solvable(w.spec, w.dist));

  for (auto s : {plain(3, 1), prime(3, 1), plain(4, 1)}) {
    auto one = widen(s, base_witness(s));
    EXPECT_EQ(one.dist.total(), base_witness(s).total() + 1) << s.name();
  }
  for (int m = 2; m <= 6; ++m) {
    for (int n = 1; n <= 8; ++n) {
      for (auto v : {Variant::Plain, Variant::Prime}) {
        StaircaseSpec s{m, n, v};
        auto base = base_witness(s);
        auto out = widen(s, base);
        EXPECT_EQ(out.spec.width, m + 1);
        EXPECT_EQ(out.spec.length, n);
        const int added = out.dist.total() - base.total();
        EXPECT_GE(added, (n + 3) / 4) << s.name();
        EXPECT_LE(added, (n + 3) / 4 + 1) << s.name();
      }
    }
  }
  EXPECT_THROW(widen(plain(4, 4), Distribution(8)), std::invalid_argument);
}

TEST(GridSevenDiagonal, Windows) {
  auto one = grid_seven_diagonal(1, 1);
  EXPECT_EQ(one.total(), 1);
  for (auto [r, c] : {std::pair{7, 7}, {3, 9}, {10, 10}}) {
    auto d = grid_seven_diagonal(r, c);
    EXPECT_TRUE(is_k_solvable(build_grid_window(r, c), d).solvable) << r << "x" << c;
  }
}

TEST(Construct, FamiliesAndVerification) {
  auto c = construct(plain(4, 10));
  EXPECT_EQ(c.plan.family, Family::Width4);
  EXPECT_EQ(c.placed.dist.total(), 8);
  EXPECT_EQ(c.plan.expected_size, (SizeRange{8, 8}));
  auto s = construct(prime(7, 15));
  EXPECT_EQ(s.plan.family, Family::Width7Prime);
  EXPECT_EQ(s.plan.expected_size, (SizeRange{16, 18}));
  EXPECT_EQ(s.placed.dist.total(), 16);
  EXPECT_THROW(construct(plain(8, 5)), std::invalid_argument);
}

}  // namespace
}  // namespace pebbling
