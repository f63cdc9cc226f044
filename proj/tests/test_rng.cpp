#include <gtest/gtest.h>

#include <set>

#include "sublln/rng.hpp"

using sublln::Philox4x32;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const Philox4x32 gen(0);
  const auto out = gen({0, 0, 0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const Philox4x32 gen(0xffffffffffffffffull);
  const auto out = gen({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const Philox4x32 gen((0x299f31d0ull << 32) | 0xa4093822ull);
  const auto out = gen({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RandomWords, PureFunctionOfAddress) {
  const auto a = sublln::random_words(42, 7, 1000);
  const auto b = sublln::random_words(42, 7, 1000);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  std::set<std::uint64_t> seen;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    for (std::uint64_t step = 0; step < 50; ++step) {
      seen.insert(sublln::random_words(42, rep, step).first);
    }
  }
  EXPECT_EQ(seen.size(), 2500u);
}

TEST(RandomWords, SeedChangesStream) {
  EXPECT_NE(sublln::random_words(1, 0, 0).first, sublln::random_words(2, 0, 0).first);
}

TEST(UnitInterval, Ranges) {
  EXPECT_EQ(sublln::to_unit_closed_open(0), 0.0);
  EXPECT_LT(sublln::to_unit_closed_open(~0ull), 1.0);
  EXPECT_GT(sublln::to_unit_open_closed(0), 0.0);
  EXPECT_EQ(sublln::to_unit_open_closed(~0ull), 1.0);
}
