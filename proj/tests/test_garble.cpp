// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <map>
#include <tuple>

#include "qmpc/garble.hpp"

using namespace qmpc;

namespace {

std::vector<Bytes> random_function(int k, size_t out_len, Rng& rng) {
  std::vector<Bytes> f(size_t{1} << k);
  for (auto& y : f) y = rng.bytes(out_len);
  return f;
}

std::vector<bool> coins_of(uint64_t v, int n) {
  std::vector<bool> c(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) c[i] = (v >> i) & 1;
  return c;
}

// Evaluator's view: revealed key bytes, revealed pp bit, both rows.
using View = std::tuple<uint64_t, bool, Bytes, Bytes>;

}  // namespace

TEST(Garble, EvaluatesEveryInput) {
  Rng rng(1);
  for (int k = 1; k <= 4; ++k) {
    auto f = random_function(k, 5, rng);
    auto [pairs, table] = garble(f, GarbleOptions{}, rng);
    ASSERT_EQ(table.rows.size(), size_t{1} << k);
    for (uint64_t x = 0; x < f.size(); ++x) EXPECT_EQ(geval(table, select_labels(pairs, x)), f[x]);
  }
}

TEST(Garble, TestModeEvaluatesEveryInput) {
  Rng rng(2);
  GarbleOptions opt{.mode = GarbleMode::TestOtp};
  auto f = random_function(3, 2, rng);
  auto [pairs, table] = garble(f, opt, rng);
  EXPECT_EQ(table.key_bits, 8 * (2 + 16));
  for (uint64_t x = 0; x < f.size(); ++x) EXPECT_EQ(geval(table, select_labels(pairs, x)), f[x]);
}

TEST(Garble, ForgedLabelsRejected) {
  Rng rng(3);
  auto f = random_function(2, 3, rng);
  auto [pairs, table] = garble(f, GarbleOptions{}, rng);
  for (uint64_t x = 0; x < 4; ++x) {
    auto labels = select_labels(pairs, x);
    for (size_t bit = 0; bit < labels[0].key.size(); ++bit) {
      auto bad = labels;
      bad[1].key.flip(bit);
      EXPECT_THROW(geval(table, bad), GarbleAuthError);
    }
    auto bad = labels;
    bad[0].pp = !bad[0].pp;
    EXPECT_THROW(geval(table, bad), GarbleAuthError);
  }
}

// The one-time-pad mode is malleable: key flips over the plaintext bytes pass
// through, flips over the tag bytes and row switches are caught.
TEST(Garble, TestModeTagCoverage) {
  Rng rng(31);
  auto f = random_function(2, 3, rng);
  auto [pairs, table] = garble(f, GarbleOptions{.mode = GarbleMode::TestOtp}, rng);
  auto labels = select_labels(pairs, 2);
  for (size_t bit = 0; bit < labels[0].key.size(); ++bit) {
    auto bad = labels;
    bad[0].key.flip(bit);
    if (bit < 8 * table.out_len) {
      Bytes expect = f[2];
      expect[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
      EXPECT_EQ(geval(table, bad), expect);
    } else {
      EXPECT_THROW(geval(table, bad), GarbleAuthError);
    }
  }
  auto bad = labels;
  bad[1].pp = !bad[1].pp;
  EXPECT_THROW(geval(table, bad), GarbleAuthError);
}

TEST(Garble, EachRowOpensUnderExactlyOneCombination) {
  Rng rng(4);
  auto f = random_function(3, 1, rng);
  auto [pairs, table] = garble(f, GarbleOptions{.mode = GarbleMode::TestOtp}, rng);
  // Every combination of the 2^(2k) choices of label per wire (including
  // mixing labels across wires' two values) is tried on every row.
  std::vector<int> opens(table.rows.size(), 0);
  for (uint64_t x = 0; x < 8; ++x) {
    auto labels = select_labels(pairs, x);
    size_t row = 0;
    for (int i = 0; i < 3; ++i) row |= static_cast<size_t>(labels[i].pp) << i;
    for (size_t r = 0; r < table.rows.size(); ++r) {
      GarbledTable probe = table;
      for (size_t s = 0; s < probe.rows.size(); ++s) probe.rows[s] = table.rows[r];
      try {
        geval(probe, labels);
        ++opens[r];
        EXPECT_EQ(r, row);
      } catch (const GarbleAuthError&) {
      }
    }
  }
  for (int c : opens) EXPECT_EQ(c, 1);
}

TEST(Garble, UnmaskedPointBitIsPlaintext) {
  Rng rng(5);
  auto [pairs, table] = garble(random_function(2, 1, rng), GarbleOptions{.key_bits = 3, .mask_pp = false}, rng);
  for (const auto& p : pairs) {
    EXPECT_FALSE(p.zero.pp);
    EXPECT_TRUE(p.one.pp);
    EXPECT_EQ(p.zero.key.size(), 3u);
  }
}

TEST(Garble, ZeroLengthKeysStillEvaluate) {
  Rng rng(6);
  auto f = random_function(2, 1, rng);
  auto [pairs, table] = garble(f, GarbleOptions{.key_bits = 0, .mask_pp = false}, rng);
  for (uint64_t x = 0; x < 4; ++x) EXPECT_EQ(geval(table, select_labels(pairs, x)), f[x]);
}

TEST(Garble, SerializationRoundTrip) {
  Rng rng(7);
  for (GarbleMode mode : {GarbleMode::Production, GarbleMode::TestOtp}) {
    auto f = random_function(3, 4, rng);
    auto [pairs, table] = garble(f, GarbleOptions{.mode = mode}, rng);
    std::string s = table.serialize();
    GarbledTable back = GarbledTable::deserialize(s);
    EXPECT_EQ(back, table);
    EXPECT_EQ(geval(back, select_labels(pairs, 5)), f[5]);
  }
  GarbledTable t = garble(random_function(1, 1, rng), GarbleOptions{}, rng).second;
  std::string s = t.serialize();
  EXPECT_THROW(GarbledTable::deserialize("XX" + s), std::invalid_argument);
  EXPECT_THROW(GarbledTable::deserialize(s.substr(0, s.size() - 2)), std::invalid_argument);
  EXPECT_THROW(GarbledTable::deserialize("GT1:1,128,1,16,foo:00"), std::invalid_argument);
  EXPECT_THROW(GarbledTable::deserialize("GT1:0,128,1,16,prod:"), std::invalid_argument);
}

TEST(Garble, InputValidation) {
  Rng rng(8);
  EXPECT_THROW(garble(std::vector<Bytes>(3, Bytes{1}), GarbleOptions{}, rng), std::invalid_argument);
  EXPECT_THROW(garble({Bytes{1}, Bytes{1, 2}}, GarbleOptions{}, rng), std::invalid_argument);
  auto [pairs, table] = garble(random_function(2, 1, rng), GarbleOptions{}, rng);
  EXPECT_THROW(geval(table, {pairs[0].zero}), std::invalid_argument);
  auto labels = select_labels(pairs, 0);
  labels[0].key = BitVec(5);
  EXPECT_THROW(geval(table, labels), std::invalid_argument);
}

TEST(Gsim, ShapeMatchesRealGarbling) {
  Rng rng(9);
  for (GarbleMode mode : {GarbleMode::Production, GarbleMode::TestOtp}) {
    GarbleOptions opt{.mode = mode};
    auto f = random_function(3, 6, rng);
    auto [pairs, real] = garble(f, opt, rng);
    auto [labels, sim] = gsim(3, f[2], opt, rng);
    EXPECT_EQ(sim.rows.size(), real.rows.size());
    EXPECT_EQ(sim.key_bits, real.key_bits);
    EXPECT_EQ(sim.byte_size(), real.byte_size());
    EXPECT_EQ(sim.serialize().size(), real.serialize().size());
    EXPECT_EQ(geval(sim, labels), f[2]);
  }
}

TEST(Gsim, CoinBudgets) {
  GarbleOptions opt{.mode = GarbleMode::TestOtp, .tag_bytes = 0};
  CountingBits g, s;
  garble({Bytes{0}, Bytes{1}}, opt, g);
  gsim(1, Bytes{0}, opt, s);
  EXPECT_EQ(g.count(), 17u);
  EXPECT_EQ(s.count(), 17u);
}

// Exact equality of the evaluator's view distribution, real versus simulated,
// over every coin sequence at k = 1 with one-byte outputs and no tag.
TEST(Gsim, ExactViewDistributionOneWire) {
  GarbleOptions opt{.mode = GarbleMode::TestOtp, .tag_bytes = 0};
  const int coins = 17;
  const std::vector<std::vector<Bytes>> functions = {{Bytes{0x00}, Bytes{0xff}}, {Bytes{0x5a}, Bytes{0x5a}}};
  for (const auto& f : functions)
    for (uint64_t x = 0; x < 2; ++x) {
      std::map<View, int> real, sim;
      for (uint64_t c = 0; c < (uint64_t{1} << coins); ++c) {
        ScriptedBits g(coins_of(c, coins));
        auto [pairs, table] = garble(f, opt, g);
        ASSERT_EQ(g.consumed(), static_cast<size_t>(coins));
        const Label& l = pairs[0][x];
        ++real[{l.key.to_uint(), l.pp, table.rows[0], table.rows[1]}];

        ScriptedBits s(coins_of(c, coins));
        auto [labels, st] = gsim(1, f[x], opt, s);
        ASSERT_EQ(s.consumed(), static_cast<size_t>(coins));
        ++sim[{labels[0].key.to_uint(), labels[0].pp, st.rows[0], st.rows[1]}];
      }
      EXPECT_EQ(real.size(), size_t{1} << coins);
      EXPECT_EQ(real, sim);
    }
}
