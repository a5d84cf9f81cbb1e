// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace qmpc {

// Seedable generator used by every stochastic operation. Only the raw 64-bit
// stream of mt19937_64 is consumed, so draws are identical on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : eng_(seed) {}

  uint64_t next() { return eng_(); }
  bool bit() { return (eng_() >> 63) != 0; }
  // Uniform integer in [0, n).
  uint64_t below(uint64_t n);
  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::vector<uint8_t> bytes(size_t n);

 private:
  std::mt19937_64 eng_;
};

// Keyed BLAKE2b of (domain, index) under the master seed.
uint64_t derive_seed(uint64_t master, uint64_t index, std::string_view domain = "trial");

// Source of coin flips. Garbling consumes coins through this interface so that
// tests can replay every coin sequence exhaustively.
class BitSource {
 public:
  virtual ~BitSource() = default;
  virtual bool next_bit() = 0;
  uint64_t next_bits(int count);
};

class RngBits final : public BitSource {
 public:
  explicit RngBits(Rng& rng) : rng_(rng) {}
  bool next_bit() override { return rng_.bit(); }

 private:
  Rng& rng_;
};

// Replays a fixed coin string; throws once exhausted.
class ScriptedBits final : public BitSource {
 public:
  explicit ScriptedBits(std::vector<bool> coins) : coins_(std::move(coins)) {}
  bool next_bit() override;
  size_t consumed() const { return pos_; }

 private:
  std::vector<bool> coins_;
  size_t pos_ = 0;
};

// Counts coins without supplying meaningful randomness (all zeros).
class CountingBits final : public BitSource {
 public:
  bool next_bit() override {
    ++count_;
    return false;
  }
  size_t count() const { return count_; }

 private:
  size_t count_ = 0;
};

}  // namespace qmpc
