// SPDX-License-Identifier: Apache-2.0
#include "qmpc/rng.hpp"

#include <sodium.h>

#include <stdexcept>

namespace qmpc {

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  uint64_t r;
  do {
    r = eng_();
  } while (r >= limit);
  return r % n;
}

std::vector<uint8_t> Rng::bytes(size_t n) {
  std::vector<uint8_t> out(n);
  for (size_t i = 0; i < n; i += 8) {
    uint64_t r = eng_();
    for (size_t j = 0; j < 8 && i + j < n; ++j) out[i + j] = static_cast<uint8_t>(r >> (8 * j));
  }
  return out;
}

uint64_t derive_seed(uint64_t master, uint64_t index, std::string_view domain) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
  uint8_t key[16] = {};
  for (int i = 0; i < 8; ++i) key[i] = static_cast<uint8_t>(master >> (8 * i));
  std::vector<uint8_t> msg(domain.begin(), domain.end());
  msg.push_back(0);
  for (int i = 0; i < 8; ++i) msg.push_back(static_cast<uint8_t>(index >> (8 * i)));
  uint8_t out[16];
  crypto_generichash(out, sizeof out, msg.data(), msg.size(), key, sizeof key);
  uint64_t s = 0;
  for (int i = 0; i < 8; ++i) s |= static_cast<uint64_t>(out[i]) << (8 * i);
  return s;
}

uint64_t BitSource::next_bits(int count) {
  uint64_t v = 0;
  for (int i = 0; i < count; ++i) v |= static_cast<uint64_t>(next_bit()) << i;
  return v;
}

bool ScriptedBits::next_bit() {
  if (pos_ >= coins_.size()) throw std::out_of_range("ScriptedBits: coin script exhausted");
  return coins_[pos_++];
}

}  // namespace qmpc
