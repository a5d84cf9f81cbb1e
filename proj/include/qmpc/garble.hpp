// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmpc/f2linalg.hpp"
#include "qmpc/rng.hpp"

namespace qmpc {

using Bytes = std::vector<uint8_t>;

enum class GarbleMode {
  Production,  // keyed-hash row pads with an authentication tag
  TestOtp,     // row pad = XOR of the selecting label keys
};

struct GarbleOptions {
  int key_bits = 128;  // label key length; forced to 8 * row length in TestOtp mode
  GarbleMode mode = GarbleMode::Production;
  bool mask_pp = true;  // false: point-and-permute bit equals the plaintext bit
  int tag_bytes = 16;
};

// Key bits followed by the point-and-permute bit (the outermost bit).
struct Label {
  BitVec key;
  bool pp = false;

  BitVec bits() const;
  static Label from_bits(const BitVec& bits);
  bool operator==(const Label&) const = default;
};

struct LabelPair {
  Label zero, one;
  const Label& operator[](bool b) const { return b ? one : zero; }
};

struct GarbledTable {
  int arity = 0;
  int key_bits = 0;
  size_t out_len = 0;
  int tag_bytes = 16;
  GarbleMode mode = GarbleMode::Production;
  std::vector<Bytes> rows;  // indexed by the concatenated point-and-permute bits, wire 0 lowest

  size_t row_len() const { return out_len + static_cast<size_t>(tag_bytes); }
  size_t byte_size() const { return rows.size() * row_len(); }
  // "GT1:k,key_bits,out_len,tag_bytes,mode:" followed by the rows in hex.
  std::string serialize() const;
  static GarbledTable deserialize(const std::string& s);
  bool operator==(const GarbledTable&) const = default;
};

struct GarbleAuthError : std::runtime_error {
  GarbleAuthError() : std::runtime_error("garbled row failed authentication") {}
};

// Effective options for a table of the given plaintext length.
GarbleOptions resolve_options(GarbleOptions opt, size_t out_len);

// f is the full table of 2^k outputs, f[x] with wire i = bit i of x.
std::pair<std::vector<LabelPair>, GarbledTable> garble(const std::vector<Bytes>& f, GarbleOptions opt,
                                                       BitSource& coins);
std::pair<std::vector<LabelPair>, GarbledTable> garble(const std::vector<Bytes>& f, GarbleOptions opt, Rng& rng);

Bytes geval(const GarbledTable& table, const std::vector<Label>& labels);

std::pair<std::vector<Label>, GarbledTable> gsim(int k, const Bytes& y, GarbleOptions opt, BitSource& coins);
std::pair<std::vector<Label>, GarbledTable> gsim(int k, const Bytes& y, GarbleOptions opt, Rng& rng);

// Labels selected by input x from a set of pairs.
std::vector<Label> select_labels(const std::vector<LabelPair>& pairs, uint64_t x);

}  // namespace qmpc
