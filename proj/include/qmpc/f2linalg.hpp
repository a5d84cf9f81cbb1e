// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmpc/gates.hpp"
#include "qmpc/rng.hpp"

namespace qmpc {

// Fixed-length bit vector packed into 64-bit words.
class BitVec {
 public:
  using Words = boost::container::small_vector<uint64_t, 2>;

  BitVec() = default;
  explicit BitVec(size_t n) : n_(n), w_((n + 63) / 64, 0) {}
  static BitVec from_string(const std::string& bits);  // "0110", index 0 first
  static BitVec from_uint(size_t n, uint64_t value);   // bit i = (value >> i) & 1

  size_t size() const { return n_; }
  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i, bool v) {
    uint64_t m = uint64_t{1} << (i & 63);
    if (v)
      w_[i >> 6] |= m;
    else
      w_[i >> 6] &= ~m;
  }
  void flip(size_t i) { w_[i >> 6] ^= uint64_t{1} << (i & 63); }
  bool operator[](size_t i) const { return get(i); }

  BitVec& operator^=(const BitVec& o) {
    if (n_ != o.n_) throw std::invalid_argument("BitVec length mismatch");
    for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
  }
  BitVec& operator&=(const BitVec& o);
  BitVec& operator|=(const BitVec& o);
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
  bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator<(const BitVec& o) const;

  size_t popcount() const;
  bool any() const;
  bool none() const { return !any(); }
  // Parity of the bitwise AND, i.e. the F2 inner product.
  bool dot(const BitVec& o) const {
    uint64_t acc = 0;
    for (size_t i = 0; i < w_.size(); ++i) acc ^= w_[i] & o.w_[i];
    return std::popcount(acc) & 1;
  }
  uint64_t to_uint() const;  // requires size() <= 64
  std::string to_string() const;
  BitVec slice(size_t begin, size_t len) const;
  void assign_slice(size_t begin, const BitVec& src);
  size_t hash() const;

  const Words& words() const { return w_; }
  Words& words() { return w_; }

 private:
  size_t n_ = 0;
  Words w_;
};

struct BitVecHash {
  size_t operator()(const BitVec& v) const { return v.hash(); }
};

using F2Vec = BitVec;

struct SingularMatrix : std::runtime_error {
  SingularMatrix() : std::runtime_error("matrix is singular over F2") {}
};

class F2Matrix {
 public:
  F2Matrix() = default;
  F2Matrix(size_t rows, size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}
  static F2Matrix identity(size_t n);
  static F2Matrix from_rows(const std::vector<std::string>& rows);

  size_t rows() const { return rows_.size(); }
  size_t cols() const { return cols_; }
  bool get(size_t r, size_t c) const { return rows_[r].get(c); }
  void set(size_t r, size_t c, bool v) { rows_[r].set(c, v); }
  const BitVec& row(size_t r) const { return rows_[r]; }
  BitVec& row(size_t r) { return rows_[r]; }

  F2Vec mul_vec(const F2Vec& v) const;
  F2Matrix operator*(const F2Matrix& o) const;
  F2Matrix transpose() const;
  size_t rank() const;
  bool invertible() const { return rows() == cols() && rank() == rows(); }
  F2Matrix inverse() const;  // throws SingularMatrix
  bool operator==(const F2Matrix& o) const = default;

  // "n,m:" shape header followed by row-major hex.
  std::string serialize() const;
  static F2Matrix deserialize(const std::string& s);

 private:
  size_t cols_ = 0;
  std::vector<BitVec> rows_;
};

F2Vec mat_mul_vec(const F2Matrix& m, const F2Vec& v);
F2Matrix invert(const F2Matrix& m);
F2Matrix sample_gl(size_t n, Rng& rng);
// CNOT/SWAP circuit whose action on basis states is |v> -> |Mv>.
GateSeq linear_map_to_circuit(const F2Matrix& m);
// Applies a CNOT/SWAP circuit to a classical basis vector.
F2Vec apply_reversible(const GateSeq& gates, F2Vec v);

std::string bits_to_hex(const std::vector<bool>& bits);
std::vector<bool> hex_to_bits(const std::string& hex, size_t nbits);
std::string bytes_to_hex(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> hex_to_bytes(const std::string& hex);

}  // namespace qmpc
