// SPDX-License-Identifier: Apache-2.0
#include "qmpc/f2linalg.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace qmpc {

std::string gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "SDG";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::SWAP: return "SWAP";
    case GateKind::T: return "T";
    case GateKind::Tdg: return "TDG";
  }
  return "?";
}

GateKind gate_from_name(const std::string& name) {
  static const GateKind all[] = {GateKind::H,    GateKind::S,  GateKind::Sdg, GateKind::X,
                                 GateKind::Y,    GateKind::Z,  GateKind::CNOT, GateKind::CZ,
                                 GateKind::SWAP, GateKind::T,  GateKind::Tdg};
  for (GateKind k : all)
    if (gate_name(k) == name) return k;
  throw std::invalid_argument("unknown gate: " + name);
}

// ---- BitVec ----

BitVec BitVec::from_string(const std::string& bits) {
  BitVec v(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("bit string must be 0/1");
    v.set(i, bits[i] == '1');
  }
  return v;
}

BitVec BitVec::from_uint(size_t n, uint64_t value) {
  BitVec v(n);
  for (size_t i = 0; i < n && i < 64; ++i) v.set(i, (value >> i) & 1);
  return v;
}

BitVec& BitVec::operator&=(const BitVec& o) {
  if (n_ != o.n_) throw std::invalid_argument("BitVec length mismatch");
  for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
  return *this;
}

BitVec& BitVec::operator|=(const BitVec& o) {
  if (n_ != o.n_) throw std::invalid_argument("BitVec length mismatch");
  for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
  return *this;
}

bool BitVec::operator<(const BitVec& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return std::lexicographical_compare(w_.begin(), w_.end(), o.w_.begin(), o.w_.end());
}

size_t BitVec::popcount() const {
  size_t c = 0;
  for (uint64_t w : w_) c += std::popcount(w);
  return c;
}

bool BitVec::any() const {
  for (uint64_t w : w_)
    if (w) return true;
  return false;
}

uint64_t BitVec::to_uint() const {
  if (n_ > 64) throw std::out_of_range("BitVec too long for integer conversion");
  return w_.empty() ? 0 : w_[0];
}

std::string BitVec::to_string() const {
  std::string s(n_, '0');
  for (size_t i = 0; i < n_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

BitVec BitVec::slice(size_t begin, size_t len) const {
  BitVec out(len);
  for (size_t i = 0; i < len; ++i) out.set(i, get(begin + i));
  return out;
}

void BitVec::assign_slice(size_t begin, const BitVec& src) {
  for (size_t i = 0; i < src.size(); ++i) set(begin + i, src.get(i));
}

size_t BitVec::hash() const {
  uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
  for (uint64_t w : w_) {
    h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
  }
  return static_cast<size_t>(h ^ (h >> 33));
}

// ---- F2Matrix ----

F2Matrix F2Matrix::identity(size_t n) {
  F2Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

F2Matrix F2Matrix::from_rows(const std::vector<std::string>& rows) {
  if (rows.empty()) return F2Matrix();
  F2Matrix m(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw std::invalid_argument("ragged matrix rows");
    m.rows_[r] = BitVec::from_string(rows[r]);
  }
  return m;
}

F2Vec F2Matrix::mul_vec(const F2Vec& v) const {
  if (v.size() != cols_) throw std::invalid_argument("mat_mul_vec: dimension mismatch");
  F2Vec out(rows());
  for (size_t r = 0; r < rows(); ++r) out.set(r, rows_[r].dot(v));
  return out;
}

F2Matrix F2Matrix::operator*(const F2Matrix& o) const {
  if (cols_ != o.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
  F2Matrix out(rows(), o.cols());
  for (size_t r = 0; r < rows(); ++r)
    for (size_t k = 0; k < cols_; ++k)
      if (get(r, k)) out.rows_[r] ^= o.rows_[k];
  return out;
}

F2Matrix F2Matrix::transpose() const {
  F2Matrix t(cols_, rows());
  for (size_t r = 0; r < rows(); ++r)
    for (size_t c = 0; c < cols_; ++c)
      if (get(r, c)) t.set(c, r, true);
  return t;
}

size_t F2Matrix::rank() const {
  std::vector<BitVec> a = rows_;
  size_t rank = 0;
  for (size_t c = 0; c < cols_ && rank < a.size(); ++c) {
    size_t p = rank;
    while (p < a.size() && !a[p].get(c)) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[rank]);
    for (size_t r = 0; r < a.size(); ++r)
      if (r != rank && a[r].get(c)) a[r] ^= a[rank];
    ++rank;
  }
  return rank;
}

F2Matrix F2Matrix::inverse() const {
  if (rows() != cols_) throw SingularMatrix();
  size_t n = rows();
  std::vector<BitVec> a = rows_;
  F2Matrix inv = identity(n);
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && !a[p].get(c)) ++p;
    if (p == n) throw SingularMatrix();
    std::swap(a[p], a[c]);
    std::swap(inv.rows_[p], inv.rows_[c]);
    for (size_t r = 0; r < n; ++r)
      if (r != c && a[r].get(c)) {
        a[r] ^= a[c];
        inv.rows_[r] ^= inv.rows_[c];
      }
  }
  return inv;
}

std::string F2Matrix::serialize() const {
  std::vector<bool> bits;
  bits.reserve(rows() * cols_);
  for (size_t r = 0; r < rows(); ++r)
    for (size_t c = 0; c < cols_; ++c) bits.push_back(get(r, c));
  std::ostringstream os;
  os << rows() << "," << cols_ << ":" << bits_to_hex(bits);
  return os.str();
}

F2Matrix F2Matrix::deserialize(const std::string& s) {
  size_t comma = s.find(',');
  size_t colon = s.find(':');
  if (comma == std::string::npos || colon == std::string::npos || colon < comma)
    throw std::invalid_argument("F2Matrix: missing shape header");
  size_t n = std::stoul(s.substr(0, comma));
  size_t m = std::stoul(s.substr(comma + 1, colon - comma - 1));
  std::string hex = s.substr(colon + 1);
  if (hex.size() != (n * m + 3) / 4) throw std::invalid_argument("F2Matrix: payload length mismatch");
  std::vector<bool> bits = hex_to_bits(hex, n * m);
  F2Matrix out(n, m);
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < m; ++c) out.set(r, c, bits[r * m + c]);
  return out;
}

F2Vec mat_mul_vec(const F2Matrix& m, const F2Vec& v) { return m.mul_vec(v); }

F2Matrix invert(const F2Matrix& m) { return m.inverse(); }

F2Matrix sample_gl(size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_gl: n must be positive");
  for (;;) {
    F2Matrix m(n, n);
    for (size_t r = 0; r < n; ++r)
      for (size_t c = 0; c < n; ++c) m.set(r, c, rng.bit());
    if (m.rank() == n) return m;
  }
}

GateSeq linear_map_to_circuit(const F2Matrix& m) {
  if (!m.invertible()) throw SingularMatrix();
  size_t n = m.rows();
  F2Matrix a = m;
  // Row operations E_1..E_k with E_k...E_1 M = I; then M = E_1...E_k, so the
  // circuit applies E_k first.
  GateSeq ops;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (!a.get(p, c)) ++p;
    if (p != c) {
      std::swap(a.row(p), a.row(c));
      ops.push_back({GateKind::SWAP, static_cast<int>(c), static_cast<int>(p)});
    }
    for (size_t r = 0; r < n; ++r)
      if (r != c && a.get(r, c)) {
        a.row(r) ^= a.row(c);
        ops.push_back({GateKind::CNOT, static_cast<int>(c), static_cast<int>(r)});
      }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

F2Vec apply_reversible(const GateSeq& gates, F2Vec v) {
  for (const Gate& g : gates) {
    switch (g.kind) {
      case GateKind::CNOT:
        if (v.get(g.q0)) v.flip(g.q1);
        break;
      case GateKind::SWAP: {
        bool a = v.get(g.q0), b = v.get(g.q1);
        v.set(g.q0, b);
        v.set(g.q1, a);
        break;
      }
      case GateKind::X:
        v.flip(g.q0);
        break;
      default:
        throw std::invalid_argument("apply_reversible: gate is not a classical permutation");
    }
  }
  return v;
}

std::string bits_to_hex(const std::vector<bool>& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (size_t i = 0; i < bits.size(); i += 4) {
    int nib = 0;
    for (size_t j = 0; j < 4; ++j) nib = (nib << 1) | (i + j < bits.size() && bits[i + j] ? 1 : 0);
    out.push_back(digits[nib]);
  }
  return out;
}

static int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::invalid_argument("invalid hex digit");
}

std::vector<bool> hex_to_bits(const std::string& hex, size_t nbits) {
  if (hex.size() * 4 < nbits) throw std::invalid_argument("hex payload too short");
  std::vector<bool> bits(nbits);
  for (size_t i = 0; i < nbits; ++i) bits[i] = (hex_digit(hex[i / 4]) >> (3 - i % 4)) & 1;
  return bits;
}

std::string bytes_to_hex(const std::vector<uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

std::vector<uint8_t> hex_to_bytes(const std::string& hex) {
  if (hex.size() % 2) throw std::invalid_argument("odd-length hex string");
  std::vector<uint8_t> out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<uint8_t>(hex_digit(hex[2 * i]) << 4 | hex_digit(hex[2 * i + 1]));
  return out;
}

}  // namespace qmpc
