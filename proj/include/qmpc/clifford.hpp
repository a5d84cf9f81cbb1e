// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmpc/f2linalg.hpp"
#include "qmpc/gates.hpp"
#include "qmpc/rng.hpp"

namespace qmpc {

// P = i^phase * X^x * Z^z, with X^x and Z^z products over qubits.
class PauliOp {
 public:
  PauliOp() = default;
  explicit PauliOp(size_t n) : x_(n), z_(n) {}
  PauliOp(BitVec x, BitVec z, int phase);
  static PauliOp identity(size_t n) { return PauliOp(n); }
  // 'I', 'X', 'Y' or 'Z' on qubit q (Hermitian, sign +1).
  static PauliOp single(size_t n, size_t q, char p);
  // "+XIZ", "-Y", "iZZ", "-iX"; no sign prefix means +1.
  static PauliOp from_string(const std::string& s);
  static PauliOp from_xz(const BitVec& x, const BitVec& z);  // Hermitian, sign +1

  size_t n() const { return x_.size(); }
  const BitVec& x() const { return x_; }
  const BitVec& z() const { return z_; }
  BitVec& x() { return x_; }
  BitVec& z() { return z_; }
  int phase() const { return phase_; }
  void set_phase(int p) { phase_ = ((p % 4) + 4) % 4; }
  void add_phase(int p) { set_phase(phase_ + p); }

  bool is_identity_up_to_phase() const { return x_.none() && z_.none(); }
  bool is_hermitian() const { return ((phase_ - static_cast<int>((x_ & z_).popcount())) & 1) == 0; }
  // +1 or -1 for Hermitian operators written with Y = iXZ.
  int hermitian_sign() const;
  bool commutes(const PauliOp& o) const { return x_.dot(o.z_) == z_.dot(o.x_); }
  char letter(size_t q) const;

  PauliOp operator*(const PauliOp& o) const;
  PauliOp& operator*=(const PauliOp& o);
  bool operator==(const PauliOp& o) const = default;
  bool same_up_to_phase(const PauliOp& o) const { return x_ == o.x_ && z_ == o.z_; }
  std::string to_string() const;

  PauliOp restrict(std::span<const int> qubits) const;
  void embed_from(const PauliOp& local, std::span<const int> qubits);

  // In-place conjugation P -> G P G^dagger by an elementary Clifford gate.
  void conj_gate(const Gate& g);
  void conj_h(size_t q);
  void conj_s(size_t q);
  void conj_sdg(size_t q);
  void conj_cnot(size_t c, size_t t);
  void conj_cz(size_t a, size_t b);
  void conj_swap(size_t a, size_t b);

 private:
  BitVec x_, z_;
  int phase_ = 0;
};

// Clifford unitary modulo global phase: images of X_0..X_{n-1}, Z_0..Z_{n-1}.
class CliffordOp {
 public:
  CliffordOp() = default;
  explicit CliffordOp(size_t n);  // identity
  static CliffordOp identity(size_t n) { return CliffordOp(n); }
  static CliffordOp from_images(std::vector<PauliOp> images);  // validates
  // For images that are symplectic by construction (composition, embedding).
  static CliffordOp from_images_unchecked(std::vector<PauliOp> images);
  static CliffordOp from_gates(size_t n, const GateSeq& gates);
  static CliffordOp from_gate(size_t n, const Gate& g) { return from_gates(n, {g}); }
  // Conjugation by a Pauli operator.
  static CliffordOp from_pauli(const PauliOp& p);
  // Wire permutation: the content of qubit i moves to qubit dest[i].
  static CliffordOp permutation(const std::vector<int>& dest);
  // U_M: |v> -> |Mv>.
  static CliffordOp from_linear_map(const F2Matrix& m);

  size_t n() const { return images_.size() / 2; }
  const PauliOp& image_x(size_t q) const { return images_[q]; }
  const PauliOp& image_z(size_t q) const { return images_[n() + q]; }
  const std::vector<PauliOp>& images() const { return images_; }

  PauliOp conjugate(const PauliOp& p) const;
  // Appends a gate after this Clifford (this <- g o this).
  void then_gate(const Gate& g);
  bool is_valid() const;
  bool operator==(const CliffordOp& o) const = default;

  std::vector<uint8_t> serialize() const;
  static CliffordOp deserialize(const std::vector<uint8_t>& bytes);
  std::string to_hex() const { return bytes_to_hex(serialize()); }
  static CliffordOp from_hex(const std::string& hex) { return deserialize(hex_to_bytes(hex)); }

 private:
  std::vector<PauliOp> images_;
};

struct InvalidTableau : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PauliOp pauli_mul(const PauliOp& p, const PauliOp& q);
PauliOp conjugate(const CliffordOp& c, const PauliOp& p);
// Tableau of c1 o c2 (c2 applied first).
CliffordOp compose(const CliffordOp& c1, const CliffordOp& c2);
CliffordOp inverse(const CliffordOp& c);
CliffordOp tensor(const CliffordOp& a, const CliffordOp& b);
// Acts as c on the listed qubits of an n-qubit system, identity elsewhere.
CliffordOp embed(const CliffordOp& c, size_t n, std::span<const int> qubits);
CliffordOp sample_clifford(size_t n, Rng& rng);
// H/S/CNOT/X/Z circuit realising c (including signs), applied left to right.
GateSeq to_gates(const CliffordOp& c);

// Uniformly random Pauli (sign +1 Hermitian form) on n qubits.
PauliOp random_pauli(size_t n, Rng& rng);

std::vector<int> iota_vec(int begin, int count);

}  // namespace qmpc
