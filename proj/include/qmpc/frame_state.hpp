// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <concepts>
#include <span>
#include <unordered_map>
#include <vector>

#include "qmpc/clifford.hpp"
#include "qmpc/statevector.hpp"

namespace qmpc {

// Sparse stabilizer-frame state: psi = sum_a c_a D^a |phi>, where |phi> is the
// stabilizer state of the rows S_i, D^a = D_0^{a_0} D_1^{a_1} ... is an ordered
// product of the paired destabilizer rows, and the D^a|phi> are orthonormal.
// Clifford gates act on the tableau only; T gates and non-stabilizer inputs
// grow the number of terms.
class FrameState {
 public:
  explicit FrameState(int n = 0);

  int num_qubits() const { return n_; }
  size_t num_terms() const { return coef_.size(); }
  double norm() const;

  void apply_gate(const Gate& g);
  void apply_gates(const GateSeq& gates);
  void apply_clifford(const CliffordOp& c, std::span<const int> qubits);
  void apply_clifford(const CliffordOp& c);
  void apply_pauli(const PauliOp& p, std::span<const int> qubits);

  // <psi| P |psi> for an operator on all qubits.
  cplx expectation(const PauliOp& p) const;
  double prob_one(int q) const;

  // Projects onto the (-1)^outcome eigenspace of a Hermitian Pauli operator,
  // renormalises, and returns the branch probability.
  double project_pauli(const PauliOp& o, bool outcome);
  bool measure_pauli(const PauliOp& o, Rng& rng);
  double project_z(int q, bool bit);
  bool measure_z(int q, Rng& rng);
  bool measure_t(int q, Rng& rng);
  std::pair<bool, bool> bell_measure(int q1, int q2, Rng& rng);
  void reset(int q, Rng& rng);

  void append_zeros(int k);
  void append_amplitudes(std::span<const cplx> amps);
  void append(const StateVector& s) { append_amplitudes(s.amplitudes()); }

  DensityMatrix density(std::span<const int> keep) const;
  bool tableau_valid() const;

 private:
  struct Decomp {
    BitVec alpha, beta;
    int phase;  // r = i^phase D^alpha S^beta
  };
  Decomp decompose(const PauliOp& r) const;
  PauliOp destab_product(const BitVec& a) const;
  void combine(cplx a, cplx b, const PauliOp& p);  // psi <- a psi + b p psi
  void normalise();
  void check_qubit(int q) const;

  using Terms = std::unordered_map<BitVec, cplx, BitVecHash>;
  int n_ = 0;
  std::vector<PauliOp> destab_, stab_;
  Terms coef_;
};

// Operations shared by StateVector and FrameState; protocol code is generic over it.
template <class S>
concept QuantumState = requires(S s, const S cs, const Gate& g, const CliffordOp& c, const PauliOp& p,
                                std::span<const int> qs, Rng& rng, int q) {
  { cs.num_qubits() } -> std::convertible_to<int>;
  s.apply_gate(g);
  s.apply_clifford(c, qs);
  s.apply_pauli(p, qs);
  { s.measure_z(q, rng) } -> std::same_as<bool>;
  { s.project_z(q, true) } -> std::same_as<double>;
  { s.measure_t(q, rng) } -> std::same_as<bool>;
  s.reset(q, rng);
  s.append_zeros(q);
  { cs.density(qs) } -> std::same_as<DensityMatrix>;
};

}  // namespace qmpc
