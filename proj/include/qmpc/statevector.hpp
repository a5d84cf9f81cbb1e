// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "qmpc/clifford.hpp"
#include "qmpc/f2linalg.hpp"
#include "qmpc/gates.hpp"
#include "qmpc/rng.hpp"

namespace qmpc {

using cplx = std::complex<double>;

// Statevector qubit cap: QSIM_QUBIT_CAP when set, otherwise 16.
int qubit_cap();

struct CapExceeded : std::runtime_error {
  explicit CapExceeded(int n);
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Eigen::MatrixXcd rho);
  static DensityMatrix pure(std::span<const cplx> amps);
  static DensityMatrix basis_state(int n, uint64_t index);
  static DensityMatrix maximally_mixed(int n);

  int num_qubits() const { return n_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  double trace() const { return rho_.trace().real(); }
  // Hermitian, unit trace and PSD within the stated tolerances.
  bool is_valid(double tol = 1e-9) const;
  double fidelity_with_pure(std::span<const cplx> amps) const;

  DensityMatrix& operator+=(const DensityMatrix& o);
  DensityMatrix& operator*=(double s);

 private:
  int n_ = 0;
  Eigen::MatrixXcd rho_;
};

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// Mixture sum_i w_i rho_i accumulated from weighted samples.
class DensityAccumulator {
 public:
  void add(const DensityMatrix& rho, double weight = 1.0);
  DensityMatrix mean() const;
  double total_weight() const { return weight_; }

 private:
  Eigen::MatrixXcd sum_;
  double weight_ = 0;
};

enum class Basis { Computational, T, Bell };

struct MeasRecord {
  std::vector<int> qubits;
  BitVec outcomes;
  Basis basis = Basis::Computational;
};

// Blocks of a product-state preparation, tensored in order.
struct PrepBlock {
  enum class Kind { Zeros, TStates, Epr, Amplitudes };
  Kind kind;
  int count = 0;  // qubits for Zeros/TStates, pairs for Epr
  std::vector<cplx> amps;

  static PrepBlock zeros(int k) { return {Kind::Zeros, k, {}}; }
  static PrepBlock t_states(int k) { return {Kind::TStates, k, {}}; }
  static PrepBlock epr(int pairs) { return {Kind::Epr, pairs, {}}; }
  static PrepBlock amplitudes(std::vector<cplx> a);
  int qubits() const;
};
using PrepSpec = std::vector<PrepBlock>;

// Dense state on n qubits; qubit q is bit q of the basis index.
class StateVector {
 public:
  explicit StateVector(int n = 0);
  static StateVector from_amplitudes(std::vector<cplx> amps);

  int num_qubits() const { return n_; }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  double norm() const;

  void apply_gate(const Gate& g);
  void apply_gates(const GateSeq& gates);
  void apply_clifford(const CliffordOp& c, std::span<const int> qubits);
  void apply_clifford(const CliffordOp& c);
  // Applies the operator i^phase X^x Z^z on the listed qubits.
  void apply_pauli(const PauliOp& p, std::span<const int> qubits);

  double prob_one(int q) const;
  // Projects qubit q onto |bit>, renormalises, and returns the branch probability.
  double project_z(int q, bool bit);
  bool measure_z(int q, Rng& rng);
  // Outcome 0 is |T>, 1 is |T-perp>; the qubit is left in |outcome>.
  bool measure_t(int q, Rng& rng);
  // CNOT(q1,q2), H(q1); x is the outcome on q2, z the outcome on q1.
  std::pair<bool, bool> bell_measure(int q1, int q2, Rng& rng);
  void reset(int q, Rng& rng);

  // Appends |0>^k (or a copy of another state) on new highest-index qubits.
  void append_zeros(int k);
  void append(const StateVector& other);
  // Removes the k highest-index qubits, which must be in |0>.
  void drop_high_zeros(int k);

  DensityMatrix density(std::span<const int> keep) const;
  DensityMatrix density() const;

 private:
  void check_qubit(int q) const;
  void apply_1q(int q, const cplx m[4]);

  int n_ = 0;
  std::vector<cplx> amp_;
};

// Functional front end: each call returns a new state value.
StateVector prepare(const PrepSpec& spec);
StateVector apply_gate(StateVector state, const Gate& g);
std::pair<BitVec, StateVector> measure_computational(StateVector state, std::span<const int> qubits, Rng& rng);
std::pair<bool, StateVector> measure_t_basis(StateVector state, int q, Rng& rng);
std::pair<std::pair<bool, bool>, StateVector> bell_measure(StateVector state, int q1, int q2, Rng& rng);
DensityMatrix density_of(const StateVector& state, std::span<const int> keep);

std::vector<cplx> t_state_amplitudes();
std::vector<cplx> t_perp_amplitudes();

}  // namespace qmpc
