// SPDX-License-Identifier: Apache-2.0
#include "qmpc/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

namespace qmpc {

namespace {
const cplx kI(0, 1);
const double kR = M_SQRT1_2;
}  // namespace

int qubit_cap() {
  if (const char* env = std::getenv("QSIM_QUBIT_CAP")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 16;
}

CapExceeded::CapExceeded(int n)
    : std::runtime_error("state of " + std::to_string(n) + " qubits exceeds the qubit cap of " +
                         std::to_string(qubit_cap())) {}

// ---- DensityMatrix ----

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw std::invalid_argument("density matrix must be square");
  int n = 0;
  while ((Eigen::Index{1} << n) < rho_.rows()) ++n;
  if ((Eigen::Index{1} << n) != rho_.rows()) throw std::invalid_argument("density dimension must be a power of two");
  n_ = n;
}

DensityMatrix DensityMatrix::pure(std::span<const cplx> amps) {
  Eigen::Map<const Eigen::VectorXcd> v(amps.data(), static_cast<Eigen::Index>(amps.size()));
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::basis_state(int n, uint64_t index) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  m(index, index) = 1;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  Eigen::Index d = Eigen::Index{1} << n;
  return DensityMatrix(Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
}

bool DensityMatrix::is_valid(double tol) const {
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho_.trace() - cplx(1, 0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-8;
}

double DensityMatrix::fidelity_with_pure(std::span<const cplx> amps) const {
  Eigen::Map<const Eigen::VectorXcd> v(amps.data(), static_cast<Eigen::Index>(amps.size()));
  return (v.adjoint() * rho_ * v)(0, 0).real();
}

DensityMatrix& DensityMatrix::operator+=(const DensityMatrix& o) {
  if (rho_.size() == 0) {
    *this = o;
    return *this;
  }
  if (o.n_ != n_) throw std::invalid_argument("density dimension mismatch");
  rho_ += o.rho_;
  return *this;
}

DensityMatrix& DensityMatrix::operator*=(double s) {
  rho_ *= s;
  return *this;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.num_qubits() != sigma.num_qubits() || rho.matrix().rows() != sigma.matrix().rows())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::MatrixXcd diff = rho.matrix() - sigma.matrix();
  diff = 0.5 * (diff + diff.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

void DensityAccumulator::add(const DensityMatrix& rho, double weight) {
  if (sum_.size() == 0)
    sum_ = weight * rho.matrix();
  else
    sum_ += weight * rho.matrix();
  weight_ += weight;
}

DensityMatrix DensityAccumulator::mean() const {
  if (weight_ <= 0) throw std::logic_error("DensityAccumulator: no samples");
  return DensityMatrix(sum_ / weight_);
}

// ---- preparation ----

PrepBlock PrepBlock::amplitudes(std::vector<cplx> a) {
  int n = 0;
  while ((size_t{1} << n) < a.size()) ++n;
  if ((size_t{1} << n) != a.size() || a.empty()) throw std::invalid_argument("amplitude count must be a power of two");
  return {Kind::Amplitudes, n, std::move(a)};
}

int PrepBlock::qubits() const { return kind == Kind::Epr ? 2 * count : count; }

std::vector<cplx> t_state_amplitudes() { return {kR, kR * std::polar(1.0, M_PI / 4)}; }
std::vector<cplx> t_perp_amplitudes() { return {kR, -kR * std::polar(1.0, M_PI / 4)}; }

StateVector prepare(const PrepSpec& spec) {
  int total = 0;
  for (const PrepBlock& b : spec) total += b.qubits();
  if (total > qubit_cap()) throw CapExceeded(total);
  StateVector out(0);
  for (const PrepBlock& b : spec) {
    switch (b.kind) {
      case PrepBlock::Kind::Zeros: out.append_zeros(b.count); break;
      case PrepBlock::Kind::TStates:
        for (int i = 0; i < b.count; ++i) out.append(StateVector::from_amplitudes(t_state_amplitudes()));
        break;
      case PrepBlock::Kind::Epr:
        for (int i = 0; i < b.count; ++i) out.append(StateVector::from_amplitudes({kR, 0, 0, kR}));
        break;
      case PrepBlock::Kind::Amplitudes: out.append(StateVector::from_amplitudes(b.amps)); break;
    }
  }
  return out;
}

// ---- StateVector ----

StateVector::StateVector(int n) : n_(n) {
  if (n < 0) throw std::invalid_argument("negative qubit count");
  if (n > qubit_cap()) throw CapExceeded(n);
  amp_.assign(size_t{1} << n, 0.0);
  amp_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amps) {
  int n = 0;
  while ((size_t{1} << n) < amps.size()) ++n;
  if (amps.empty() || (size_t{1} << n) != amps.size())
    throw std::invalid_argument("amplitude count must be a power of two");
  double s = 0;
  for (const cplx& a : amps) s += std::norm(a);
  if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("amplitudes are not normalised");
  StateVector out(n);
  out.amp_ = std::move(amps);
  return out;
}

double StateVector::norm() const {
  double s = 0;
  for (const cplx& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

void StateVector::check_qubit(int q) const {
  if (q < 0 || q >= n_) throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
}

void StateVector::apply_1q(int q, const cplx m[4]) {
  size_t bit = size_t{1} << q;
  for (size_t i = 0; i < amp_.size(); ++i) {
    if (i & bit) continue;
    cplx a0 = amp_[i], a1 = amp_[i | bit];
    amp_[i] = m[0] * a0 + m[1] * a1;
    amp_[i | bit] = m[2] * a0 + m[3] * a1;
  }
}

void StateVector::apply_gate(const Gate& g) {
  check_qubit(g.q0);
  if (g.two_qubit()) {
    check_qubit(g.q1);
    if (g.q0 == g.q1) throw std::invalid_argument("two-qubit gate on a repeated qubit");
  }
  size_t b0 = size_t{1} << g.q0;
  size_t b1 = g.q1 >= 0 ? size_t{1} << g.q1 : 0;
  switch (g.kind) {
    case GateKind::H: {
      const cplx m[4] = {kR, kR, kR, -kR};
      apply_1q(g.q0, m);
      break;
    }
    case GateKind::X:
      for (size_t i = 0; i < amp_.size(); ++i)
        if (!(i & b0)) std::swap(amp_[i], amp_[i | b0]);
      break;
    case GateKind::Y:
      for (size_t i = 0; i < amp_.size(); ++i)
        if (!(i & b0)) {
          cplx a0 = amp_[i], a1 = amp_[i | b0];
          amp_[i] = -kI * a1;
          amp_[i | b0] = kI * a0;
        }
      break;
    case GateKind::Z:
    case GateKind::S:
    case GateKind::Sdg:
    case GateKind::T:
    case GateKind::Tdg: {
      cplx ph = g.kind == GateKind::Z     ? cplx(-1, 0)
                : g.kind == GateKind::S   ? kI
                : g.kind == GateKind::Sdg ? -kI
                : g.kind == GateKind::T   ? std::polar(1.0, M_PI / 4)
                                          : std::polar(1.0, -M_PI / 4);
      for (size_t i = 0; i < amp_.size(); ++i)
        if (i & b0) amp_[i] *= ph;
      break;
    }
    case GateKind::CNOT:
      for (size_t i = 0; i < amp_.size(); ++i)
        if ((i & b0) && !(i & b1)) std::swap(amp_[i], amp_[i | b1]);
      break;
    case GateKind::CZ:
      for (size_t i = 0; i < amp_.size(); ++i)
        if ((i & b0) && (i & b1)) amp_[i] = -amp_[i];
      break;
    case GateKind::SWAP:
      for (size_t i = 0; i < amp_.size(); ++i)
        if ((i & b0) && !(i & b1)) std::swap(amp_[i], amp_[(i ^ b0) | b1]);
      break;
  }
}

void StateVector::apply_gates(const GateSeq& gates) {
  for (const Gate& g : gates) apply_gate(g);
}

void StateVector::apply_clifford(const CliffordOp& c, std::span<const int> qubits) {
  if (c.n() != qubits.size()) throw std::invalid_argument("apply_clifford: qubit count mismatch");
  for (Gate g : to_gates(c)) {
    g.q0 = qubits[g.q0];
    if (g.q1 >= 0) g.q1 = qubits[g.q1];
    apply_gate(g);
  }
}

void StateVector::apply_clifford(const CliffordOp& c) {
  std::vector<int> all = iota_vec(0, n_);
  apply_clifford(c, all);
}

void StateVector::apply_pauli(const PauliOp& p, std::span<const int> qubits) {
  if (p.n() != qubits.size()) throw std::invalid_argument("apply_pauli: qubit count mismatch");
  size_t xmask = 0, zmask = 0;
  for (size_t k = 0; k < qubits.size(); ++k) {
    check_qubit(qubits[k]);
    if (p.x().get(k)) xmask |= size_t{1} << qubits[k];
    if (p.z().get(k)) zmask |= size_t{1} << qubits[k];
  }
  static const cplx ph[4] = {1, kI, -1, -kI};
  cplx g = ph[p.phase()];
  std::vector<cplx> out(amp_.size());
  for (size_t i = 0; i < amp_.size(); ++i) {
    cplx a = amp_[i] * g;
    if (std::popcount(i & zmask) & 1) a = -a;
    out[i ^ xmask] = a;
  }
  amp_ = std::move(out);
}

double StateVector::prob_one(int q) const {
  check_qubit(q);
  size_t bit = size_t{1} << q;
  double p = 0;
  for (size_t i = 0; i < amp_.size(); ++i)
    if (i & bit) p += std::norm(amp_[i]);
  return p;
}

double StateVector::project_z(int q, bool bit) {
  double p1 = prob_one(q);
  double p = bit ? p1 : 1.0 - p1;
  if (p <= 0) throw std::domain_error("project_z onto a zero-probability branch");
  size_t mask = size_t{1} << q;
  double scale = 1.0 / std::sqrt(p);
  for (size_t i = 0; i < amp_.size(); ++i) {
    if (((i & mask) != 0) == bit)
      amp_[i] *= scale;
    else
      amp_[i] = 0;
  }
  return p;
}

bool StateVector::measure_z(int q, Rng& rng) {
  double p1 = std::clamp(prob_one(q), 0.0, 1.0);
  bool out = rng.uniform() < p1;
  project_z(q, out);
  return out;
}

bool StateVector::measure_t(int q, Rng& rng) {
  apply_gate({GateKind::Tdg, q});
  apply_gate({GateKind::H, q});
  return measure_z(q, rng);
}

std::pair<bool, bool> StateVector::bell_measure(int q1, int q2, Rng& rng) {
  if (q1 == q2) throw std::invalid_argument("bell_measure on a repeated qubit");
  apply_gate({GateKind::CNOT, q1, q2});
  apply_gate({GateKind::H, q1});
  bool z = measure_z(q1, rng);
  bool x = measure_z(q2, rng);
  return {x, z};
}

void StateVector::reset(int q, Rng& rng) {
  if (measure_z(q, rng)) apply_gate({GateKind::X, q});
}

void StateVector::append_zeros(int k) {
  if (n_ + k > qubit_cap()) throw CapExceeded(n_ + k);
  n_ += k;
  amp_.resize(size_t{1} << n_, 0.0);
}

void StateVector::append(const StateVector& other) {
  int total = n_ + other.n_;
  if (total > qubit_cap()) throw CapExceeded(total);
  std::vector<cplx> out(size_t{1} << total);
  for (size_t hi = 0; hi < other.amp_.size(); ++hi)
    for (size_t lo = 0; lo < amp_.size(); ++lo) out[(hi << n_) | lo] = other.amp_[hi] * amp_[lo];
  amp_ = std::move(out);
  n_ = total;
}

void StateVector::drop_high_zeros(int k) {
  if (k < 0 || k > n_) throw std::invalid_argument("drop_high_zeros: bad count");
  size_t keep = size_t{1} << (n_ - k);
  double rest = 0;
  for (size_t i = keep; i < amp_.size(); ++i) rest += std::norm(amp_[i]);
  if (rest > 1e-9) throw std::logic_error("drop_high_zeros: qubits are not in |0>");
  amp_.resize(keep);
  n_ -= k;
}

DensityMatrix StateVector::density(std::span<const int> keep) const {
  size_t k = keep.size();
  size_t keep_mask = 0;
  for (int q : keep) {
    check_qubit(q);
    if (keep_mask & (size_t{1} << q)) throw std::invalid_argument("density: repeated qubit");
    keep_mask |= size_t{1} << q;
  }
  std::vector<int> rest;
  for (int q = 0; q < n_; ++q)
    if (!(keep_mask & (size_t{1} << q))) rest.push_back(q);
  Eigen::MatrixXcd a(Eigen::Index{1} << k, Eigen::Index{1} << rest.size());
  for (size_t i = 0; i < amp_.size(); ++i) {
    size_t row = 0, col = 0;
    for (size_t j = 0; j < k; ++j) row |= ((i >> keep[j]) & 1) << j;
    for (size_t j = 0; j < rest.size(); ++j) col |= ((i >> rest[j]) & 1) << j;
    a(row, col) = amp_[i];
  }
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix StateVector::density() const { return DensityMatrix::pure(amp_); }

// ---- functional wrappers ----

StateVector apply_gate(StateVector state, const Gate& g) {
  state.apply_gate(g);
  return state;
}

std::pair<BitVec, StateVector> measure_computational(StateVector state, std::span<const int> qubits, Rng& rng) {
  BitVec out(qubits.size());
  for (size_t i = 0; i < qubits.size(); ++i) out.set(i, state.measure_z(qubits[i], rng));
  return {out, std::move(state)};
}

std::pair<bool, StateVector> measure_t_basis(StateVector state, int q, Rng& rng) {
  bool b = state.measure_t(q, rng);
  return {b, std::move(state)};
}

std::pair<std::pair<bool, bool>, StateVector> bell_measure(StateVector state, int q1, int q2, Rng& rng) {
  auto r = state.bell_measure(q1, q2, rng);
  return {r, std::move(state)};
}

DensityMatrix density_of(const StateVector& state, std::span<const int> keep) { return state.density(keep); }

}  // namespace qmpc
