// SPDX-License-Identifier: Apache-2.0
#include "qmpc/frame_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qmpc {

namespace {

const cplx kPhase[4] = {1, cplx(0, 1), -1, cplx(0, -1)};
constexpr double kPrune = 1e-14;

BitVec extend_bits(const BitVec& v, size_t n) {
  BitVec out(n);
  out.assign_slice(0, v);
  return out;
}

PauliOp extend_pauli(const PauliOp& p, size_t n) {
  return PauliOp(extend_bits(p.x(), n), extend_bits(p.z(), n), p.phase());
}

bool parity_and(const BitVec& a, const BitVec& b) { return a.dot(b); }

// Conjugates one tableau row by a Clifford acting on a subset of qubits.
void conj_local(PauliOp& row, const CliffordOp& c, std::span<const int> qubits) {
  PauliOp local = row.restrict(qubits);
  if (local.is_identity_up_to_phase()) return;
  PauliOp img = c.conjugate(local);
  for (size_t k = 0; k < qubits.size(); ++k) {
    row.x().set(qubits[k], img.x().get(k));
    row.z().set(qubits[k], img.z().get(k));
  }
  row.add_phase(img.phase());
}

}  // namespace

FrameState::FrameState(int n) { append_zeros(n); }

void FrameState::check_qubit(int q) const {
  if (q < 0 || q >= n_) throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
}

double FrameState::norm() const {
  double s = 0;
  for (const auto& [k, c] : coef_) s += std::norm(c);
  return std::sqrt(s);
}

void FrameState::append_zeros(int k) {
  if (k < 0) throw std::invalid_argument("negative qubit count");
  size_t n = static_cast<size_t>(n_ + k);
  for (auto* rows : {&destab_, &stab_})
    for (PauliOp& r : *rows) r = extend_pauli(r, n);
  for (int j = 0; j < k; ++j) {
    destab_.push_back(PauliOp::single(n, n_ + j, 'X'));
    stab_.push_back(PauliOp::single(n, n_ + j, 'Z'));
  }
  Terms next;
  if (coef_.empty() && n_ == 0) {
    next.emplace(BitVec(n), 1.0);
  } else {
    for (const auto& [key, c] : coef_) next.emplace(extend_bits(key, n), c);
  }
  coef_ = std::move(next);
  n_ = static_cast<int>(n);
}

void FrameState::append_amplitudes(std::span<const cplx> amps) {
  int k = 0;
  while ((size_t{1} << k) < amps.size()) ++k;
  if (amps.empty() || (size_t{1} << k) != amps.size())
    throw std::invalid_argument("amplitude count must be a power of two");
  int base = n_;
  append_zeros(k);
  // New destabilisers are X on the new qubits, so |v> = D^v |phi> there.
  Terms next;
  for (const auto& [key, c] : coef_)
    for (size_t v = 0; v < amps.size(); ++v) {
      if (std::abs(amps[v]) < kPrune) continue;
      BitVec nk = key;
      for (int j = 0; j < k; ++j) nk.set(base + j, (v >> j) & 1);
      next[nk] += c * amps[v];
    }
  coef_ = std::move(next);
  normalise();
}

FrameState::Decomp FrameState::decompose(const PauliOp& r) const {
  if (r.n() != static_cast<size_t>(n_)) throw std::invalid_argument("decompose: size mismatch");
  Decomp d{BitVec(n_), BitVec(n_), 0};
  PauliOp prod(n_);
  for (int j = 0; j < n_; ++j)
    if (!r.commutes(stab_[j])) {
      d.alpha.set(j, true);
      prod *= destab_[j];
    }
  for (int j = 0; j < n_; ++j)
    if (!r.commutes(destab_[j])) {
      d.beta.set(j, true);
      prod *= stab_[j];
    }
  if (!prod.same_up_to_phase(r)) throw std::logic_error("decompose: tableau does not span the operator");
  d.phase = ((r.phase() - prod.phase()) % 4 + 4) % 4;
  return d;
}

PauliOp FrameState::destab_product(const BitVec& a) const {
  PauliOp prod(n_);
  for (int j = 0; j < n_; ++j)
    if (a.get(j)) prod *= destab_[j];
  return prod;
}

void FrameState::combine(cplx a, cplx b, const PauliOp& p) {
  Decomp d = decompose(p);
  Terms next;
  next.reserve(coef_.size() * 2);
  for (const auto& [key, c] : coef_) {
    if (a != cplx(0)) next[key] += a * c;
    cplx t = b * c * kPhase[d.phase];
    if (parity_and(key, d.beta)) t = -t;
    next[key ^ d.alpha] += t;
  }
  std::erase_if(next, [](const auto& kv) { return std::abs(kv.second) < kPrune; });
  coef_ = std::move(next);
}

void FrameState::normalise() {
  std::erase_if(coef_, [](const auto& kv) { return std::abs(kv.second) < kPrune; });
  double nm = norm();
  if (nm <= 0) throw std::domain_error("FrameState: zero vector");
  for (auto& [k, c] : coef_) c /= nm;
}

void FrameState::apply_gate(const Gate& g) {
  check_qubit(g.q0);
  if (g.two_qubit()) {
    check_qubit(g.q1);
    if (g.q0 == g.q1) throw std::invalid_argument("two-qubit gate on a repeated qubit");
  }
  if (g.kind == GateKind::T || g.kind == GateKind::Tdg) {
    // T = ((1 + w)/2) I + ((1 - w)/2) Z with w = e^{+-i pi/4}.
    cplx w = std::polar(1.0, g.kind == GateKind::T ? M_PI / 4 : -M_PI / 4);
    combine((1.0 + w) / 2.0, (1.0 - w) / 2.0, PauliOp::single(n_, g.q0, 'Z'));
    return;
  }
  for (auto* rows : {&destab_, &stab_})
    for (PauliOp& r : *rows) r.conj_gate(g);
}

void FrameState::apply_gates(const GateSeq& gates) {
  for (const Gate& g : gates) apply_gate(g);
}

void FrameState::apply_clifford(const CliffordOp& c, std::span<const int> qubits) {
  if (c.n() != qubits.size()) throw std::invalid_argument("apply_clifford: qubit count mismatch");
  for (int q : qubits) check_qubit(q);
  for (auto* rows : {&destab_, &stab_})
    for (PauliOp& r : *rows) conj_local(r, c, qubits);
}

void FrameState::apply_clifford(const CliffordOp& c) {
  std::vector<int> all = iota_vec(0, n_);
  apply_clifford(c, all);
}

void FrameState::apply_pauli(const PauliOp& p, std::span<const int> qubits) {
  if (p.n() != qubits.size()) throw std::invalid_argument("apply_pauli: qubit count mismatch");
  for (int q : qubits) check_qubit(q);
  PauliOp full(n_);
  full.embed_from(p, qubits);
  combine(0, 1, full);
}

cplx FrameState::expectation(const PauliOp& p) const {
  Decomp d = decompose(p);
  cplx acc = 0;
  for (const auto& [key, c] : coef_) {
    auto it = coef_.find(key ^ d.alpha);
    if (it == coef_.end()) continue;
    cplx t = std::conj(it->second) * c;
    acc += parity_and(key, d.beta) ? -t : t;
  }
  return acc * kPhase[d.phase];
}

double FrameState::prob_one(int q) const {
  check_qubit(q);
  return std::clamp((1.0 - expectation(PauliOp::single(n_, q, 'Z')).real()) / 2.0, 0.0, 1.0);
}

double FrameState::project_pauli(const PauliOp& o, bool outcome) {
  if (!o.is_hermitian()) throw std::invalid_argument("project_pauli: operator is not Hermitian");
  Decomp d = decompose(o);
  if (d.alpha.none()) {
    // Every term is an eigenvector with eigenvalue (phase) * (-1)^{a.beta}.
    bool base_neg = d.phase == 2;
    Terms kept;
    double p = 0;
    for (const auto& [key, c] : coef_)
      if ((base_neg != parity_and(key, d.beta)) == outcome) {
        kept.emplace(key, c);
        p += std::norm(c);
      }
    if (p <= kPrune * kPrune) throw std::domain_error("project_pauli onto a zero-probability branch");
    coef_ = std::move(kept);
    normalise();
    return p;
  }

  size_t piv = 0;
  while (!d.alpha.get(piv)) ++piv;
  std::vector<PauliOp> old_destab = destab_;
  PauliOp old_sp = stab_[piv];

  for (int i = 0; i < n_; ++i) {
    if (static_cast<size_t>(i) != piv && !destab_[i].commutes(o)) destab_[i] *= old_sp;
    if (static_cast<size_t>(i) != piv && !stab_[i].commutes(o)) stab_[i] *= old_sp;
  }
  destab_[piv] = old_sp;
  stab_[piv] = o;
  if (outcome) stab_[piv].add_phase(2);

  // P D^a |phi> = D^a S_piv^t |phi'> / sqrt(2), t = [D^a anticommutes with o].
  Terms next;
  next.reserve(coef_.size());
  for (const auto& [key, c] : coef_) {
    PauliOp q(n_);
    for (int j = 0; j < n_; ++j)
      if (key.get(j)) q *= old_destab[j];
    if (parity_and(key, d.beta)) q *= old_sp;
    Decomp nd = decompose(q);
    next[nd.alpha] += c * kPhase[nd.phase] * M_SQRT1_2;
  }
  coef_ = std::move(next);
  std::erase_if(coef_, [](const auto& kv) { return std::abs(kv.second) < kPrune; });
  double p = norm();
  p *= p;
  if (p <= kPrune * kPrune) throw std::domain_error("project_pauli onto a zero-probability branch");
  normalise();
  return p;
}

bool FrameState::measure_pauli(const PauliOp& o, Rng& rng) {
  double p1 = std::clamp((1.0 - expectation(o).real()) / 2.0, 0.0, 1.0);
  bool out = rng.uniform() < p1;
  project_pauli(o, out);
  return out;
}

double FrameState::project_z(int q, bool bit) {
  check_qubit(q);
  return project_pauli(PauliOp::single(n_, q, 'Z'), bit);
}

bool FrameState::measure_z(int q, Rng& rng) {
  check_qubit(q);
  return measure_pauli(PauliOp::single(n_, q, 'Z'), rng);
}

bool FrameState::measure_t(int q, Rng& rng) {
  apply_gate({GateKind::Tdg, q});
  apply_gate({GateKind::H, q});
  return measure_z(q, rng);
}

std::pair<bool, bool> FrameState::bell_measure(int q1, int q2, Rng& rng) {
  if (q1 == q2) throw std::invalid_argument("bell_measure on a repeated qubit");
  apply_gate({GateKind::CNOT, q1, q2});
  apply_gate({GateKind::H, q1});
  bool z = measure_z(q1, rng);
  bool x = measure_z(q2, rng);
  return {x, z};
}

void FrameState::reset(int q, Rng& rng) {
  if (measure_z(q, rng)) apply_gate({GateKind::X, q});
}

DensityMatrix FrameState::density(std::span<const int> keep) const {
  size_t k = keep.size();
  for (int q : keep) check_qubit(q);
  if (k > 10) throw std::invalid_argument("density: too many qubits for Pauli tomography");
  size_t d = size_t{1} << k;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (uint64_t xs = 0; xs < d; ++xs)
    for (uint64_t zs = 0; zs < d; ++zs) {
      PauliOp local = PauliOp::from_xz(BitVec::from_uint(k, xs), BitVec::from_uint(k, zs));
      PauliOp full(n_);
      full.embed_from(local, keep);
      cplx e = expectation(full);
      if (std::abs(e) < 1e-15) continue;
      // Hermitian form: i^{|x&z|} X^x Z^z.
      cplx ph = kPhase[std::popcount(xs & zs) % 4];
      for (uint64_t v = 0; v < d; ++v) {
        double sign = (std::popcount(zs & v) & 1) ? -1.0 : 1.0;
        rho(v ^ xs, v) += e * ph * sign;
      }
    }
  rho /= static_cast<double>(d);
  return DensityMatrix(rho);
}

bool FrameState::tableau_valid() const {
  for (int i = 0; i < n_; ++i) {
    if (!destab_[i].is_hermitian() || !stab_[i].is_hermitian()) return false;
    for (int j = 0; j < n_; ++j) {
      if (!destab_[i].commutes(destab_[j]) || !stab_[i].commutes(stab_[j])) return false;
      if (destab_[i].commutes(stab_[j]) != (i != j)) return false;
    }
  }
  return true;
}

}  // namespace qmpc
