// SPDX-License-Identifier: Apache-2.0
#include "qmpc/checks.hpp"

#include <algorithm>
#include <numeric>

namespace qmpc {

namespace {

constexpr int kBkSyndromes = 4;
constexpr int kBkCosetBits = 10;

// Column p of the simplex generator is p + 1 written in binary.
BitVec simplex_row(int i) {
  BitVec r(15);
  for (int p = 0; p < 15; ++p) r.set(p, ((p + 1) >> i) & 1);
  return r;
}

// Columns: all-ones, the four simplex rows, then unit vectors completing a basis.
F2Matrix bk_encoding_map() {
  std::vector<BitVec> cols;
  BitVec ones(15);
  for (int p = 0; p < 15; ++p) ones.set(p, true);
  cols.push_back(ones);
  for (int i = 0; i < kBkSyndromes; ++i) cols.push_back(simplex_row(i));
  auto rank_of = [](const std::vector<BitVec>& vs) {
    F2Matrix m(vs.size(), 15);
    for (size_t r = 0; r < vs.size(); ++r) m.row(r) = vs[r];
    return m.rank();
  };
  for (int p = 0; p < 15 && cols.size() < 15; ++p) {
    BitVec e(15);
    e.set(p, true);
    cols.push_back(e);
    if (rank_of(cols) != cols.size()) cols.pop_back();
  }
  F2Matrix m(15, 15);
  for (size_t c = 0; c < 15; ++c)
    for (size_t r = 0; r < 15; ++r) m.set(r, c, cols[c].get(r));
  return m;
}

// Undoes the coset-dependent phase left on (logical, syndrome) qubits after
// decoding, then rotates the syndrome qubits back to the computational basis.
CliffordOp bk_coset_correction(const F2Matrix& enc, uint64_t coset) {
  BitVec w(15);
  for (int j = 0; j < kBkCosetBits; ++j)
    if ((coset >> j) & 1)
      for (int r = 0; r < 15; ++r)
        if (enc.get(r, 5 + j)) w.flip(r);
  std::vector<BitVec> y;
  for (int j = 0; j <= kBkSyndromes; ++j) {
    BitVec col(15);
    for (int r = 0; r < 15; ++r) col.set(r, enc.get(r, j));
    y.push_back(col & w);
  }
  GateSeq gates;
  for (int j = 0; j <= kBkSyndromes; ++j)
    for (size_t t = 0; t < y[j].popcount() % 4; ++t) gates.push_back({GateKind::S, j});
  for (int j = 0; j <= kBkSyndromes; ++j)
    for (int k = j + 1; k <= kBkSyndromes; ++k)
      if ((y[j] & y[k]).popcount() & 1) gates.push_back({GateKind::CZ, j, k});
  for (int j = 1; j <= kBkSyndromes; ++j) gates.push_back({GateKind::H, j});
  return CliffordOp::from_gates(1 + kBkSyndromes, gates);
}

CMCircuit bk_circuit() {
  F2Matrix enc = bk_encoding_map();
  CMCircuit q;
  q.f0 = CliffordOp::from_linear_map(enc.inverse());
  CMLayer cosets{1 + kBkSyndromes, kBkCosetBits, {}, std::nullopt};
  for (uint64_t c = 0; c < (uint64_t{1} << kBkCosetBits); ++c) cosets.f[c] = bk_coset_correction(enc, c);
  q.layers.push_back(std::move(cosets));
  // Transversal T acts as logical T-dagger; S restores T|+>.
  q.layers.push_back({1, kBkSyndromes, {}, CliffordOp::from_gate(1, {GateKind::S, 0})});
  return q;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(static_cast<size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(static_cast<uint64_t>(i) + 1)]);
  return p;
}

}  // namespace

ZeroCheckGadget ZeroCheckGadget::from_matrix(F2Matrix m) {
  if (m.rows() % 2 || !m.invertible()) throw std::invalid_argument("zero check: need an invertible 2k x 2k matrix");
  CliffordOp u = CliffordOp::from_linear_map(m);
  return {std::move(m), std::move(u)};
}

ZeroCheckGadget ZeroCheckGadget::sample(int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("zero check: k must be positive");
  return from_matrix(sample_gl(static_cast<size_t>(2 * k), rng));
}

nlohmann::json ZeroCheckGadget::to_json() const { return {{"M", m.serialize()}}; }

ZeroCheckGadget ZeroCheckGadget::from_json(const nlohmann::json& j) {
  return from_matrix(F2Matrix::deserialize(j.at("M").get<std::string>()));
}

TCheckGadget TCheckGadget::sample(int n_t, int lambda, Rng& rng, int sets) {
  if (n_t < 0 || lambda < 1 || sets < 1) throw std::invalid_argument("t check: bad parameters");
  TCheckGadget g{n_t, lambda, sets, {}};
  g.perm = random_permutation(g.total(), rng);
  return g;
}

std::vector<int> TCheckGadget::check_positions(int set) const {
  if (set < 0 || set >= sets) throw std::out_of_range("t check: no such check set");
  std::vector<int> out;
  for (int j = 0; j < lambda; ++j) out.push_back(perm[(n_t + set) * lambda + j]);
  return out;
}

std::vector<int> TCheckGadget::kept_positions() const { return {perm.begin(), perm.begin() + n_t * lambda}; }

bool TCheckGadget::valid() const {
  if (perm.size() != static_cast<size_t>(total())) return false;
  std::vector<int> s = perm;
  std::sort(s.begin(), s.end());
  for (int i = 0; i < total(); ++i)
    if (s[i] != i) return false;
  return true;
}

nlohmann::json TCheckGadget::to_json() const {
  return {{"n_t", n_t}, {"lambda", lambda}, {"sets", sets}, {"perm", perm}};
}

TCheckGadget TCheckGadget::from_json(const nlohmann::json& j) {
  TCheckGadget g{j.at("n_t").get<int>(), j.at("lambda").get<int>(), j.value("sets", 1),
                 j.at("perm").get<std::vector<int>>()};
  if (!g.valid()) throw std::invalid_argument("t check: permutation invalid");
  return g;
}

CMCircuit Distiller::circuit(int outputs) const {
  if (outputs < 1) throw std::invalid_argument("distill: need at least one output");
  if (mode == Mode::BravyiKitaev15) {
    if (lambda != 15) throw std::invalid_argument("distill: Bravyi-Kitaev needs lambda = 15");
    if (outputs != 1) throw std::invalid_argument("distill: Bravyi-Kitaev circuit is built per output");
    static const CMCircuit bk = bk_circuit();
    return bk;
  }
  if (lambda < 1) throw std::invalid_argument("distill: lambda must be positive");
  int n0 = lambda * outputs;
  if (lambda == 1) return {CliffordOp(static_cast<size_t>(n0)), {}};
  std::vector<int> dest(static_cast<size_t>(n0));
  int next = outputs;
  for (int q = 0; q < n0; ++q) dest[q] = q % lambda == 0 ? q / lambda : next++;
  CMCircuit c{CliffordOp::permutation(dest), {}};
  c.layers.push_back({outputs, n0 - outputs, {}, CliffordOp(static_cast<size_t>(outputs))});
  return c;
}

ZtestRound ztest_round(const ZtestAdversary& adv, int n, const F2Matrix& u, const BitVec& r, const BitVec& s,
                       Rng& rng) {
  if (u.rows() != static_cast<size_t>(2 * n) || r.size() != static_cast<size_t>(n) || s.size() != static_cast<size_t>(n))
    throw std::invalid_argument("ztest: parameter size mismatch");
  StateVector state = adv.prepare(n, rng);
  if (state.num_qubits() != 2 * n + adv.private_qubits) throw std::invalid_argument("ztest: adversary state size");
  std::vector<int> both = iota_vec(0, 2 * n), kept = iota_vec(0, n), revealed = iota_vec(n, n),
                   priv = iota_vec(2 * n, adv.private_qubits);
  state.apply_clifford(CliffordOp::from_linear_map(u), both);
  state.apply_pauli(PauliOp(r, s, 0), revealed);
  BitVec guess = adv.respond(state, revealed, priv, rng);
  ZtestRound out;
  out.accepted = guess == r;
  out.survivor_distance = trace_distance(state.density(kept), DensityMatrix::basis_state(n, 0));
  return out;
}

ZtestStats ztest_experiment(const ZtestAdversary& adv, int n, int trials, Rng& rng, double far) {
  ZtestStats st;
  for (int t = 0; t < trials; ++t) {
    F2Matrix u = sample_gl(static_cast<size_t>(2 * n), rng);
    BitVec r(static_cast<size_t>(n)), s(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      r.set(j, rng.bit());
      s.set(j, rng.bit());
    }
    ZtestRound round = ztest_round(adv, n, u, r, s, rng);
    ++st.trials;
    st.accepts += round.accepted;
    st.bad_events += round.accepted && round.survivor_distance > far;
  }
  return st;
}

namespace {

BitVec read_revealed(StateVector& state, std::span<const int> revealed, Rng& rng) {
  BitVec out(revealed.size());
  for (size_t j = 0; j < revealed.size(); ++j) out.set(j, state.measure_z(revealed[j], rng));
  return out;
}

}  // namespace

ZtestAdversary honest_ztest_adversary() { return pauli_ztest_adversary(PauliOp()); }

ZtestAdversary x_planting_adversary(int qubit) {
  ZtestAdversary a;
  a.prepare = [qubit](int n, Rng&) {
    StateVector s(2 * n);
    s.apply_gate({GateKind::X, qubit});
    return s;
  };
  a.respond = [](StateVector& s, std::span<const int> revealed, std::span<const int>, Rng& rng) {
    return read_revealed(s, revealed, rng);
  };
  return a;
}

ZtestAdversary pauli_ztest_adversary(PauliOp attack) {
  ZtestAdversary a;
  a.prepare = [](int n, Rng&) { return StateVector(2 * n); };
  a.respond = [attack](StateVector& s, std::span<const int> revealed, std::span<const int>, Rng& rng) {
    if (attack.n() == revealed.size()) s.apply_pauli(attack, revealed);
    return read_revealed(s, revealed, rng);
  };
  return a;
}

}  // namespace qmpc
