// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qmpc/frame_state.hpp"
#include "qmpc/garble.hpp"

namespace qmpc {

// One measure-then-correct layer: measure k qubits, apply f[outcome] to the n survivors.
struct CMLayer {
  int n = 0;
  int k = 0;
  std::map<uint64_t, CliffordOp> f;  // outcome bit j = wire j
  std::optional<CliffordOp> fallback;  // used for outcomes absent from f

  const CliffordOp& lookup(uint64_t outcome) const;
};

// Clifford+measurement circuit: F0, then layers with n_{i-1} = n_i + k_i.
struct CMCircuit {
  CliffordOp f0;
  std::vector<CMLayer> layers;

  int depth() const { return static_cast<int>(layers.size()); }
  int n0() const { return static_cast<int>(f0.n()); }
  int width(int i) const { return i == 0 ? n0() : layers[i - 1].n; }  // n_i
  int output_width() const { return width(depth()); }
  int total_measured() const;
  void validate() const;  // throws std::invalid_argument

  nlohmann::json to_json() const;
  static CMCircuit from_json(const nlohmann::json& j);
};

// Composition helpers. cm_embed_high runs c on the top c.n0() qubits of an
// (extra + c.n0())-qubit register; the low `extra` qubits stay idle.
CMCircuit cm_unitary(CliffordOp c);
CMCircuit cm_embed_high(const CMCircuit& c, int extra);
CMCircuit cm_then(const CMCircuit& first, const CMCircuit& second);

struct QGCParams {
  int n0 = 0;
  std::vector<std::pair<int, int>> layers;  // (n_i, k_i)
  int lambda = 1;

  static QGCParams of(const CMCircuit& q, int lambda);
  int depth() const { return static_cast<int>(layers.size()); }
  int k() const;
  int h(int i) const;  // wires still to be measured after layer i
  int n(int i) const { return i == 0 ? n0 : layers[i - 1].first; }
  int k_at(int i) const { return layers[i - 1].second; }
  int register_size(int i) const { return n(i) + h(i) * lambda; }
  int block_size(int i) const { return k_at(i) * (1 + lambda); }
  GarbleOptions garble_options() const;
  bool operator==(const QGCParams&) const = default;
};

struct QuantumGarbledCircuit {
  QGCParams params;
  CliffordOp d0;
  std::vector<GarbledTable> tables;

  nlohmann::json to_json() const;
  static QuantumGarbledCircuit from_json(const nlohmann::json& j);
};

struct QgarbleOptions {
  bool enforce_cap = true;  // the garbled input must fit the statevector cap
};

// Per-wire (wire, lambda label qubits) blocks; label bits are key bits then the pp bit.
CliffordOp labenc(const std::vector<LabelPair>& labels, int lambda, Rng& rng);
CliffordOp labenc(const std::vector<LabelPair>& labels, int lambda, const std::vector<bool>& z_bits);

// Moves [n_i data | k_i wires | h_i*lambda zeros | k_i*lambda zeros] to
// [n_i data | h_i*lambda zeros | (wire, label) blocks].
CliffordOp layer_routing(const QGCParams& p, int i);

// Deterministic core: e[i] are the layer keys E_0..E_d, z_bits[i] the label
// twirl bits for layer i+1, coins feed the classical garbling.
QuantumGarbledCircuit qgarble_with_keys(int lambda, const CMCircuit& q, const std::vector<CliffordOp>& e,
                                        const std::vector<std::vector<bool>>& z_bits, BitSource& coins);

std::pair<CliffordOp, QuantumGarbledCircuit> qgarble(int lambda, const CMCircuit& q, Rng& rng,
                                                      QgarbleOptions opt = {});

// Labels read off a measured block; throws GarbleAuthError when a wire bit
// disagrees with its label's point-and-permute bit.
std::vector<Label> read_labels(const BitVec& block, int k, int lambda);

CliffordOp open_table(const GarbledTable& table, const std::vector<Label>& labels, int expected_n);

// Applies F0, measures each layer's k_i qubits and applies f_i(outcome).
// live lists the circuit's qubits; on return it lists the n_d output qubits.
// Layer outcomes are appended to `outcomes` when given.
template <QuantumState S>
void run_cm_in_place(S& state, std::vector<int>& live, const CMCircuit& q, Rng& rng,
                     std::vector<uint64_t>* outcomes = nullptr) {
  if (live.size() != static_cast<size_t>(q.n0())) throw std::invalid_argument("run_cm: input size mismatch");
  state.apply_clifford(q.f0, live);
  for (const CMLayer& layer : q.layers) {
    uint64_t outcome = 0;
    for (int j = 0; j < layer.k; ++j)
      outcome |= static_cast<uint64_t>(state.measure_z(live[layer.n + j], rng)) << j;
    if (outcomes) outcomes->push_back(outcome);
    live.resize(static_cast<size_t>(layer.n));
    state.apply_clifford(layer.lookup(outcome), live);
  }
}

// Evaluates the garbled circuit on the garbled input held in live.
template <QuantumState S>
void qgeval_in_place(S& state, std::vector<int>& live, const QuantumGarbledCircuit& qg, Rng& rng) {
  const QGCParams& p = qg.params;
  if (live.size() != static_cast<size_t>(p.register_size(0))) throw std::invalid_argument("qgeval: input size mismatch");
  if (qg.tables.size() != static_cast<size_t>(p.depth())) throw std::invalid_argument("qgeval: table count mismatch");
  CliffordOp d = qg.d0;
  for (int i = 1; i <= p.depth(); ++i) {
    state.apply_clifford(d, live);
    int keep = p.register_size(i), block = p.block_size(i);
    BitVec bits(static_cast<size_t>(block));
    for (int j = 0; j < block; ++j) bits.set(j, state.measure_z(live[keep + j], rng));
    live.resize(static_cast<size_t>(keep));
    d = open_table(qg.tables[i - 1], read_labels(bits, p.k_at(i), p.lambda), keep);
  }
  state.apply_clifford(d, live);
}

// Simulator with explicit keys ds[0..d]: live holds x_out (n_d qubits); on
// return it holds the simulated garbled input.
template <QuantumState S>
QuantumGarbledCircuit qgsim_with_keys(S& state, std::vector<int>& live, const QGCParams& p,
                                      const std::vector<CliffordOp>& ds, BitSource& coins) {
  if (live.size() != static_cast<size_t>(p.n(p.depth()))) throw std::invalid_argument("qgsim: output size mismatch");
  if (ds.size() != static_cast<size_t>(p.depth() + 1)) throw std::invalid_argument("qgsim: key count mismatch");
  QuantumGarbledCircuit out{p, ds[0], std::vector<GarbledTable>(static_cast<size_t>(p.depth()))};
  state.apply_clifford(inverse(ds[p.depth()]), live);
  for (int i = p.depth(); i >= 1; --i) {
    // The evaluator applies whatever it decrypts, so the planted row is D_i itself.
    auto [labels, table] = gsim(p.k_at(i), ds[i].serialize(), p.garble_options(), coins);
    out.tables[i - 1] = std::move(table);
    for (const Label& l : labels) {
      BitVec lb = l.bits();
      int first = state.num_qubits();
      state.append_zeros(1 + p.lambda);
      if (l.pp) state.apply_gate({GateKind::X, first});
      for (size_t t = 0; t < lb.size(); ++t)
        if (lb.get(t)) state.apply_gate({GateKind::X, first + 1 + static_cast<int>(t)});
      for (int t = 0; t <= p.lambda; ++t) live.push_back(first + t);
    }
    state.apply_clifford(inverse(ds[i - 1]), live);
  }
  return out;
}

template <QuantumState S>
QuantumGarbledCircuit qgsim_in_place(S& state, std::vector<int>& live, const QGCParams& p, Rng& rng) {
  std::vector<CliffordOp> ds;
  for (int i = 0; i <= p.depth(); ++i) ds.push_back(sample_clifford(static_cast<size_t>(p.register_size(i)), rng));
  RngBits coins(rng);
  return qgsim_with_keys(state, live, p, ds, coins);
}

// StateVector front ends; measured qubits are removed from the result.
StateVector run_cm(const CMCircuit& q, StateVector x, Rng& rng);
StateVector encode_input(const CliffordOp& e0, StateVector x);
StateVector qgeval(StateVector garbled_input, const QuantumGarbledCircuit& qg, Rng& rng);
std::pair<StateVector, QuantumGarbledCircuit> qgsim(const QGCParams& p, const StateVector& x_out, Rng& rng);

}  // namespace qmpc
