// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <json.hpp>
#include <span>
#include <vector>

#include "qmpc/qgc.hpp"

namespace qmpc {

struct CheckResult {
  bool pass = false;
  std::vector<int> survivors;
};

// Random invertible linear map on 2k qubits; the last k qubits are the check half.
struct ZeroCheckGadget {
  F2Matrix m;
  CliffordOp u;

  static ZeroCheckGadget sample(int k, Rng& rng);
  static ZeroCheckGadget from_matrix(F2Matrix m);
  int k() const { return static_cast<int>(m.rows() / 2); }
  nlohmann::json to_json() const;
  static ZeroCheckGadget from_json(const nlohmann::json& j);
};

// Applies U_M to the 2k listed qubits and measures the check half; pass iff all zero.
template <QuantumState S>
CheckResult zero_check(const ZeroCheckGadget& g, S& state, std::span<const int> qubits, Rng& rng) {
  int k = g.k();
  if (qubits.size() != static_cast<size_t>(2 * k)) throw std::invalid_argument("zero_check: register size mismatch");
  state.apply_clifford(g.u, qubits);
  CheckResult r{true, {}};
  for (int j = k; j < 2 * k; ++j) r.pass = !state.measure_z(qubits[j], rng) && r.pass;
  r.survivors.assign(qubits.begin(), qubits.begin() + k);
  return r;
}

// Cut-and-choose over (n_T + sets) * lambda T states: slot j moves to position
// perm[j]; the final sets*lambda slots are checked, lambda per set.
struct TCheckGadget {
  int n_t = 0;
  int lambda = 0;
  int sets = 1;
  std::vector<int> perm;

  static TCheckGadget sample(int n_t, int lambda, Rng& rng, int sets = 1);
  int total() const { return (n_t + sets) * lambda; }
  std::vector<int> check_positions(int set) const;
  std::vector<int> kept_positions() const;
  bool valid() const;
  nlohmann::json to_json() const;
  static TCheckGadget from_json(const nlohmann::json& j);
};

// Measures one check set in the T basis; pass iff every outcome is |T>.
template <QuantumState S>
bool t_check_set(const TCheckGadget& g, int set, S& state, std::span<const int> qubits, Rng& rng) {
  if (qubits.size() != static_cast<size_t>(g.total())) throw std::invalid_argument("t_check: register size mismatch");
  bool pass = true;
  for (int pos : g.check_positions(set)) pass = !state.measure_t(qubits[pos], rng) && pass;
  return pass;
}

template <QuantumState S>
CheckResult t_check(const TCheckGadget& g, S& state, std::span<const int> qubits, Rng& rng) {
  CheckResult r{true, {}};
  for (int set = 0; set < g.sets; ++set) r.pass = t_check_set(g, set, state, qubits, rng) && r.pass;
  for (int pos : g.kept_positions()) r.survivors.push_back(qubits[pos]);
  return r;
}

struct Distiller {
  enum class Mode { IdentitySelect, BravyiKitaev15 };
  Mode mode = Mode::IdentitySelect;
  int lambda = 1;  // inputs per output

  static Distiller identity_select(int lambda) { return {Mode::IdentitySelect, lambda}; }
  static Distiller bravyi_kitaev() { return {Mode::BravyiKitaev15, 15}; }
  // C+M circuit from lambda*outputs qubits to outputs qubits. Bravyi-Kitaev
  // circuits accept iff the final layer outcome is zero.
  CMCircuit circuit(int outputs) const;
};

struct DistillResult {
  bool accepted = true;
  std::vector<int> outputs;
};

template <QuantumState S>
DistillResult distill(const Distiller& d, S& state, std::span<const int> block, Rng& rng) {
  if (block.size() % static_cast<size_t>(d.lambda)) throw std::invalid_argument("distill: block size mismatch");
  int outputs = static_cast<int>(block.size()) / d.lambda;
  DistillResult r;
  if (d.mode == Distiller::Mode::IdentitySelect) {
    for (int b = 0; b < outputs; ++b) r.outputs.push_back(block[b * d.lambda]);
    return r;
  }
  if (d.lambda != 15) throw std::invalid_argument("distill: Bravyi-Kitaev needs lambda = 15");
  CMCircuit one = d.circuit(1);
  for (int b = 0; b < outputs; ++b) {
    std::vector<int> live(block.begin() + b * 15, block.begin() + (b + 1) * 15);
    std::vector<uint64_t> outcomes;
    run_cm_in_place(state, live, one, rng, &outcomes);
    r.accepted = r.accepted && outcomes.back() == 0;
    r.outputs.push_back(live[0]);
  }
  return r;
}

// Interactive zero test: the adversary submits 2n qubits (plus a private
// register), sees the blinded check half, and must return the X blinding r.
struct ZtestAdversary {
  int private_qubits = 0;
  std::function<StateVector(int n, Rng&)> prepare;
  std::function<BitVec(StateVector&, std::span<const int> revealed, std::span<const int> priv, Rng&)> respond;
};

struct ZtestRound {
  bool accepted = false;
  double survivor_distance = 0;  // trace distance of the kept half from |0^n>
};

struct ZtestStats {
  int trials = 0;
  int accepts = 0;
  int bad_events = 0;  // accepted with the kept half farther than `far` from |0^n>
  double bad_rate() const { return trials ? bad_events / static_cast<double>(trials) : 0.0; }
};

ZtestRound ztest_round(const ZtestAdversary& adv, int n, const F2Matrix& u, const BitVec& r, const BitVec& s,
                       Rng& rng);
ZtestStats ztest_experiment(const ZtestAdversary& adv, int n, int trials, Rng& rng, double far = 1e-6);

ZtestAdversary honest_ztest_adversary();
// Submits |0^{2n}> with X on one qubit and reads r off the revealed half.
ZtestAdversary x_planting_adversary(int qubit);
// Submits |0^{2n}>, applies a fixed Pauli to the revealed half, reads r off it.
ZtestAdversary pauli_ztest_adversary(PauliOp attack);

}  // namespace qmpc
