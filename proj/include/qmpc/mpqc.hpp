// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qmpc/twopqc.hpp"

namespace qmpc {

// n-party functionality Q on (x_1..x_n, zero ancillas, T states); party i
// receives the i-th block of the first sum(l) outputs. Extra outputs stay with P1.
struct MpqcParams {
  CMCircuit q;
  std::vector<int> m, l;  // per-party input and output widths
  int q_zeros = 0;
  int n_t = 0;
  int lambda = 1;
  Distiller distiller;

  int n() const { return static_cast<int>(m.size()); }
  int m_total() const;
  int l_total() const;
  // Distils T states, decodes each C_inp[i] and checks its traps (a failure
  // flips every output trap), runs Q, then encodes output i under C_out[i].
  // Input (N, Q zeros, output trap zeros, T); output (C_out[i](y_i, 0^lambda))_i then the rest.
  CMCircuit dist_circuit(const std::vector<CliffordOp>& c_inp, const std::vector<CliffordOp>& c_out) const;
  int label_wires() const;
  int k0() const { return q_zeros + n() * lambda + label_wires() * lambda; }
  int k_t() const { return n_t * lambda; }
  int n_width() const { return m_total() + n() * lambda; }
  int v() const { return n_width() + 2 * (k0() + n() * lambda) + k_t() + n() * lambda; }
  int enc_size() const { return n_width() + k0() + k_t(); }  // (N, Z_inp, T_inp)
  QGCParams qgc_params() const;
  void validate() const;
  nlohmann::json to_json() const;

  static MpqcParams cyclic_shift(int n, int lambda);
  static MpqcParams identity(int n, int lambda);
  static MpqcParams preset(const std::string& name);  // throws std::invalid_argument
  static std::vector<std::string> preset_names();
};

// Offsets in the v-qubit circle register once U_test has been applied:
// (N, Z_inp, T_inp, Z_test, T_test_1, ..., T_test_n); each T_test_i is (T half, Z half).
struct TestedLayout {
  int z_inp, t_inp, z_test;
  std::vector<int> t_test;
  explicit TestedLayout(const MpqcParams& p);
};

struct TeleportRecord {
  BitVec x, z;
};

struct ChainResult {
  std::vector<int> arrived;
  std::vector<TeleportRecord> hops;  // hop i leaves party i
};

// Party 1 applies cs[0] to reg and teleports it to party 2, which applied
// cs[1] to its receiving halves beforehand, and so on; party n teleports back
// to party 1. All EPR pairs exist before any Bell measurement.
// after_clifford(i, halves) runs right after party i applies cs[i].
ChainResult teleport_chain(FrameState& w, const std::vector<int>& reg, const std::vector<CliffordOp>& cs, Rng& rng,
                           const std::function<void(int, const std::vector<int>&)>& after_clifford = {});

// Undoes a chain: C_1^dag X^x1 Z^z1 ... C_n^dag X^xn Z^zn.
CliffordOp chain_decoder(const std::vector<CliffordOp>& cs, const std::vector<TeleportRecord>& hops);

// X^x Z^z as a Clifford.
CliffordOp pauli_clifford(const BitVec& x, const BitVec& z);

struct ProtocolViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Trusted reactive classical MPC. Each level accepts inputs only after the
// previous level's outputs exist; once the abort latch is set every later
// output is bottom.
class ReactiveMpc {
 public:
  ReactiveMpc(const MpqcParams& p, Rng& rng);

  int level() const { return level_; }
  void offline1(int party, CliffordOp c_circle);
  void offline2(int party, TeleportRecord circle);
  void online1(int party, TeleportRecord inp, CliffordOp c_inp);
  const CliffordOp& u_test() const;  // for P1
  void online2(const BitVec& r_prime);
  const CliffordOp& u_garble() const;  // for P1
  const QuantumGarbledCircuit& qgc() const;
  const CliffordOp& c_t(int party) const;
  void online3(int party, bool abort_vote);
  std::optional<CliffordOp> c_out(int party) const;
  bool aborted() const { return aborted_; }

  const BitVec& r() const { return r_; }  // for tests

 private:
  void require(int level, int party) const;
  void advance_if_full(int level);
  void finish_online1();
  void finish_online2();

  const MpqcParams& p_;
  Rng& rng_;
  int level_ = 0;
  std::vector<std::set<int>> seen_;
  BitVec r_, s_;
  CliffordOp u_enc_;
  std::vector<CliffordOp> c_t_, c_out_;
  std::vector<CliffordOp> c_circle_, c_inp_;
  std::vector<TeleportRecord> circle_, inp_;
  CliffordOp u_test_, u_garble_;
  std::optional<QuantumGarbledCircuit> qgc_;
  bool aborted_ = false;
};

enum class MpqcHook { CircleApplied, InputEncoded, Tested, OutputsReady, TStateReceived, OutputReceived };
using MpqcHookFn = std::function<void(int party, FrameState&, const Registers&, Rng&)>;

struct MpqcAdversary {
  std::string name = "honest";
  std::set<int> parties;  // corrupted parties, 0-based
  std::map<MpqcHook, MpqcHookFn> hooks;
  bool vote_abort = false;

  bool corrupts(int party) const { return parties.count(party) > 0; }
};

// honest, circle-pauli, abort-vote, output-tamper
MpqcAdversary canned_mpqc_adversary(const std::string& name, int party);
const std::vector<std::string>& canned_mpqc_adversary_names();

struct MpqcResult {
  FrameState world;
  std::vector<std::optional<std::vector<int>>> outputs;  // nullopt is abort
  bool z_test_passed = true;
  std::vector<bool> votes;     // abort votes at the last online round
  std::vector<bool> released;  // C_out handed to the party
  std::vector<int> widths;     // output qubits per party
  nlohmann::json transcript;

  // Measures each output in the computational basis: "p1=<bits|bot>;p2=..."
  std::string outcome(Rng& rng);
  // Output density with a trailing abort entry.
  Eigen::MatrixXcd output_block(int party) const;
};

MpqcResult run_mpqc(const std::vector<std::vector<cplx>>& inputs, const MpqcParams& p, const MpqcAdversary* adversary,
                    Rng& rng);

}  // namespace qmpc
