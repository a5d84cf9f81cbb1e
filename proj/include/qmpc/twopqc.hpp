// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmpc/checks.hpp"

namespace qmpc {

// Two-party functionality Q: inputs (x_A, x_B, zero ancillas, T states);
// outputs (y_A, y_B, discarded). Discarded outputs stay with B.
struct ProtocolParams {
  CMCircuit q;
  int n_a = 1, n_b = 1, m_a = 1, m_b = 1;
  int q_zeros = 1;  // zero ancillas consumed by Q
  int n_t = 1;      // T states consumed by Q
  int lambda = 1;
  Distiller distiller;

  // Distils the T block, runs Q, then authenticates (y_A, trap_A) under c_out.
  // Input (A, B, zeros, Trap_A, T_inp); output (y_hat_A, y_B, discarded).
  CMCircuit dist_circuit(const CliffordOp& c_out) const;
  int label_wires() const;  // wires measured by dist_circuit
  // Zero ancillas per half of Z_A: Q's own plus the garbled-input label qubits.
  int n_z() const { return q_zeros + label_wires() * lambda; }
  int t_total() const { return (n_t + 1) * lambda; }
  int inp_size() const { return n_a + n_b + n_z() + lambda + n_t * lambda; }
  int s() const { return n_a + (n_b + lambda) + (2 * n_z() + lambda) + t_total(); }
  QGCParams qgc_params() const;
  void validate() const;
  nlohmann::json to_json() const;

  static ProtocolParams swap(int lambda, int q_zeros = 1, int n_t = 1);
  static ProtocolParams identity(int lambda);
  static ProtocolParams preset(const std::string& name);  // throws std::invalid_argument
  static std::vector<std::string> preset_names();
};

// Registers after U_dec-check: (A, B, Z_inp, Trap_A, T_inp, Z_check, Trap_B, T_check).
struct CheckedLayout {
  int a, b, z_inp, trap_a, t_inp, z_check, trap_b, t_check;  // offsets
  explicit CheckedLayout(const ProtocolParams& p);
};

// U_check on (A, B, Trap_B, Z_A, Trap_A, T_A): applies M to Z_A, permutes T_A,
// and routes everything to the checked layout.
CliffordOp check_routing(const ProtocolParams& p, const ZeroCheckGadget& zero, const TCheckGadget& tcheck);

struct FqOutput {
  CliffordOp u_dec_check_enc;  // s qubits
  QuantumGarbledCircuit qgc;
};

struct FqSample {
  ZeroCheckGadget zero;
  TCheckGadget tcheck;
  CliffordOp u_dec_check;
  CliffordOp e0;
  FqOutput out;
};

FqSample ideal_f_q(const CliffordOp& c_a, const CliffordOp& c_out, const CliffordOp& c_b, const ProtocolParams& p,
                   Rng& rng);

// Trusted classical two-party computation. The trapdoor accessors are for
// simulators only.
class IdealClassical2PC {
 public:
  explicit IdealClassical2PC(const ProtocolParams& p) : p_(p) {}
  void input_b(CliffordOp c_b);
  void input_a(CliffordOp c_a, CliffordOp c_out);
  const FqOutput& output(Rng& rng);  // B's output; computed once
  void program_output(FqOutput out);

  const std::optional<CliffordOp>& extract_b() const { return c_b_; }
  std::optional<std::pair<CliffordOp, CliffordOp>> extract_a() const;
  const std::optional<FqSample>& sample() const { return sample_; }

 private:
  const ProtocolParams& p_;
  std::optional<CliffordOp> c_b_, c_a_, c_out_;
  std::optional<FqSample> sample_;
  std::optional<FqOutput> out_;
};

enum class Role { A, B };
enum class Hook { APrepare, AMsg2, AReceive, BPrepare, BMsg1, BDecoded, BMsg3 };
using Registers = std::map<std::string, std::vector<int>>;
using HookFn = std::function<void(FrameState&, const Registers&, Rng&)>;

// A corrupted party runs the honest role program with these deviations.
struct Adversary {
  std::string name = "honest";
  Role role = Role::A;
  std::map<Hook, HookFn> hooks;
  std::function<void(CliffordOp& c_a, CliffordOp& c_out, Rng&)> on_input_a;
  std::function<void(CliffordOp& c_b, Rng&)> on_input_b;

  void run(Hook h, FrameState& w, const Registers& regs, Rng& rng) const;
};

// honest, pauli-tamper-input, pauli-tamper-output, ancilla-corruptor, t-state-corruptor
Adversary canned_adversary(const std::string& name, Role role);
const std::vector<std::string>& canned_adversary_names();

enum class RunMode { BothOutput, Nisc };

struct RunOptions {
  RunMode mode = RunMode::BothOutput;
  bool log_payloads = false;  // hex Clifford and table payloads in the transcript
};

// Output registers in the shared world state; nullopt is abort.
struct RunResult {
  FrameState world;
  std::optional<std::vector<int>> out_a, out_b;
  bool a_has_output = true;  // false in NISC mode
  int width_a = 0, width_b = 0;
  nlohmann::json transcript;
  int oracle_queries = 0;

  // Measures each output in the computational basis: "a=<bits|bot|none>;b=..."
  std::string outcome(Rng& rng);
  // Output density padded with a trailing abort entry, so blocks of aborted
  // and accepted runs can be averaged.
  Eigen::MatrixXcd output_block(Role r) const;
};

RunResult run_protocol(const std::vector<cplx>& x_a, const std::vector<cplx>& x_b, const ProtocolParams& p,
                       const Adversary* adversary, Rng& rng, RunOptions opt = {});

// Ideal functionality I[x_honest]: takes the corrupted party's input, runs Q
// on (x_A, x_B, 0, T), hands back the corrupted party's outputs, and releases
// the honest party's output on ok.
class IdealQuantumOracle {
 public:
  IdealQuantumOracle(const ProtocolParams& p, Role honest, const std::vector<cplx>& honest_input, FrameState& world);
  std::vector<int> query(const std::vector<int>& corrupt_input, Rng& rng);
  void deliver(bool ok);
  std::optional<std::vector<int>> honest_output() const;
  int queries() const { return queries_; }

 private:
  const ProtocolParams& p_;
  Role honest_;
  FrameState& w_;
  std::vector<int> input_;
  std::vector<int> held_;
  std::optional<bool> ok_;
  int queries_ = 0;
};

// Simulators: they see the corrupted party's input register and the oracle,
// never the honest party's input. The result is the corrupted party's output.
struct SimOutcome {
  std::optional<std::vector<int>> corrupt_out;
  nlohmann::json transcript;
};
SimOutcome sim_a(const Adversary& adv, FrameState& world, const std::vector<int>& x_a, IdealQuantumOracle& oracle,
                 const ProtocolParams& p, Rng& rng);
SimOutcome sim_b(const Adversary& adv, FrameState& world, const std::vector<int>& x_b, IdealQuantumOracle& oracle,
                 const ProtocolParams& p, Rng& rng);

// Ideal world: the oracle holds the honest input and the simulator for the
// adversary's role plays against it.
RunResult ideal_run(const Adversary& adv, const std::vector<cplx>& x_a, const std::vector<cplx>& x_b,
                    const ProtocolParams& p, Rng& rng);

// Total variation distance between two empirical distributions.
double empirical_tvd(const std::map<std::string, int>& a, const std::map<std::string, int>& b);

}  // namespace qmpc
