// SPDX-License-Identifier: Apache-2.0
#include "qmpc/twopqc.hpp"

#include <stdexcept>

#include "registers.hpp"

namespace qmpc {

namespace {

using detail::append_amps;
using detail::append_t;
using detail::append_zeros;
using detail::bits_of;
using detail::concat;
using detail::slice;

struct Ctx {
  FrameState& w;
  const ProtocolParams& p;
  const Adversary* adv;
  Rng& rng;
  nlohmann::json& log;
  bool payloads = false;

  void hook(Role r, Hook h, const Registers& regs) const {
    if (adv && adv->role == r) adv->run(h, w, regs, rng);
  }
  void message(int round, const char* from, int qubits, const char* classical) const {
    log["messages"].push_back({{"round", round}, {"from", from}, {"quantum_qubits", qubits}, {"classical", classical}});
  }
};

struct Round1 {
  CliffordOp c_b;
  std::vector<int> msg;
};

Round1 b_round1(const Ctx& c, const std::vector<int>& x_b) {
  std::vector<int> trap = append_zeros(c.w, c.p.lambda);
  c.hook(Role::B, Hook::BPrepare, {{"B", x_b}, {"Trap_B", trap}});
  Round1 r{sample_clifford(static_cast<size_t>(c.p.n_b + c.p.lambda), c.rng), concat({x_b, trap})};
  c.w.apply_clifford(r.c_b, r.msg);
  c.hook(Role::B, Hook::BMsg1, {{"m_B1", r.msg}});
  if (c.adv && c.adv->role == Role::B && c.adv->on_input_b) c.adv->on_input_b(r.c_b, c.rng);
  c.message(1, "B", static_cast<int>(r.msg.size()), "2pc-first");
  return r;
}

struct Round2 {
  CliffordOp c_a, c_out;
  std::vector<int> msg;
};

Round2 a_round2(const Ctx& c, const std::vector<int>& x_a, const std::vector<int>& m_b1) {
  const ProtocolParams& p = c.p;
  std::vector<int> z = append_zeros(c.w, 2 * p.n_z());
  std::vector<int> trap = append_zeros(c.w, p.lambda);
  std::vector<int> t = append_t(c.w, p.t_total());
  c.hook(Role::A, Hook::APrepare, {{"A", x_a}, {"B", m_b1}, {"Z_A", z}, {"Trap_A", trap}, {"T_A", t}});
  Round2 r{sample_clifford(static_cast<size_t>(p.s()), c.rng),
           sample_clifford(static_cast<size_t>(p.m_a + p.lambda), c.rng), concat({x_a, m_b1, z, trap, t})};
  c.w.apply_clifford(r.c_a, r.msg);
  c.hook(Role::A, Hook::AMsg2, {{"m_A2", r.msg}});
  if (c.adv && c.adv->role == Role::A && c.adv->on_input_a) c.adv->on_input_a(r.c_a, r.c_out, c.rng);
  c.message(2, "A", static_cast<int>(r.msg.size()), "2pc-second");
  return r;
}

// Measures Z_check and Trap_B in the computational basis and T_check in the T basis.
bool run_checks(const Ctx& c, const std::vector<int>& reg) {
  CheckedLayout L(c.p);
  std::vector<bool> z, trap, t;
  for (int q : slice(reg, L.z_check, c.p.n_z())) z.push_back(c.w.measure_z(q, c.rng));
  for (int q : slice(reg, L.trap_b, c.p.lambda)) trap.push_back(c.w.measure_z(q, c.rng));
  for (int q : slice(reg, L.t_check, c.p.lambda)) t.push_back(c.w.measure_t(q, c.rng));
  c.log["checks"] = {{"z_check", bits_of(z)}, {"trap_b", bits_of(trap)}, {"t_check", bits_of(t)}};
  auto zero = [](const std::vector<bool>& v) { return std::find(v.begin(), v.end(), true) == v.end(); };
  return zero(z) && zero(trap) && zero(t);
}

struct Round3 {
  bool abort = false;
  std::vector<int> y_hat, y_b;
};

Round3 b_round3(const Ctx& c, const std::vector<int>& m_a2, const FqOutput& f) {
  const ProtocolParams& p = c.p;
  CheckedLayout L(p);
  c.w.apply_clifford(f.u_dec_check_enc, m_a2);
  c.hook(Role::B, Hook::BDecoded,
         {{"m_inp", slice(m_a2, 0, p.inp_size())},
          {"Z_check", slice(m_a2, L.z_check, p.n_z())},
          {"Trap_B", slice(m_a2, L.trap_b, p.lambda)},
          {"T_check", slice(m_a2, L.t_check, p.lambda)}});
  Round3 r;
  if (!run_checks(c, m_a2)) {
    r.abort = true;
    c.log["abort_b"] = "check";
    return r;
  }
  std::vector<int> live = slice(m_a2, 0, p.inp_size());
  try {
    qgeval_in_place(c.w, live, f.qgc, c.rng);
  } catch (const GarbleAuthError&) {
    r.abort = true;
    c.log["abort_b"] = "garbled-evaluation";
    return r;
  }
  r.y_hat = slice(live, 0, p.m_a + p.lambda);
  r.y_b = slice(live, p.m_a + p.lambda, p.m_b);
  c.hook(Role::B, Hook::BMsg3, {{"y_hat", r.y_hat}});
  c.message(3, "B", static_cast<int>(r.y_hat.size()), "none");
  return r;
}

std::optional<std::vector<int>> a_output(const Ctx& c, const std::vector<int>& y_hat, const CliffordOp& c_out) {
  c.hook(Role::A, Hook::AReceive, {{"y_hat", y_hat}});
  c.w.apply_clifford(inverse(c_out), y_hat);
  std::vector<bool> trap;
  for (int q : slice(y_hat, c.p.m_a, c.p.lambda)) trap.push_back(c.w.measure_z(q, c.rng));
  c.log["trap_a"] = bits_of(trap);
  if (std::find(trap.begin(), trap.end(), true) != trap.end()) {
    c.log["abort_a"] = "trap";
    return std::nullopt;
  }
  return slice(y_hat, 0, c.p.m_a);
}

void log_payloads(const Ctx& c, const FqOutput& f) {
  if (!c.payloads) return;
  c.log["f_q_output"] = {{"u_dec_check_enc", f.u_dec_check_enc.to_hex()}, {"qgc", f.qgc.to_json()}};
}

}  // namespace

CMCircuit ProtocolParams::dist_circuit(const CliffordOp& c_out) const {
  if (c_out.n() != static_cast<size_t>(m_a + lambda)) throw std::invalid_argument("dist_circuit: C_out size mismatch");
  int front = n_a + n_b + q_zeros, base = front + lambda;
  CMCircuit c = cm_unitary(CliffordOp(static_cast<size_t>(base + n_t * lambda)));
  if (n_t > 0) c = cm_then(c, cm_embed_high(distiller.circuit(n_t), base));
  // [A, B, zeros, Trap_A, t] -> [Trap_A, A, B, zeros, t]
  std::vector<int> dest(static_cast<size_t>(base + n_t));
  for (int i = 0; i < base + n_t; ++i) dest[i] = i < front ? i + lambda : i < base ? i - front : i;
  c = cm_then(c, cm_unitary(CliffordOp::permutation(dest)));
  c = cm_then(c, cm_embed_high(q, lambda));
  // [Trap_A, y_A, rest] -> [y_A, Trap_A, rest], then C_out on (y_A, Trap_A).
  int out = lambda + q.output_width();
  std::vector<int> d2(static_cast<size_t>(out));
  for (int i = 0; i < out; ++i) d2[i] = i < lambda ? m_a + i : i < lambda + m_a ? i - lambda : i;
  std::vector<int> head = iota_vec(0, m_a + lambda);
  CliffordOp fin = compose(embed(c_out, static_cast<size_t>(out), head), CliffordOp::permutation(d2));
  return cm_then(c, cm_unitary(fin));
}

int ProtocolParams::label_wires() const {
  int k = q.total_measured();
  if (n_t > 0) k += distiller.circuit(n_t).total_measured();
  return k;
}

QGCParams ProtocolParams::qgc_params() const {
  return QGCParams::of(dist_circuit(CliffordOp(static_cast<size_t>(m_a + lambda))), lambda);
}

void ProtocolParams::validate() const {
  q.validate();
  if (n_a < 0 || n_b < 0 || m_a < 0 || m_b < 0 || q_zeros < 0 || n_t < 0 || lambda < 1)
    throw std::invalid_argument("protocol: negative size");
  if (q.n0() != n_a + n_b + q_zeros + n_t) throw std::invalid_argument("protocol: Q input arity mismatch");
  if (q.output_width() < m_a + m_b) throw std::invalid_argument("protocol: Q output too narrow");
  if (distiller.lambda != lambda) throw std::invalid_argument("protocol: distiller block size must equal lambda");
  if (n_z() < 1) throw std::invalid_argument("protocol: need at least one zero ancilla");
}

nlohmann::json ProtocolParams::to_json() const {
  return {{"n_a", n_a},
          {"n_b", n_b},
          {"m_a", m_a},
          {"m_b", m_b},
          {"q_zeros", q_zeros},
          {"n_z", n_z()},
          {"n_t", n_t},
          {"lambda", lambda},
          {"s", s()},
          {"distiller", distiller.mode == Distiller::Mode::IdentitySelect ? "identity-select" : "bravyi-kitaev"},
          {"Q", q.to_json()}};
}

ProtocolParams ProtocolParams::swap(int lambda, int q_zeros, int n_t) {
  ProtocolParams p;
  p.q = cm_unitary(CliffordOp::from_gate(static_cast<size_t>(2 + q_zeros + n_t), {GateKind::SWAP, 0, 1}));
  p.q_zeros = q_zeros;
  p.n_t = n_t;
  p.lambda = lambda;
  p.distiller = Distiller::identity_select(lambda);
  return p;
}

ProtocolParams ProtocolParams::identity(int lambda) {
  ProtocolParams p = swap(lambda);
  p.q = cm_unitary(CliffordOp(4));
  return p;
}

std::vector<std::string> ProtocolParams::preset_names() {
  return {"swap-min", "swap-std", "swap-sec", "swap-z4", "identity-min"};
}

ProtocolParams ProtocolParams::preset(const std::string& name) {
  if (name == "swap-min") return swap(1);
  if (name == "swap-std") return swap(2);
  if (name == "swap-sec") return swap(4);
  if (name == "swap-z4") return swap(1, 4);
  if (name == "identity-min") return identity(1);
  throw std::invalid_argument("unknown protocol preset '" + name + "'");
}

CheckedLayout::CheckedLayout(const ProtocolParams& p) {
  a = 0;
  b = p.n_a;
  z_inp = b + p.n_b;
  trap_a = z_inp + p.n_z();
  t_inp = trap_a + p.lambda;
  z_check = t_inp + p.n_t * p.lambda;
  trap_b = z_check + p.n_z();
  t_check = trap_b + p.lambda;
}

CliffordOp check_routing(const ProtocolParams& p, const ZeroCheckGadget& zero, const TCheckGadget& tcheck) {
  int nz = p.n_z(), lam = p.lambda;
  if (zero.k() != nz || tcheck.n_t != p.n_t || tcheck.lambda != lam || tcheck.sets != 1)
    throw std::invalid_argument("check_routing: gadget size mismatch");
  CheckedLayout L(p);
  int trap_b_in = p.n_a + p.n_b, z_in = trap_b_in + lam, trap_a_in = z_in + 2 * nz, t_in = trap_a_in + lam;
  std::vector<int> dest(static_cast<size_t>(p.s()));
  for (int i = 0; i < p.n_a + p.n_b; ++i) dest[i] = i;
  for (int i = 0; i < lam; ++i) {
    dest[trap_b_in + i] = L.trap_b + i;
    dest[trap_a_in + i] = L.trap_a + i;
  }
  for (int j = 0; j < 2 * nz; ++j) dest[z_in + j] = j < nz ? L.z_inp + j : L.z_check + j - nz;
  std::vector<int> kept = tcheck.kept_positions(), checked = tcheck.check_positions(0);
  for (size_t i = 0; i < kept.size(); ++i) dest[t_in + kept[i]] = L.t_inp + static_cast<int>(i);
  for (size_t i = 0; i < checked.size(); ++i) dest[t_in + checked[i]] = L.t_check + static_cast<int>(i);
  std::vector<int> zq = iota_vec(z_in, 2 * nz);
  return compose(CliffordOp::permutation(dest), embed(zero.u, static_cast<size_t>(p.s()), zq));
}

FqSample ideal_f_q(const CliffordOp& c_a, const CliffordOp& c_out, const CliffordOp& c_b, const ProtocolParams& p,
                   Rng& rng) {
  size_t s = static_cast<size_t>(p.s());
  if (c_a.n() != s || c_b.n() != static_cast<size_t>(p.n_b + p.lambda) ||
      c_out.n() != static_cast<size_t>(p.m_a + p.lambda))
    throw std::invalid_argument("F[Q]: Clifford size mismatch");
  FqSample f;
  f.zero = ZeroCheckGadget::sample(p.n_z(), rng);
  f.tcheck = TCheckGadget::sample(p.n_t, p.lambda, rng);
  std::vector<int> b_reg = iota_vec(p.n_a, p.n_b + p.lambda);
  f.u_dec_check = compose(check_routing(p, f.zero, f.tcheck), compose(embed(inverse(c_b), s, b_reg), inverse(c_a)));
  QgarbleOptions qopt;
  qopt.enforce_cap = false;
  auto [e0, qgc] = qgarble(p.lambda, p.dist_circuit(c_out), rng, qopt);
  f.e0 = e0;
  // The label zeros are the tail of Z_inp; the garbled input wants them last.
  int inp = p.inp_size(), labels = p.label_wires() * p.lambda, tail = p.n_a + p.n_b + p.q_zeros;
  std::vector<int> dest(static_cast<size_t>(inp));
  for (int i = 0; i < inp; ++i)
    dest[i] = i < tail ? i : i < tail + labels ? inp - labels + (i - tail) : i - labels;
  std::vector<int> head = iota_vec(0, inp);
  CliffordOp enc = embed(compose(e0, CliffordOp::permutation(dest)), s, head);
  f.out = {compose(enc, f.u_dec_check), std::move(qgc)};
  return f;
}

void IdealClassical2PC::input_b(CliffordOp c_b) { c_b_ = std::move(c_b); }

void IdealClassical2PC::input_a(CliffordOp c_a, CliffordOp c_out) {
  c_a_ = std::move(c_a);
  c_out_ = std::move(c_out);
}

const FqOutput& IdealClassical2PC::output(Rng& rng) {
  if (out_) return *out_;
  if (!c_a_ || !c_b_) throw std::logic_error("2PC: output requested before both inputs");
  sample_ = ideal_f_q(*c_a_, *c_out_, *c_b_, p_, rng);
  out_ = sample_->out;
  return *out_;
}

void IdealClassical2PC::program_output(FqOutput out) { out_ = std::move(out); }

std::optional<std::pair<CliffordOp, CliffordOp>> IdealClassical2PC::extract_a() const {
  if (!c_a_) return std::nullopt;
  return std::make_pair(*c_a_, *c_out_);
}

void Adversary::run(Hook h, FrameState& w, const Registers& regs, Rng& rng) const {
  auto it = hooks.find(h);
  if (it != hooks.end()) it->second(w, regs, rng);
}

const std::vector<std::string>& canned_adversary_names() {
  static const std::vector<std::string> names = {"honest", "pauli-tamper-input", "pauli-tamper-output",
                                                 "ancilla-corruptor", "t-state-corruptor"};
  return names;
}

Adversary canned_adversary(const std::string& name, Role role) {
  Adversary a{name, role, {}, {}, {}};
  auto flip_first = [](const char* reg) {
    return [reg](FrameState& w, const Registers& r, Rng&) { w.apply_gate({GateKind::X, r.at(reg)[0]}); };
  };
  auto reset_first = [](const char* reg) {
    return [reg](FrameState& w, const Registers& r, Rng& rng) { w.reset(r.at(reg)[0], rng); };
  };
  bool is_a = role == Role::A;
  if (name == "honest") {
  } else if (name == "pauli-tamper-input") {
    // A hits B's authenticated input; B hits its own ciphertext.
    if (is_a)
      a.hooks[Hook::APrepare] = flip_first("B");
    else
      a.hooks[Hook::BMsg1] = flip_first("m_B1");
  } else if (name == "pauli-tamper-output") {
    if (is_a) {
      a.hooks[Hook::AReceive] = flip_first("y_hat");
    } else {
      a.hooks[Hook::BMsg3] = [](FrameState& w, const Registers& r, Rng& rng) {
        const std::vector<int>& y = r.at("y_hat");
        PauliOp e;
        do e = random_pauli(y.size(), rng);
        while (e.is_identity_up_to_phase());
        w.apply_pauli(e, y);
      };
    }
  } else if (name == "ancilla-corruptor") {
    if (is_a)
      a.hooks[Hook::APrepare] = flip_first("Z_A");
    else
      a.hooks[Hook::BPrepare] = flip_first("Trap_B");
  } else if (name == "t-state-corruptor") {
    if (is_a)
      a.hooks[Hook::APrepare] = reset_first("T_A");
    else
      a.hooks[Hook::BDecoded] = reset_first("T_check");
  } else {
    throw std::invalid_argument("unknown adversary '" + name + "'");
  }
  return a;
}

std::string RunResult::outcome(Rng& rng) {
  auto part = [&](const std::optional<std::vector<int>>& out, bool present) {
    if (!present) return std::string("none");
    if (!out) return std::string("bot");
    std::string s;
    for (int q : *out) s += world.measure_z(q, rng) ? '1' : '0';
    return s;
  };
  return "a=" + part(out_a, a_has_output) + ";b=" + part(out_b, true);
}

Eigen::MatrixXcd RunResult::output_block(Role r) const {
  const auto& out = r == Role::A ? out_a : out_b;
  return detail::with_abort_entry(world, out, r == Role::A ? width_a : width_b);
}

RunResult run_protocol(const std::vector<cplx>& x_a, const std::vector<cplx>& x_b, const ProtocolParams& p,
                       const Adversary* adversary, Rng& rng, RunOptions opt) {
  p.validate();
  RunResult r;
  r.width_a = p.m_a;
  r.width_b = p.m_b;
  r.transcript = {{"world", "real"}, {"params", p.to_json()}, {"messages", nlohmann::json::array()}};
  if (adversary) r.transcript["adversary"] = {{"name", adversary->name}, {"role", adversary->role == Role::A ? "A" : "B"}};
  Ctx c{r.world, p, adversary, rng, r.transcript, opt.log_payloads};
  std::vector<int> xa = append_amps(r.world, x_a), xb = append_amps(r.world, x_b);
  if (xa.size() != static_cast<size_t>(p.n_a) || xb.size() != static_cast<size_t>(p.n_b))
    throw std::invalid_argument("run_protocol: input size mismatch");
  Round1 r1 = b_round1(c, xb);
  Round2 r2 = a_round2(c, xa, r1.msg);
  IdealClassical2PC two_pc(p);
  two_pc.input_b(r1.c_b);
  two_pc.input_a(r2.c_a, r2.c_out);
  const FqOutput& f = two_pc.output(rng);
  log_payloads(c, f);
  Round3 r3 = b_round3(c, r2.msg, f);
  if (!r3.abort) r.out_b = r3.y_b;
  if (opt.mode == RunMode::Nisc) {
    r.a_has_output = false;
    return r;
  }
  if (!r3.abort) r.out_a = a_output(c, r3.y_hat, r2.c_out);
  return r;
}

IdealQuantumOracle::IdealQuantumOracle(const ProtocolParams& p, Role honest, const std::vector<cplx>& honest_input,
                                       FrameState& world)
    : p_(p), honest_(honest), w_(world), input_(append_amps(world, honest_input)) {
  if (input_.size() != static_cast<size_t>(honest == Role::A ? p.n_a : p.n_b))
    throw std::invalid_argument("oracle: honest input size mismatch");
}

std::vector<int> IdealQuantumOracle::query(const std::vector<int>& corrupt_input, Rng& rng) {
  if (queries_++) throw std::logic_error("oracle: queried twice");
  bool honest_a = honest_ == Role::A;
  if (corrupt_input.size() != static_cast<size_t>(honest_a ? p_.n_b : p_.n_a))
    throw std::invalid_argument("oracle: query size mismatch");
  const std::vector<int>& xa = honest_a ? input_ : corrupt_input;
  const std::vector<int>& xb = honest_a ? corrupt_input : input_;
  std::vector<int> live = concat({xa, xb, append_zeros(w_, p_.q_zeros), append_t(w_, p_.n_t)});
  run_cm_in_place(w_, live, p_.q, rng);
  std::vector<int> ya = slice(live, 0, p_.m_a);
  std::vector<int> rest(live.begin() + p_.m_a, live.end());
  if (honest_a) {
    held_ = ya;
    return rest;
  }
  held_ = slice(rest, 0, p_.m_b);
  return ya;
}

void IdealQuantumOracle::deliver(bool ok) { ok_ = ok; }

std::optional<std::vector<int>> IdealQuantumOracle::honest_output() const {
  if (!ok_ || !*ok_ || !queries_) return std::nullopt;
  return held_;
}

SimOutcome sim_a(const Adversary& adv, FrameState& world, const std::vector<int>& x_a, IdealQuantumOracle& oracle,
                 const ProtocolParams& p, Rng& rng) {
  SimOutcome out;
  out.transcript = {{"world", "ideal"}, {"simulator", "A"}, {"messages", nlohmann::json::array()}};
  Ctx c{world, p, &adv, rng, out.transcript};
  // Message 1 encodes dummy zeros in place of B's input.
  CliffordOp c_b = sample_clifford(static_cast<size_t>(p.n_b + p.lambda), rng);
  std::vector<int> m_b1 = append_zeros(world, p.n_b + p.lambda);
  world.apply_clifford(c_b, m_b1);
  c.message(1, "Sim", static_cast<int>(m_b1.size()), "2pc-sim-first");
  Round2 r2 = a_round2(c, x_a, m_b1);
  IdealClassical2PC two_pc(p);
  two_pc.input_b(c_b);
  two_pc.input_a(r2.c_a, r2.c_out);
  auto [c_a, c_out] = *two_pc.extract_a();
  ZeroCheckGadget zero = ZeroCheckGadget::sample(p.n_z(), rng);
  TCheckGadget tcheck = TCheckGadget::sample(p.n_t, p.lambda, rng);
  std::vector<int> b_reg = iota_vec(p.n_a, p.n_b + p.lambda);
  CliffordOp u = compose(check_routing(p, zero, tcheck),
                         compose(embed(inverse(c_b), static_cast<size_t>(p.s()), b_reg), inverse(c_a)));
  world.apply_clifford(u, r2.msg);
  if (!run_checks(c, r2.msg)) {
    oracle.deliver(false);
    out.transcript["abort_sim"] = "check";
    return out;
  }
  CheckedLayout L(p);
  std::vector<int> y_a = oracle.query(slice(r2.msg, L.a, p.n_a), rng);
  std::vector<int> y_hat = concat({y_a, slice(r2.msg, L.trap_a, p.lambda)});
  world.apply_clifford(c_out, y_hat);
  oracle.deliver(true);
  c.message(3, "Sim", static_cast<int>(y_hat.size()), "none");
  out.corrupt_out = a_output(c, y_hat, c_out);
  return out;
}

SimOutcome sim_b(const Adversary& adv, FrameState& world, const std::vector<int>& x_b, IdealQuantumOracle& oracle,
                 const ProtocolParams& p, Rng& rng) {
  SimOutcome out;
  out.transcript = {{"world", "ideal"}, {"simulator", "B"}, {"messages", nlohmann::json::array()}};
  Ctx c{world, p, &adv, rng, out.transcript};
  Round1 r1 = b_round1(c, x_b);
  IdealClassical2PC two_pc(p);
  two_pc.input_b(r1.c_b);
  CliffordOp c_b = *two_pc.extract_b();
  world.apply_clifford(inverse(c_b), r1.msg);
  std::vector<int> trap_b = slice(r1.msg, p.n_b, p.lambda);
  std::vector<int> rest = oracle.query(slice(r1.msg, 0, p.n_b), rng);
  // A's output slot carries an authenticated dummy.
  CliffordOp c_out = sample_clifford(static_cast<size_t>(p.m_a + p.lambda), rng);
  std::vector<int> dummy = append_zeros(world, p.m_a + p.lambda);
  world.apply_clifford(c_out, dummy);
  std::vector<int> live = concat({dummy, rest});
  QuantumGarbledCircuit qgc = qgsim_in_place(world, live, p.qgc_params(), rng);
  CliffordOp u = sample_clifford(static_cast<size_t>(p.s()), rng);
  std::vector<int> m_a2 = concat({live, append_zeros(world, p.n_z()), trap_b, append_t(world, p.lambda)});
  world.apply_clifford(inverse(u), m_a2);
  c.message(2, "Sim", static_cast<int>(m_a2.size()), "2pc-sim-second");
  two_pc.program_output({u, std::move(qgc)});
  Round3 r3 = b_round3(c, m_a2, two_pc.output(rng));
  if (r3.abort) {
    oracle.deliver(false);
    return out;
  }
  world.apply_clifford(inverse(c_out), r3.y_hat);
  bool ok = true;
  for (int q : slice(r3.y_hat, p.m_a, p.lambda)) ok = !world.measure_z(q, rng) && ok;
  oracle.deliver(ok);
  out.transcript["oracle_delivery"] = ok ? "ok" : "abort";
  out.corrupt_out = r3.y_b;
  return out;
}

RunResult ideal_run(const Adversary& adv, const std::vector<cplx>& x_a, const std::vector<cplx>& x_b,
                    const ProtocolParams& p, Rng& rng) {
  p.validate();
  RunResult r;
  r.width_a = p.m_a;
  r.width_b = p.m_b;
  bool corrupt_a = adv.role == Role::A;
  std::vector<int> mine = append_amps(r.world, corrupt_a ? x_a : x_b);
  IdealQuantumOracle oracle(p, corrupt_a ? Role::B : Role::A, corrupt_a ? x_b : x_a, r.world);
  SimOutcome s = corrupt_a ? sim_a(adv, r.world, mine, oracle, p, rng) : sim_b(adv, r.world, mine, oracle, p, rng);
  (corrupt_a ? r.out_a : r.out_b) = s.corrupt_out;
  (corrupt_a ? r.out_b : r.out_a) = oracle.honest_output();
  r.transcript = std::move(s.transcript);
  r.transcript["params"] = p.to_json();
  r.oracle_queries = oracle.queries();
  return r;
}

double empirical_tvd(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
  double na = 0, nb = 0;
  for (const auto& [k, v] : a) na += v;
  for (const auto& [k, v] : b) nb += v;
  if (na == 0 || nb == 0) throw std::invalid_argument("empirical_tvd: empty sample");
  std::map<std::string, double> diff;
  for (const auto& [k, v] : a) diff[k] += v / na;
  for (const auto& [k, v] : b) diff[k] -= v / nb;
  double t = 0;
  for (const auto& [k, d] : diff) t += std::abs(d);
  return t / 2;
}

}  // namespace qmpc
