// SPDX-License-Identifier: Apache-2.0
#include "qmpc/mpqc.hpp"

#include <numeric>
#include <stdexcept>

#include "registers.hpp"

namespace qmpc {

using detail::append_amps;
using detail::append_t;
using detail::append_zeros;
using detail::bits_of;
using detail::concat;
using detail::slice;

namespace {

constexpr int kMaxTrapWires = 12;  // garbled table rows grow as 2^(n*lambda)

std::pair<std::vector<int>, std::vector<int>> epr_pairs(FrameState& w, int k) {
  std::vector<int> r, s;
  int first = w.num_qubits();
  w.append_zeros(2 * k);
  for (int j = 0; j < k; ++j) {
    int a = first + 2 * j;
    w.apply_gate({GateKind::H, a});
    w.apply_gate({GateKind::CNOT, a, a + 1});
    r.push_back(a);
    s.push_back(a + 1);
  }
  return {r, s};
}

TeleportRecord bell_all(FrameState& w, const std::vector<int>& from, const std::vector<int>& via, Rng& rng) {
  TeleportRecord t{BitVec(from.size()), BitVec(from.size())};
  for (size_t j = 0; j < from.size(); ++j) {
    auto [x, z] = w.bell_measure(from[j], via[j], rng);
    t.x.set(j, x);
    t.z.set(j, z);
  }
  return t;
}

std::vector<int> prefix_sums(const std::vector<int>& widths, int extra) {
  std::vector<int> off(widths.size() + 1, 0);
  for (size_t i = 0; i < widths.size(); ++i) off[i + 1] = off[i] + widths[i] + extra;
  return off;
}

}  // namespace

int MpqcParams::m_total() const { return std::accumulate(m.begin(), m.end(), 0); }
int MpqcParams::l_total() const { return std::accumulate(l.begin(), l.end(), 0); }

int MpqcParams::label_wires() const {
  int k = q.total_measured() + n() * lambda;
  if (n_t > 0) k += distiller.circuit(n_t).total_measured();
  return k;
}

CMCircuit MpqcParams::dist_circuit(const std::vector<CliffordOp>& c_inp, const std::vector<CliffordOp>& c_out) const {
  const int np = n(), lam = lambda, mt = m_total(), nw = n_width(), traps = np * lam;
  if (c_inp.size() != static_cast<size_t>(np) || c_out.size() != static_cast<size_t>(np))
    throw std::invalid_argument("dist_circuit: need one input and one output Clifford per party");
  for (int i = 0; i < np; ++i)
    if (c_inp[i].n() != static_cast<size_t>(m[i] + lam) || c_out[i].n() != static_cast<size_t>(l[i] + lam))
      throw std::invalid_argument("dist_circuit: Clifford size mismatch");
  const int zeros = q_zeros + traps, base = nw + zeros;
  CMCircuit c = cm_unitary(CliffordOp(static_cast<size_t>(base + k_t())));
  if (n_t > 0) c = cm_then(c, cm_embed_high(distiller.circuit(n_t), base));

  // [N, zeros, t] -> decode each block -> [x, Q zeros, output traps, t | input traps]
  const int w1 = base + n_t, keep = w1 - traps;
  std::vector<int> in_off = prefix_sums(m, lam), x_off = prefix_sums(m, 0);
  CliffordOp dec(static_cast<size_t>(w1));
  std::vector<int> dest(static_cast<size_t>(w1));
  for (int i = 0; i < np; ++i) {
    dec = compose(embed(inverse(c_inp[i]), static_cast<size_t>(w1), iota_vec(in_off[i], m[i] + lam)), dec);
    for (int j = 0; j < m[i]; ++j) dest[in_off[i] + j] = x_off[i] + j;
    for (int t = 0; t < lam; ++t) dest[in_off[i] + m[i] + t] = keep + i * lam + t;
  }
  for (int j = 0; j < zeros + n_t; ++j) dest[nw + j] = mt + j;
  // A failed trap flips every output trap, so each party rejects.
  PauliOp flip(static_cast<size_t>(keep));
  for (int j = 0; j < traps; ++j) flip.x().set(static_cast<size_t>(mt + q_zeros + j), true);
  CMLayer check{keep, traps, {}, CliffordOp::from_pauli(flip)};
  check.f.emplace(0, CliffordOp(static_cast<size_t>(keep)));
  c = cm_then(c, CMCircuit{compose(CliffordOp::permutation(dest), dec), {check}});

  // [x, Q zeros, output traps, t] -> [output traps, x, Q zeros, t], then Q.
  std::vector<int> d2(static_cast<size_t>(keep));
  for (int j = 0; j < keep; ++j) {
    if (j < mt + q_zeros)
      d2[j] = traps + j;
    else if (j < mt + zeros)
      d2[j] = j - mt - q_zeros;
    else
      d2[j] = j;
  }
  c = cm_then(c, cm_unitary(CliffordOp::permutation(d2)));
  c = cm_then(c, cm_embed_high(q, traps));

  // [output traps, y, rest] -> [(y_i, trap_i)_i, rest], then C_out[i] per block.
  const int out = traps + q.output_width(), lt = l_total();
  std::vector<int> o_off = prefix_sums(l, lam), y_off = prefix_sums(l, 0);
  std::vector<int> d3(static_cast<size_t>(out));
  for (int i = 0; i < np; ++i) {
    for (int t = 0; t < lam; ++t) d3[i * lam + t] = o_off[i] + l[i] + t;
    for (int j = 0; j < l[i]; ++j) d3[traps + y_off[i] + j] = o_off[i] + j;
  }
  for (int j = lt; j < q.output_width(); ++j) d3[traps + j] = traps + j;
  CliffordOp fin = CliffordOp::permutation(d3);
  for (int i = 0; i < np; ++i)
    fin = compose(embed(c_out[i], static_cast<size_t>(out), iota_vec(o_off[i], l[i] + lam)), fin);
  return cm_then(c, cm_unitary(fin));
}

QGCParams MpqcParams::qgc_params() const {
  std::vector<CliffordOp> ci, co;
  for (int i = 0; i < n(); ++i) {
    ci.emplace_back(static_cast<size_t>(m[i] + lambda));
    co.emplace_back(static_cast<size_t>(l[i] + lambda));
  }
  return QGCParams::of(dist_circuit(ci, co), lambda);
}

void MpqcParams::validate() const {
  q.validate();
  if (n() < 1 || l.size() != m.size()) throw std::invalid_argument("mpqc: need matching per-party widths");
  for (int i = 0; i < n(); ++i)
    if (m[i] < 0 || l[i] < 0) throw std::invalid_argument("mpqc: negative width");
  if (q_zeros < 0 || n_t < 0 || lambda < 1) throw std::invalid_argument("mpqc: bad sizes");
  if (q.n0() != m_total() + q_zeros + n_t) throw std::invalid_argument("mpqc: Q input arity mismatch");
  if (q.output_width() < l_total()) throw std::invalid_argument("mpqc: Q output too narrow");
  if (distiller.lambda != lambda) throw std::invalid_argument("mpqc: distiller block size must equal lambda");
  if (n() * lambda > kMaxTrapWires) throw std::invalid_argument("mpqc: too many input trap wires to garble");
}

nlohmann::json MpqcParams::to_json() const {
  return {{"n", n()},        {"m", m},           {"l", l},       {"q_zeros", q_zeros},
          {"n_t", n_t},      {"lambda", lambda}, {"k0", k0()},   {"k_t", k_t()},
          {"v", v()},        {"Q", q.to_json()}};
}

MpqcParams MpqcParams::cyclic_shift(int n, int lambda) {
  MpqcParams p;
  p.m.assign(static_cast<size_t>(n), 1);
  p.l = p.m;
  std::vector<int> dest(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) dest[i] = (i + 1) % n;
  p.q = cm_unitary(CliffordOp::permutation(dest));
  p.lambda = lambda;
  p.distiller = Distiller::identity_select(lambda);
  return p;
}

MpqcParams MpqcParams::identity(int n, int lambda) {
  MpqcParams p = cyclic_shift(n, lambda);
  p.q = cm_unitary(CliffordOp(static_cast<size_t>(n)));
  return p;
}

std::vector<std::string> MpqcParams::preset_names() { return {"shift3-min", "shift3-std", "identity3-min"}; }

MpqcParams MpqcParams::preset(const std::string& name) {
  if (name == "shift3-min") return cyclic_shift(3, 1);
  if (name == "shift3-std") return cyclic_shift(3, 2);
  if (name == "identity3-min") return identity(3, 1);
  throw std::invalid_argument("unknown mpqc preset '" + name + "'");
}

TestedLayout::TestedLayout(const MpqcParams& p) {
  z_inp = p.n_width();
  t_inp = z_inp + p.k0();
  z_test = t_inp + p.k_t();
  int first = z_test + p.k0() + p.n() * p.lambda;
  for (int i = 0; i < p.n(); ++i) t_test.push_back(first + 2 * p.lambda * i);
}

CliffordOp pauli_clifford(const BitVec& x, const BitVec& z) { return CliffordOp::from_pauli(PauliOp::from_xz(x, z)); }

ChainResult teleport_chain(FrameState& w, const std::vector<int>& reg, const std::vector<CliffordOp>& cs, Rng& rng,
                           const std::function<void(int, const std::vector<int>&)>& after_clifford) {
  const int n = static_cast<int>(cs.size()), v = static_cast<int>(reg.size());
  if (n < 1) throw std::invalid_argument("teleport_chain: need at least one party");
  for (const CliffordOp& c : cs)
    if (c.n() != reg.size()) throw std::invalid_argument("teleport_chain: Clifford size mismatch");
  w.apply_clifford(cs[0], reg);
  if (after_clifford) after_clifford(0, reg);
  // Hop i carries the state from party i to party (i+1) mod n.
  std::vector<std::vector<int>> recv(static_cast<size_t>(n)), send(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) std::tie(recv[i], send[i]) = epr_pairs(w, v);
  for (int i = 1; i < n; ++i) {
    w.apply_clifford(cs[i], recv[i - 1]);
    if (after_clifford) after_clifford(i, recv[i - 1]);
  }
  ChainResult out;
  const std::vector<int>* cur = &reg;
  for (int i = 0; i < n; ++i) {
    out.hops.push_back(bell_all(w, *cur, send[i], rng));
    cur = &recv[i];
  }
  out.arrived = recv[n - 1];
  return out;
}

CliffordOp chain_decoder(const std::vector<CliffordOp>& cs, const std::vector<TeleportRecord>& hops) {
  if (cs.empty() || cs.size() != hops.size()) throw std::invalid_argument("chain_decoder: size mismatch");
  CliffordOp u(cs[0].n());
  for (size_t i = cs.size(); i-- > 0;) u = compose(inverse(cs[i]), compose(pauli_clifford(hops[i].x, hops[i].z), u));
  return u;
}

ReactiveMpc::ReactiveMpc(const MpqcParams& p, Rng& rng) : p_(p), rng_(rng), seen_(5) {
  const int n = p.n(), k = p.k0() + n * p.lambda;
  r_ = BitVec(static_cast<size_t>(k));
  s_ = BitVec(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    r_.set(j, rng.bit());
    s_.set(j, rng.bit());
  }
  u_enc_ = sample_clifford(static_cast<size_t>(p.enc_size()), rng);
  for (int i = 0; i < n; ++i) {
    c_t_.push_back(sample_clifford(static_cast<size_t>(2 * p.lambda), rng));
    c_out_.push_back(sample_clifford(static_cast<size_t>(p.l[i] + p.lambda), rng));
  }
  c_circle_.resize(static_cast<size_t>(n));
  c_inp_.resize(static_cast<size_t>(n));
  circle_.resize(static_cast<size_t>(n));
  inp_.resize(static_cast<size_t>(n));
}

void ReactiveMpc::require(int level, int party) const {
  if (level_ != level)
    throw ProtocolViolation("mpc: input for level " + std::to_string(level) + " while at level " +
                            std::to_string(level_));
  if (party < 0 || party >= p_.n()) throw ProtocolViolation("mpc: no such party");
  if (seen_[level].count(party)) throw ProtocolViolation("mpc: duplicate input");
}

void ReactiveMpc::advance_if_full(int level) {
  if (seen_[level].size() != static_cast<size_t>(p_.n())) return;
  if (level == 2) finish_online1();
  ++level_;
}

void ReactiveMpc::offline1(int party, CliffordOp c_circle) {
  require(0, party);
  if (c_circle.n() != static_cast<size_t>(p_.v())) throw std::invalid_argument("mpc: circle Clifford size");
  c_circle_[party] = std::move(c_circle);
  seen_[0].insert(party);
  advance_if_full(0);
}

void ReactiveMpc::offline2(int party, TeleportRecord circle) {
  require(1, party);
  if (circle.x.size() != static_cast<size_t>(p_.v()) || circle.z.size() != circle.x.size())
    throw std::invalid_argument("mpc: teleportation record size");
  circle_[party] = std::move(circle);
  seen_[1].insert(party);
  advance_if_full(1);
}

void ReactiveMpc::online1(int party, TeleportRecord inp, CliffordOp c_inp) {
  require(2, party);
  size_t w = static_cast<size_t>(p_.m[party] + p_.lambda);
  if (inp.x.size() != w || inp.z.size() != w || c_inp.n() != w) throw std::invalid_argument("mpc: input size");
  inp_[party] = std::move(inp);
  c_inp_[party] = std::move(c_inp);
  seen_[2].insert(party);
  advance_if_full(2);
}

void ReactiveMpc::finish_online1() {
  const MpqcParams& p = p_;
  const int v = p.v(), n = p.n(), lam = p.lambda, nw = p.n_width(), k0 = p.k0(), zk = k0 + n * lam;
  const size_t vs = static_cast<size_t>(v);
  TestedLayout L(p);
  F2Matrix m = sample_gl(static_cast<size_t>(2 * zk), rng_);
  TCheckGadget tc = TCheckGadget::sample(p.n_t, lam, rng_, n);
  std::vector<int> dest(vs);
  for (int j = 0; j < nw; ++j) dest[j] = j;
  for (int j = 0; j < 2 * zk; ++j) {
    int d;
    if (j < k0)
      d = L.z_inp + j;
    else if (j < zk)
      d = L.t_test[(j - k0) / lam] + lam + (j - k0) % lam;
    else
      d = L.z_test + j - zk;
    dest[nw + j] = d;
  }
  const int t0 = nw + 2 * zk;
  std::vector<int> kept = tc.kept_positions();
  for (size_t a = 0; a < kept.size(); ++a) dest[t0 + kept[a]] = L.t_inp + static_cast<int>(a);
  for (int i = 0; i < n; ++i) {
    std::vector<int> chk = tc.check_positions(i);
    for (int t = 0; t < lam; ++t) dest[t0 + chk[t]] = L.t_test[i] + t;
  }
  CliffordOp check = compose(CliffordOp::permutation(dest),
                             embed(CliffordOp::from_linear_map(m), vs, iota_vec(nw, 2 * zk)));
  check = compose(embed(pauli_clifford(r_, s_), vs, iota_vec(L.z_test, zk)), check);
  for (int i = 0; i < n; ++i) check = compose(embed(c_t_[i], vs, iota_vec(L.t_test[i], 2 * lam)), check);
  CliffordOp enc = embed(u_enc_, vs, iota_vec(0, p.enc_size()));
  u_test_ = compose(enc, compose(check, chain_decoder(c_circle_, circle_)));
}

const CliffordOp& ReactiveMpc::u_test() const {
  if (level_ < 3) throw ProtocolViolation("mpc: U_test requested before the first online round completed");
  return u_test_;
}

void ReactiveMpc::online2(const BitVec& r_prime) {
  require(3, 0);
  if (r_prime.size() != r_.size()) throw std::invalid_argument("mpc: r' size");
  if (r_prime != r_) aborted_ = true;
  seen_[3].insert(0);
  finish_online2();
  ++level_;
}

void ReactiveMpc::finish_online2() {
  const MpqcParams& p = p_;
  const int enc = p.enc_size(), nw = p.n_width(), labels = p.label_wires() * p.lambda;
  QgarbleOptions qopt;
  qopt.enforce_cap = false;
  auto [e0, qgc] = qgarble(p.lambda, p.dist_circuit(c_inp_, c_out_), rng_, qopt);
  qgc_ = std::move(qgc);
  // Label zeros are the tail of Z_inp; the garbled input wants them last.
  const int tail = nw + p.k0() - labels;
  std::vector<int> dest(static_cast<size_t>(enc));
  for (int j = 0; j < enc; ++j) dest[j] = j < tail ? j : j < tail + labels ? enc - labels + (j - tail) : j - labels;
  BitVec x(static_cast<size_t>(nw)), z(static_cast<size_t>(nw));
  int off = 0;
  for (const TeleportRecord& t : inp_) {
    x.assign_slice(static_cast<size_t>(off), t.x);
    z.assign_slice(static_cast<size_t>(off), t.z);
    off += static_cast<int>(t.x.size());
  }
  CliffordOp fix = embed(pauli_clifford(x, z), static_cast<size_t>(enc), iota_vec(0, nw));
  u_garble_ = compose(compose(e0, CliffordOp::permutation(dest)), compose(fix, inverse(u_enc_)));
}

const CliffordOp& ReactiveMpc::u_garble() const {
  if (level_ < 4) throw ProtocolViolation("mpc: garbled circuit requested early");
  return u_garble_;
}

const QuantumGarbledCircuit& ReactiveMpc::qgc() const {
  if (level_ < 4) throw ProtocolViolation("mpc: garbled circuit requested early");
  return *qgc_;
}

const CliffordOp& ReactiveMpc::c_t(int party) const {
  if (level_ < 4) throw ProtocolViolation("mpc: T-check Clifford requested early");
  return c_t_.at(static_cast<size_t>(party));
}

void ReactiveMpc::online3(int party, bool abort_vote) {
  require(4, party);
  if (abort_vote) aborted_ = true;
  seen_[4].insert(party);
  advance_if_full(4);
}

std::optional<CliffordOp> ReactiveMpc::c_out(int party) const {
  if (level_ < 5) throw ProtocolViolation("mpc: output Clifford requested before the last round");
  if (aborted_) return std::nullopt;
  return c_out_.at(static_cast<size_t>(party));
}

const std::vector<std::string>& canned_mpqc_adversary_names() {
  static const std::vector<std::string> names = {"honest", "circle-pauli", "abort-vote", "output-tamper"};
  return names;
}

MpqcAdversary canned_mpqc_adversary(const std::string& name, int party) {
  MpqcAdversary a{name, {party}, {}, false};
  if (name == "honest") {
  } else if (name == "circle-pauli") {
    a.hooks[MpqcHook::CircleApplied] = [](int, FrameState& w, const Registers& r, Rng& rng) {
      const std::vector<int>& q = r.at("circle");
      w.apply_pauli(random_pauli(q.size(), rng), q);
    };
  } else if (name == "abort-vote") {
    a.vote_abort = true;
  } else if (name == "output-tamper") {
    if (party != 0) throw std::invalid_argument("output-tamper corrupts the evaluating party (0)");
    a.hooks[MpqcHook::OutputsReady] = [](int, FrameState& w, const Registers& r, Rng&) {
      for (const auto& [key, q] : r)
        if (key != "y_out_0") w.apply_gate({GateKind::X, q[0]});
    };
  } else {
    throw std::invalid_argument("unknown mpqc adversary '" + name + "'");
  }
  return a;
}

std::string MpqcResult::outcome(Rng& rng) {
  std::string s;
  for (size_t i = 0; i < outputs.size(); ++i) {
    if (i) s += ';';
    s += "p" + std::to_string(i + 1) + "=";
    if (!outputs[i]) {
      s += "bot";
      continue;
    }
    for (int q : *outputs[i]) s += world.measure_z(q, rng) ? '1' : '0';
  }
  return s;
}

Eigen::MatrixXcd MpqcResult::output_block(int party) const {
  const auto& out = outputs.at(static_cast<size_t>(party));
  return detail::with_abort_entry(world, out, widths.at(static_cast<size_t>(party)));
}

MpqcResult run_mpqc(const std::vector<std::vector<cplx>>& inputs, const MpqcParams& p, const MpqcAdversary* adversary,
                    Rng& rng) {
  p.validate();
  const int n = p.n(), lam = p.lambda, v = p.v();
  if (inputs.size() != static_cast<size_t>(n)) throw std::invalid_argument("run_mpqc: one input per party");
  for (int i = 0; i < n; ++i)
    if (inputs[i].size() != size_t{1} << p.m[i]) throw std::invalid_argument("run_mpqc: input width mismatch");
  MpqcResult res;
  FrameState& w = res.world;
  res.outputs.assign(static_cast<size_t>(n), std::nullopt);
  res.widths = p.l;
  res.votes.assign(static_cast<size_t>(n), false);
  res.released.assign(static_cast<size_t>(n), false);
  nlohmann::json& log = res.transcript;
  log = {{"params", p.to_json()}, {"messages", nlohmann::json::array()}};
  if (adversary)
    log["adversary"] = {{"name", adversary->name},
                        {"parties", std::vector<int>(adversary->parties.begin(), adversary->parties.end())}};
  auto hook = [&](MpqcHook h, int party, const Registers& regs) {
    if (!adversary || !adversary->corrupts(party)) return;
    auto it = adversary->hooks.find(h);
    if (it != adversary->hooks.end()) it->second(party, w, regs, rng);
  };
  auto message = [&log](const char* round, int from, int to, int qubits) {
    log["messages"].push_back({{"round", round}, {"from", from + 1}, {"to", to + 1}, {"quantum_qubits", qubits}});
  };
  ReactiveMpc mpc(p, rng);

  // Offline round 1: EPR halves for the inputs and the circle; circle Cliffords to the MPC.
  std::vector<std::vector<int>> in_recv(static_cast<size_t>(n)), in_send(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::tie(in_recv[i], in_send[i]) = epr_pairs(w, p.m[i] + lam);
    if (i) message("offline-1", 0, i, p.m[i] + lam);
  }
  std::vector<CliffordOp> circle_c;
  for (int i = 0; i < n; ++i) {
    circle_c.push_back(sample_clifford(static_cast<size_t>(v), rng));
    mpc.offline1(i, circle_c[i]);
    message("offline-1", i, (i + n - 1) % n, v);
  }

  // Offline round 2: P1 assembles the circle state; everyone re-randomizes and teleports.
  std::vector<int> circle;
  for (const auto& r : in_recv) circle.insert(circle.end(), r.begin(), r.end());
  circle = concat({circle, append_zeros(w, 2 * (p.k0() + n * lam)), append_t(w, p.k_t() + n * lam)});
  ChainResult chain = teleport_chain(w, circle, circle_c, rng, [&](int i, const std::vector<int>& reg) {
    hook(MpqcHook::CircleApplied, i, {{"circle", reg}});
  });
  for (int i = 0; i < n; ++i) mpc.offline2(i, chain.hops[i]);

  // Online round 1: authenticate and teleport each input into P1's register.
  for (int i = 0; i < n; ++i) {
    std::vector<int> reg = concat({append_amps(w, inputs[i]), append_zeros(w, lam)});
    CliffordOp c_inp = sample_clifford(reg.size(), rng);
    w.apply_clifford(c_inp, reg);
    hook(MpqcHook::InputEncoded, i, {{"input", reg}});
    mpc.online1(i, bell_all(w, reg, in_send[i], rng), c_inp);
  }

  // Online round 2: P1 applies U_test, hands out T-check registers, reports r'.
  TestedLayout L(p);
  std::vector<int> y = chain.arrived;
  w.apply_clifford(mpc.u_test(), y);
  Registers tested{{"y", y}, {"Z_test", slice(y, L.z_test, p.k0() + n * lam)}};
  for (int i = 0; i < n; ++i) tested["T_test_" + std::to_string(i)] = slice(y, L.t_test[i], 2 * lam);
  hook(MpqcHook::Tested, 0, tested);
  for (int i = 1; i < n; ++i) message("online-2", 0, i, 2 * lam);
  BitVec r_prime(static_cast<size_t>(p.k0() + n * lam));
  for (int j = 0; j < static_cast<int>(r_prime.size()); ++j) r_prime.set(j, w.measure_z(y[L.z_test + j], rng));
  mpc.online2(r_prime);
  res.z_test_passed = !mpc.aborted();
  log["z_test"] = res.z_test_passed ? "pass" : "fail";

  // Online round 3: P1 evaluates and distributes; every party checks its T states.
  std::vector<int> live = slice(y, 0, p.enc_size());
  bool eval_failed = false;
  w.apply_clifford(mpc.u_garble(), live);
  try {
    qgeval_in_place(w, live, mpc.qgc(), rng);
  } catch (const GarbleAuthError&) {
    eval_failed = true;
    log["evaluation"] = "failed";
  }
  std::vector<std::vector<int>> y_out(static_cast<size_t>(n));
  if (!eval_failed) {
    Registers outs;
    int off = 0;
    for (int i = 0; i < n; ++i) {
      y_out[i] = slice(live, off, p.l[i] + lam);
      off += p.l[i] + lam;
      outs["y_out_" + std::to_string(i)] = y_out[i];
    }
    hook(MpqcHook::OutputsReady, 0, outs);
    for (int i = 1; i < n; ++i) message("online-3", 0, i, p.l[i] + lam);
  }
  std::vector<std::string> t_log;
  for (int i = 0; i < n; ++i) {
    std::vector<int> reg = slice(y, L.t_test[i], 2 * lam);
    hook(MpqcHook::TStateReceived, i, {{"T_test", reg}});
    w.apply_clifford(inverse(mpc.c_t(i)), reg);
    std::vector<bool> bits;
    for (int t = 0; t < lam; ++t) bits.push_back(w.measure_t(reg[t], rng));
    for (int t = lam; t < 2 * lam; ++t) bits.push_back(w.measure_z(reg[t], rng));
    bool fail = std::find(bits.begin(), bits.end(), true) != bits.end();
    t_log.push_back(bits_of(bits));
    bool vote = fail || (i == 0 && eval_failed) || (adversary && adversary->corrupts(i) && adversary->vote_abort);
    res.votes[i] = vote;
    mpc.online3(i, vote);
  }
  log["t_checks"] = t_log;

  // Output reconstruction.
  for (int i = 0; i < n; ++i) {
    std::optional<CliffordOp> c_out = mpc.c_out(i);
    res.released[i] = c_out.has_value();
    if (!c_out || eval_failed) continue;
    hook(MpqcHook::OutputReceived, i, {{"y_out", y_out[i]}});
    w.apply_clifford(inverse(*c_out), y_out[i]);
    bool ok = true;
    for (int t = 0; t < lam; ++t) ok = !w.measure_z(y_out[i][p.l[i] + t], rng) && ok;
    if (ok) res.outputs[i] = slice(y_out[i], 0, p.l[i]);
  }
  std::vector<std::string> outs;
  for (const auto& o : res.outputs) outs.push_back(o ? "ok" : "bot");
  log["outputs"] = outs;
  return res;
}

}  // namespace qmpc
