// SPDX-License-Identifier: Apache-2.0
#include "qmpc/qgc.hpp"

#include <functional>

namespace qmpc {

namespace {

std::string outcome_key(uint64_t x, int k) {
  std::string s(static_cast<size_t>(k), '0');
  for (int j = 0; j < k; ++j)
    if ((x >> j) & 1) s[j] = '1';
  return s;
}

uint64_t parse_outcome(const std::string& s, int k) {
  if (s.size() != static_cast<size_t>(k)) throw std::invalid_argument("CMCircuit: outcome key length mismatch");
  uint64_t x = 0;
  for (int j = 0; j < k; ++j) {
    if (s[j] != '0' && s[j] != '1') throw std::invalid_argument("CMCircuit: bad outcome key");
    if (s[j] == '1') x |= uint64_t{1} << j;
  }
  return x;
}

// Removes the highest `count` qubits, which hold computational basis states.
void discard_high(StateVector& s, int count) {
  int n = s.num_qubits();
  for (int q = n - count; q < n; ++q)
    if (s.prob_one(q) > 0.5) s.apply_gate({GateKind::X, q});
  s.drop_high_zeros(count);
}

std::vector<Bytes> serialized_table(const CMLayer& layer, const std::function<CliffordOp(const CliffordOp&)>& wrap) {
  std::vector<Bytes> rows(size_t{1} << layer.k);
  for (uint64_t x = 0; x < rows.size(); ++x) rows[x] = wrap(layer.lookup(x)).serialize();
  return rows;
}

}  // namespace

const CliffordOp& CMLayer::lookup(uint64_t outcome) const {
  auto it = f.find(outcome);
  if (it == f.end() && fallback) return *fallback;
  if (it == f.end()) throw std::out_of_range("CMCircuit: missing correction for outcome " + outcome_key(outcome, k));
  return it->second;
}

int CMCircuit::total_measured() const {
  int k = 0;
  for (const CMLayer& l : layers) k += l.k;
  return k;
}

void CMCircuit::validate() const {
  if (n0() < 1) throw std::invalid_argument("CMCircuit: empty input register");
  for (int i = 1; i <= depth(); ++i) {
    const CMLayer& l = layers[i - 1];
    if (l.k < 1 || l.n < 0) throw std::invalid_argument("CMCircuit: bad layer shape");
    if (width(i - 1) != l.n + l.k) throw std::invalid_argument("CMCircuit: dimension chain broken");
    if (l.fallback && l.fallback->n() != static_cast<size_t>(l.n))
      throw std::invalid_argument("CMCircuit: correction size mismatch");
    for (const auto& [x, c] : l.f) {
      if (x >> l.k) throw std::invalid_argument("CMCircuit: outcome out of range");
      if (c.n() != static_cast<size_t>(l.n)) throw std::invalid_argument("CMCircuit: correction size mismatch");
    }
  }
}

CMCircuit cm_unitary(CliffordOp c) { return {std::move(c), {}}; }

CMCircuit cm_embed_high(const CMCircuit& c, int extra) {
  if (extra < 0) throw std::invalid_argument("cm_embed_high: negative padding");
  if (extra == 0) return c;
  auto lift = [extra](const CliffordOp& op) {
    std::vector<int> qs = iota_vec(extra, static_cast<int>(op.n()));
    return embed(op, op.n() + static_cast<size_t>(extra), qs);
  };
  CMCircuit out{lift(c.f0), {}};
  for (const CMLayer& l : c.layers) {
    CMLayer e{l.n + extra, l.k, {}, std::nullopt};
    for (const auto& [x, op] : l.f) e.f.emplace(x, lift(op));
    if (l.fallback) e.fallback = lift(*l.fallback);
    out.layers.push_back(std::move(e));
  }
  return out;
}

CMCircuit cm_then(const CMCircuit& first, const CMCircuit& second) {
  if (first.output_width() != second.n0()) throw std::invalid_argument("cm_then: width mismatch");
  CMCircuit out = first;
  if (out.layers.empty()) {
    out.f0 = compose(second.f0, out.f0);
  } else {
    CMLayer& last = out.layers.back();
    for (auto& [x, op] : last.f) op = compose(second.f0, op);
    if (last.fallback) last.fallback = compose(second.f0, *last.fallback);
  }
  out.layers.insert(out.layers.end(), second.layers.begin(), second.layers.end());
  return out;
}

nlohmann::json CMCircuit::to_json() const {
  nlohmann::json j;
  j["F0"] = f0.to_hex();
  j["layers"] = nlohmann::json::array();
  for (const CMLayer& l : layers) {
    nlohmann::json f = nlohmann::json::object();
    for (const auto& [x, c] : l.f) f[outcome_key(x, l.k)] = c.to_hex();
    nlohmann::json lj = {{"n", l.n}, {"k", l.k}, {"f", f}};
    if (l.fallback) lj["default"] = l.fallback->to_hex();
    j["layers"].push_back(lj);
  }
  return j;
}

CMCircuit CMCircuit::from_json(const nlohmann::json& j) {
  try {
    CMCircuit q;
    q.f0 = CliffordOp::from_hex(j.at("F0").get<std::string>());
    for (const auto& lj : j.value("layers", nlohmann::json::array())) {
      CMLayer l;
      l.n = lj.at("n").get<int>();
      l.k = lj.at("k").get<int>();
      if (l.k < 1 || l.k > 16) throw std::invalid_argument("CMCircuit: bad layer shape");
      for (const auto& [key, hex] : lj.at("f").items())
        l.f[parse_outcome(key, l.k)] = CliffordOp::from_hex(hex.get<std::string>());
      if (lj.contains("default")) l.fallback = CliffordOp::from_hex(lj["default"].get<std::string>());
      q.layers.push_back(std::move(l));
    }
    q.validate();
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("CMCircuit: ") + e.what());
  }
}

QGCParams QGCParams::of(const CMCircuit& q, int lambda) {
  if (lambda < 1) throw std::invalid_argument("QGC: lambda must be positive");
  QGCParams p;
  p.n0 = q.n0();
  for (const CMLayer& l : q.layers) p.layers.emplace_back(l.n, l.k);
  p.lambda = lambda;
  return p;
}

int QGCParams::k() const {
  int k = 0;
  for (const auto& l : layers) k += l.second;
  return k;
}

int QGCParams::h(int i) const {
  int h = k();
  for (int j = 1; j <= i; ++j) h -= k_at(j);
  return h;
}

GarbleOptions QGCParams::garble_options() const {
  GarbleOptions o;
  o.key_bits = lambda - 1;
  o.mask_pp = false;
  return o;
}

nlohmann::json QuantumGarbledCircuit::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& [n, k] : params.layers) layers.push_back({n, k});
  nlohmann::json tj = nlohmann::json::array();
  for (const GarbledTable& t : tables) tj.push_back(t.serialize());
  return {{"n0", params.n0},
          {"layers", layers},
          {"lambda", params.lambda},
          {"D0", d0.to_hex()},
          {"tables", tj}};
}

QuantumGarbledCircuit QuantumGarbledCircuit::from_json(const nlohmann::json& j) {
  try {
    QuantumGarbledCircuit q;
    q.params.n0 = j.at("n0").get<int>();
    for (const auto& l : j.at("layers")) q.params.layers.emplace_back(l.at(0).get<int>(), l.at(1).get<int>());
    q.params.lambda = j.at("lambda").get<int>();
    q.d0 = CliffordOp::from_hex(j.at("D0").get<std::string>());
    for (const auto& t : j.at("tables")) q.tables.push_back(GarbledTable::deserialize(t.get<std::string>()));
    if (q.d0.n() != static_cast<size_t>(q.params.register_size(0)) ||
        q.tables.size() != static_cast<size_t>(q.params.depth()))
      throw std::invalid_argument("garbled circuit: shape mismatch");
    for (int i = 1; i <= q.params.depth(); ++i)
      if (q.tables[i - 1].arity != q.params.k_at(i)) throw std::invalid_argument("garbled circuit: arity mismatch");
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("garbled circuit: ") + e.what());
  }
}

CliffordOp labenc(const std::vector<LabelPair>& labels, int lambda, const std::vector<bool>& z_bits) {
  if (z_bits.size() != labels.size()) throw std::invalid_argument("labenc: twirl bit count mismatch");
  int k = static_cast<int>(labels.size());
  GateSeq gates;
  for (int j = 0; j < k; ++j) {
    BitVec s0 = labels[j].zero.bits(), s1 = labels[j].one.bits();
    if (s0.size() != static_cast<size_t>(lambda) || s1.size() != static_cast<size_t>(lambda))
      throw std::invalid_argument("labenc: label length mismatch");
    int wire = j * (1 + lambda);
    if (z_bits[j]) gates.push_back({GateKind::Z, wire});
    for (int t = 0; t < lambda; ++t) {
      if (s0.get(t)) gates.push_back({GateKind::X, wire + 1 + t});
      if (s0.get(t) != s1.get(t)) gates.push_back({GateKind::CNOT, wire, wire + 1 + t});
    }
  }
  return CliffordOp::from_gates(static_cast<size_t>(k * (1 + lambda)), gates);
}

CliffordOp labenc(const std::vector<LabelPair>& labels, int lambda, Rng& rng) {
  std::vector<bool> z(labels.size());
  for (size_t j = 0; j < z.size(); ++j) z[j] = rng.bit();
  return labenc(labels, lambda, z);
}

CliffordOp layer_routing(const QGCParams& p, int i) {
  int ni = p.n(i), ki = p.k_at(i), hl = p.h(i) * p.lambda, lam = p.lambda;
  int total = p.register_size(i - 1);
  int blocks = ni + hl;
  std::vector<int> dest(static_cast<size_t>(total));
  for (int q = 0; q < ni; ++q) dest[q] = q;
  for (int j = 0; j < ki; ++j) dest[ni + j] = blocks + j * (1 + lam);
  int zeros = ni + ki;
  for (int t = 0; t < hl; ++t) dest[zeros + t] = ni + t;
  for (int j = 0; j < ki; ++j)
    for (int t = 0; t < lam; ++t) dest[zeros + hl + j * lam + t] = blocks + j * (1 + lam) + 1 + t;
  return CliffordOp::permutation(dest);
}

QuantumGarbledCircuit qgarble_with_keys(int lambda, const CMCircuit& q, const std::vector<CliffordOp>& e,
                                        const std::vector<std::vector<bool>>& z_bits, BitSource& coins) {
  q.validate();
  QGCParams p = QGCParams::of(q, lambda);
  int d = p.depth();
  if (e.size() != static_cast<size_t>(d + 1) || z_bits.size() != static_cast<size_t>(d))
    throw std::invalid_argument("qgarble: key count mismatch");
  for (int i = 0; i <= d; ++i)
    if (e[i].n() != static_cast<size_t>(p.register_size(i))) throw std::invalid_argument("qgarble: key size mismatch");

  QuantumGarbledCircuit out{p, CliffordOp(), std::vector<GarbledTable>(static_cast<size_t>(d))};
  // Wraps a correction on the n_i survivors of layer i into the Clifford revealed after it.
  auto stage = [&](int i, const std::vector<LabelPair>* next_labels) {
    std::optional<CliffordOp> lead;
    if (next_labels) {
      CliffordOp l = labenc(*next_labels, lambda, z_bits[i]);
      lead = compose(tensor(e[i + 1], l), layer_routing(p, i + 1));
    }
    CliffordOp e_inv = inverse(e[i]);
    int pad = p.h(i) * lambda;
    return [lead, e_inv, pad](const CliffordOp& f) {
      CliffordOp body = pad ? tensor(f, CliffordOp(static_cast<size_t>(pad))) : f;
      CliffordOp c = compose(body, e_inv);
      return lead ? compose(*lead, c) : c;
    };
  };

  std::vector<LabelPair> labels;
  for (int i = d; i >= 1; --i) {
    auto wrap = stage(i, i == d ? nullptr : &labels);
    auto [pairs, table] = garble(serialized_table(q.layers[i - 1], wrap), p.garble_options(), coins);
    out.tables[i - 1] = std::move(table);
    labels = std::move(pairs);
  }
  out.d0 = stage(0, d == 0 ? nullptr : &labels)(q.f0);
  return out;
}

std::pair<CliffordOp, QuantumGarbledCircuit> qgarble(int lambda, const CMCircuit& q, Rng& rng, QgarbleOptions opt) {
  q.validate();
  QGCParams p = QGCParams::of(q, lambda);
  if (opt.enforce_cap && p.register_size(0) > qubit_cap()) throw CapExceeded(p.register_size(0));
  std::vector<CliffordOp> e;
  for (int i = 0; i <= p.depth(); ++i) e.push_back(sample_clifford(static_cast<size_t>(p.register_size(i)), rng));
  std::vector<std::vector<bool>> z(static_cast<size_t>(p.depth()));
  for (int i = 0; i < p.depth(); ++i) {
    z[i].resize(static_cast<size_t>(p.k_at(i + 1)));
    for (size_t j = 0; j < z[i].size(); ++j) z[i][j] = rng.bit();
  }
  RngBits coins(rng);
  QuantumGarbledCircuit qg = qgarble_with_keys(lambda, q, e, z, coins);
  return {std::move(e[0]), std::move(qg)};
}

std::vector<Label> read_labels(const BitVec& block, int k, int lambda) {
  if (block.size() != static_cast<size_t>(k * (1 + lambda))) throw std::invalid_argument("read_labels: size mismatch");
  std::vector<Label> labels;
  for (int j = 0; j < k; ++j) {
    size_t wire = static_cast<size_t>(j * (1 + lambda));
    Label l = Label::from_bits(block.slice(wire + 1, static_cast<size_t>(lambda)));
    if (l.pp != block.get(wire)) throw GarbleAuthError();
    labels.push_back(std::move(l));
  }
  return labels;
}

CliffordOp open_table(const GarbledTable& table, const std::vector<Label>& labels, int expected_n) {
  Bytes plain = geval(table, labels);
  try {
    CliffordOp c = CliffordOp::deserialize(plain);
    if (c.n() != static_cast<size_t>(expected_n)) throw GarbleAuthError();
    return c;
  } catch (const InvalidTableau&) {
    throw GarbleAuthError();
  }
}

StateVector run_cm(const CMCircuit& q, StateVector x, Rng& rng) {
  q.validate();
  std::vector<int> live = iota_vec(0, x.num_qubits());
  run_cm_in_place(x, live, q, rng);
  discard_high(x, q.n0() - q.output_width());
  return x;
}

StateVector encode_input(const CliffordOp& e0, StateVector x) {
  int pad = static_cast<int>(e0.n()) - x.num_qubits();
  if (pad < 0) throw std::invalid_argument("encode_input: input larger than key");
  x.append_zeros(pad);
  x.apply_clifford(e0);
  return x;
}

StateVector qgeval(StateVector garbled_input, const QuantumGarbledCircuit& qg, Rng& rng) {
  std::vector<int> live = iota_vec(0, garbled_input.num_qubits());
  qgeval_in_place(garbled_input, live, qg, rng);
  discard_high(garbled_input, garbled_input.num_qubits() - static_cast<int>(live.size()));
  return garbled_input;
}

std::pair<StateVector, QuantumGarbledCircuit> qgsim(const QGCParams& p, const StateVector& x_out, Rng& rng) {
  StateVector s = x_out;
  std::vector<int> live = iota_vec(0, s.num_qubits());
  QuantumGarbledCircuit qg = qgsim_in_place(s, live, p, rng);
  return {std::move(s), std::move(qg)};
}

}  // namespace qmpc
