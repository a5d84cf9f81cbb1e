// SPDX-License-Identifier: Apache-2.0
#include "qmpc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "qmpc/authcode.hpp"

namespace qmpc {

namespace {

using Json = nlohmann::json;
using Mat = Eigen::MatrixXcd;

// ---------------------------------------------------------------- plumbing

// Runs f(t) for every trial; results land in trial order whatever the worker count.
template <class T, class F>
std::vector<T> shard(int trials, int workers, F&& f) {
  std::vector<T> out(static_cast<size_t>(trials));
  workers = std::clamp(workers, 1, std::max(trials, 1));
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) out[t] = f(t);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int t = next++; t < trials; t = next++) out[t] = f(t);
      } catch (...) {
        errors[w] = std::current_exception();
        next = trials;
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Mean of equally sized matrices with the Frobenius-norm standard error.
class MeanMatrix {
 public:
  void add(const Mat& m) {
    if (n_ == 0) {
      sum_ = Mat::Zero(m.rows(), m.cols());
      sq_ = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    }
    sum_ += m;
    sq_ += m.cwiseAbs2();
    ++n_;
  }
  Mat mean() const { return sum_ / static_cast<double>(n_); }
  double std_error() const {
    if (n_ < 2) return 0;
    double n = n_;
    double var = ((sq_ / n) - mean().cwiseAbs2()).sum() * n / (n - 1);
    return std::sqrt(std::max(var, 0.0) / n);
  }

 private:
  Mat sum_;
  Eigen::MatrixXd sq_;
  int n_ = 0;
};

double trace_norm_distance(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double freq_std_error(double p, int n) { return n > 0 ? std::sqrt(p * (1 - p) / n) : 0.0; }

Metric metric(std::string name, double value, double se, std::string op = "", double bound = 0) {
  return {std::move(name), value, se, std::move(op), bound, 0};
}

Metric near_metric(std::string name, double value, double se, double target, double tol) {
  return {std::move(name), value, se, "near", tol, target};
}

Json histogram_json(const std::map<std::string, int>& h) {
  Json j = Json::object();
  for (const auto& [k, v] : h) j[k] = v;
  return j;
}

double tvd_std_error(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
  double na = 0, nb = 0;
  for (const auto& [k, v] : a) na += v;
  for (const auto& [k, v] : b) nb += v;
  std::set<std::string> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  double var = 0;
  for (const auto& k : keys) {
    double p = a.count(k) ? a.at(k) / na : 0.0, q = b.count(k) ? b.at(k) / nb : 0.0;
    var += p * (1 - p) / na + q * (1 - q) / nb;
  }
  return 0.5 * std::sqrt(var);
}

std::vector<cplx> random_amps(int n, Rng& rng) {
  std::vector<cplx> a(size_t{1} << n);
  double s = 0;
  for (auto& x : a) {
    x = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    s += std::norm(x);
  }
  for (auto& x : a) x /= std::sqrt(s);
  return a;
}

// Named single-qubit preparation repeated over `width` qubits; "random" draws from rng.
std::vector<cplx> prepared_input(const std::string& name, int width, Rng& rng) {
  if (name == "random") return random_amps(width, rng);
  std::vector<cplx> one = named_state(name), out = {1};
  for (int q = 0; q < width; ++q) {
    std::vector<cplx> next(out.size() * 2);
    for (size_t lo = 0; lo < out.size(); ++lo)
      for (size_t b = 0; b < 2; ++b) next[lo | (b * out.size())] = out[lo] * one[b];
    out = std::move(next);
  }
  return out;
}

// Full input of Q: the listed party inputs, zeros, then T states.
StateVector reference_input(const std::vector<std::vector<cplx>>& xs, int zeros, int t_states) {
  PrepSpec spec;
  for (const auto& x : xs) spec.push_back(PrepBlock::amplitudes(x));
  spec.push_back(PrepBlock::zeros(zeros));
  spec.push_back(PrepBlock::t_states(t_states));
  return prepare(spec);
}

Mat pad_abort(const Mat& rho) {
  Mat m = Mat::Zero(rho.rows() + 1, rho.cols() + 1);
  m.topLeftCorner(rho.rows(), rho.cols()) = rho;
  return m;
}

Mat pad_abort(const DensityMatrix& rho) { return pad_abort(rho.matrix()); }

// Reduced density of qubits [first, first + count).
Mat reduce(const Mat& rho, int first, int count) {
  size_t dim = static_cast<size_t>(rho.rows()), sub = size_t{1} << count, mask = (sub - 1) << first;
  Mat out = Mat::Zero(static_cast<Eigen::Index>(sub), static_cast<Eigen::Index>(sub));
  for (size_t a = 0; a < dim; ++a)
    for (size_t b = 0; b < dim; ++b)
      if ((a & ~mask) == (b & ~mask)) out((a & mask) >> first, (b & mask) >> first) += rho(a, b);
  return out;
}

void cm_branches(StateVector s, const CMCircuit& q, size_t layer, double w, Mat& acc) {
  if (layer == q.layers.size()) {
    acc += w * s.density().matrix();
    return;
  }
  const CMLayer& l = q.layers[layer];
  for (uint64_t x = 0; x < (uint64_t{1} << l.k); ++x) {
    StateVector br = s;
    double weight = w;
    bool possible = true;
    for (int j = 0; j < l.k && possible; ++j) {
      bool bit = (x >> j) & 1;
      double p1 = br.prob_one(l.n + j);
      if ((bit ? p1 : 1 - p1) < 1e-14) possible = false;
      else weight *= br.project_z(l.n + j, bit);
    }
    if (!possible) continue;
    for (int j = 0; j < l.k; ++j)
      if ((x >> j) & 1) br.apply_gate({GateKind::X, l.n + j});
    br.drop_high_zeros(l.k);
    br.apply_clifford(l.lookup(x));
    cm_branches(std::move(br), q, layer + 1, weight, acc);
  }
}

// ------------------------------------------------------------ garble-demo

CMCircuit random_circuit(int n0, const std::vector<std::pair<int, int>>& layers, Rng& rng) {
  CMCircuit q;
  q.f0 = sample_clifford(static_cast<size_t>(n0), rng);
  for (auto [n, k] : layers) {
    CMLayer l{n, k, {}, std::nullopt};
    for (uint64_t x = 0; x < (uint64_t{1} << k); ++x) l.f[x] = sample_clifford(static_cast<size_t>(n), rng);
    q.layers.push_back(std::move(l));
  }
  return q;
}

std::vector<CliffordOp> single_qubit_cliffords() {
  std::vector<CliffordOp> group{CliffordOp(1)};
  std::set<std::string> seen{CliffordOp(1).to_hex()};
  for (size_t i = 0; i < group.size(); ++i)
    for (GateKind k : {GateKind::H, GateKind::S}) {
      CliffordOp next = group[i];
      next.then_gate({k, 0});
      if (seen.insert(next.to_hex()).second) group.push_back(next);
    }
  return group;
}

// Exact output mixture of honest garbled evaluation over every measurement branch.
void eval_branches(const StateVector& s, int layer, const CliffordOp& d, const QuantumGarbledCircuit& qg, double w,
                   Mat& acc) {
  const QGCParams& p = qg.params;
  StateVector cur = s;
  cur.apply_clifford(d);
  if (layer > p.depth()) {
    acc += w * cur.density().matrix();
    return;
  }
  int keep = p.register_size(layer), block = p.block_size(layer);
  for (uint64_t m = 0; m < (uint64_t{1} << block); ++m) {
    StateVector br = cur;
    double weight = w;
    bool possible = true;
    for (int j = 0; j < block && possible; ++j) {
      bool bit = (m >> j) & 1;
      double p1 = br.prob_one(keep + j);
      if ((bit ? p1 : 1 - p1) < 1e-12) possible = false;
      else weight *= br.project_z(keep + j, bit);
    }
    if (!possible) continue;
    BitVec bits = BitVec::from_uint(static_cast<size_t>(block), m);
    CliffordOp next = open_table(qg.tables[layer - 1], read_labels(bits, p.k_at(layer), p.lambda), keep);
    for (int j = 0; j < block; ++j)
      if ((m >> j) & 1) br.apply_gate({GateKind::X, keep + j});
    br.drop_high_zeros(block);
    eval_branches(br, layer + 1, next, qg, weight, acc);
  }
}

bool is_minimal_shape(const CMCircuit& q, int lambda) {
  return lambda == 1 && q.n0() == 2 && q.depth() == 1 && q.layers[0].n == 1 && q.layers[0].k == 1;
}

// Every key of the second layer, both twirl bits and every measurement branch;
// the input key ranges over a seeded panel.
double exhaustive_garble_distance(const CMCircuit& q, const StateVector& x, const Mat& expect, uint64_t seed) {
  Rng rng(derive_seed(seed, 0, "exhaustive"));
  std::vector<CliffordOp> c1 = single_qubit_cliffords();
  double worst = 0;
  for (int panel = 0; panel < 8; ++panel) {
    CliffordOp e0 = sample_clifford(3, rng);
    StateVector garbled = encode_input(e0, x);
    Mat mix = Mat::Zero(2, 2);
    for (const CliffordOp& e1 : c1)
      for (int z = 0; z < 2; ++z) {
        CountingBits coins;
        QuantumGarbledCircuit qg = qgarble_with_keys(1, q, {e0, e1}, {{z == 1}}, coins);
        eval_branches(garbled, 1, qg.d0, qg, 1.0, mix);
      }
    worst = std::max(worst, trace_norm_distance(mix / 48.0, expect));
  }
  return worst;
}

Report garble_demo(ExperimentConfig c) {
  if (!c.trials) c.trials = 5000;
  Report r;
  std::vector<GarblePreset> family;
  if (c.circuit) {
    if (!c.preset.empty()) throw ConfigError("give either --preset or --circuit, not both");
    try {
      CMCircuit q = CMCircuit::from_json(*c.circuit);
      q.validate();
      family.push_back({"custom", q, c.lambda.value_or(1)});
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad circuit: ") + e.what());
    }
  } else {
    std::vector<std::string> names = c.preset.empty() ? garble_preset_names() : std::vector<std::string>{c.preset};
    for (const auto& name : names) {
      family.push_back(garble_preset(name, c.seed));
      if (c.lambda) family.back().lambda = *c.lambda;
    }
  }
  if (c.lambda && (*c.lambda < 1)) throw ConfigError("lambda must be at least 1");
  if (c.exact && !c.preset.empty() && !is_minimal_shape(family[0].q, family[0].lambda))
    throw ConfigError("exhaustive enumeration needs the minimal shape (n0=2, one layer measuring 1 wire, lambda=1)");
  r.config = c.to_json();
  r.details["circuits"] = Json::object();
  for (size_t idx = 0; idx < family.size(); ++idx) {
    const GarblePreset& g = family[idx];
    QGCParams qp = QGCParams::of(g.q, g.lambda);
    if (qp.register_size(0) > qubit_cap())
      throw ConfigError(g.name + ": garbled input of " + std::to_string(qp.register_size(0)) +
                        " qubits exceeds the qubit cap");
    Rng in_rng(derive_seed(c.seed, idx, "input"));
    StateVector x = StateVector::from_amplitudes(random_amps(g.q.n0(), in_rng));
    Mat expect = exact_cm_output(g.q, x).matrix();
    std::vector<Mat> outs = shard<Mat>(c.trials, c.workers, [&](int t) {
      Rng rng(derive_seed(c.seed, t, g.name));
      auto [e0, qg] = qgarble(g.lambda, g.q, rng);
      return Mat(qgeval(encode_input(e0, x), qg, rng).density().matrix());
    });
    MeanMatrix mean;
    for (const Mat& m : outs) mean.add(m);
    r.metrics.push_back(metric(g.name + ".mc_trace_distance", trace_norm_distance(mean.mean(), expect),
                               mean.std_error(), "<", 0.03));
    if (c.exact && is_minimal_shape(g.q, g.lambda))
      r.metrics.push_back(
          metric(g.name + ".exhaustive_trace_distance", exhaustive_garble_distance(g.q, x, expect, c.seed), 0, "<", 1e-6));
    Rng demo(derive_seed(c.seed, idx, "demo"));
    auto [e0, qg] = qgarble(g.lambda, g.q, demo);
    Json tables = Json::array();
    for (const auto& t : qg.tables) tables.push_back(t.byte_size());
    r.details["circuits"][g.name] = {{"n0", g.q.n0()},       {"depth", g.q.depth()},
                                     {"lambda", g.lambda},   {"garbled_input_qubits", qp.register_size(0)},
                                     {"table_bytes", tables}, {"output_qubits", g.q.output_width()}};
  }
  return r;
}

// ---------------------------------------------------------------- 2PQC

ProtocolParams protocol_params(const ExperimentConfig& c) {
  ProtocolParams p;
  try {
    p = ProtocolParams::preset(c.preset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  bool swap = c.preset.rfind("swap", 0) == 0;
  if (!swap && (c.n_z || c.n_t)) throw ConfigError("--n-z and --n-t apply to the swap presets only");
  if (c.lambda || c.n_z || c.n_t) {
    int lambda = c.lambda.value_or(p.lambda);
    if (lambda < 1) throw ConfigError("lambda must be at least 1");
    if (swap) {
      int q_zeros = p.q_zeros, n_t = c.n_t.value_or(p.n_t);
      if (n_t < 0) throw ConfigError("n_t must be non-negative");
      if (c.n_z) {
        ProtocolParams probe = ProtocolParams::swap(lambda, 0, n_t);
        q_zeros = *c.n_z - probe.n_z();
        if (q_zeros < 0) throw ConfigError("n_z must be at least " + std::to_string(probe.n_z()) + " at this lambda");
      }
      p = ProtocolParams::swap(lambda, q_zeros, n_t);
    } else {
      p = ProtocolParams::identity(lambda);
    }
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

std::pair<std::vector<cplx>, std::vector<cplx>> protocol_inputs(const ExperimentConfig& c, const ProtocolParams& p,
                                                                std::vector<std::string> fallback) {
  std::vector<std::string> names = c.inputs.empty() ? fallback : c.inputs;
  if (names.size() != 2) throw ConfigError("the two-party protocol takes two inputs");
  Rng rng(derive_seed(c.seed, 0, "inputs"));
  try {
    auto a = prepared_input(names[0], p.n_a, rng);
    auto b = prepared_input(names[1], p.n_b, rng);
    return {a, b};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Role parse_role(const std::string& s) {
  if (s == "A" || s == "a") return Role::A;
  if (s == "B" || s == "b") return Role::B;
  throw ConfigError("role must be A or B");
}

Adversary protocol_adversary(const std::string& name, Role role) {
  try {
    return canned_adversary(name, role);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Mat joint_block(const RunResult& r) {
  size_t dim = size_t{1} << (r.width_a + r.width_b);
  Mat m = Mat::Zero(dim + 1, dim + 1);
  if (!r.out_a || !r.out_b) {
    m(dim, dim) = 1;
    return m;
  }
  std::vector<int> qs = *r.out_a;
  qs.insert(qs.end(), r.out_b->begin(), r.out_b->end());
  m.topLeftCorner(dim, dim) = r.world.density(qs).matrix();
  return m;
}

Report run_2pqc(ExperimentConfig c) {
  if (c.preset.empty()) c.preset = "swap-min";
  if (c.adversary.empty()) c.adversary = "honest";
  bool honest = c.adversary == "honest";
  if (!c.trials) c.trials = 3000;
  if (!honest && c.role.empty()) c.role = "A";
  ProtocolParams p = protocol_params(c);
  auto [xa, xb] = protocol_inputs(c, p, {"random", "random"});
  std::optional<Adversary> adv;
  if (!honest) adv = protocol_adversary(c.adversary, parse_role(c.role));
  Report r;
  r.config = c.to_json();
  r.details["params"] = p.to_json();

  struct Trial {
    Mat block;
    std::string outcome;
  };
  std::vector<Trial> trials = shard<Trial>(c.trials, c.workers, [&](int t) {
    Rng rng(derive_seed(c.seed, t, "run-2pqc"));
    RunResult res = run_protocol(xa, xb, p, adv ? &*adv : nullptr, rng);
    Mat block = joint_block(res);
    return Trial{block, res.outcome(rng)};
  });
  MeanMatrix mean;
  std::map<std::string, int> hist;
  int aborts = 0;
  for (int t = 0; t < c.trials; ++t) {
    mean.add(trials[t].block);
    hist[trials[t].outcome]++;
    aborts += trials[t].block(trials[t].block.rows() - 1, trials[t].block.cols() - 1).real() > 0.5;
    r.csv.push_back(std::to_string(t) + ",real," + trials[t].outcome);
  }
  double abort_rate = aborts / static_cast<double>(c.trials);
  r.details["outcomes"] = histogram_json(hist);
  if (honest) {
    StateVector in = reference_input({xa, xb}, p.q_zeros, p.n_t);
    Mat expect = pad_abort(reduce(exact_cm_output(p.q, in).matrix(), 0, p.m_a + p.m_b));
    r.metrics.push_back(
        metric("honest.trace_distance", trace_norm_distance(mean.mean(), expect), mean.std_error(), "<", 0.03));
    r.metrics.push_back(metric("honest.abort_rate", abort_rate, freq_std_error(abort_rate, c.trials), "==", 0));
    if (c.exact) {
      // Honest outputs do not depend on measurement outcomes, so each seed's
      // density is exact.
      double worst = 0;
      int panel = std::min(c.trials, 40);
      for (int t = 0; t < panel; ++t) worst = std::max(worst, trace_norm_distance(trials[t].block, expect));
      r.metrics.push_back(metric("honest.per_seed_exact_distance", worst, 0, "<", 1e-6));
    }
  } else {
    r.metrics.push_back(metric("abort_rate", abort_rate, freq_std_error(abort_rate, c.trials)));
  }
  return r;
}

Report real_vs_ideal(ExperimentConfig c) {
  if (c.preset.empty()) c.preset = "swap-sec";
  if (!c.trials) c.trials = 10000;
  ProtocolParams p = protocol_params(c);
  auto [xa, xb] = protocol_inputs(c, p, {"0", "1"});
  std::vector<std::string> names = c.adversary.empty() ? canned_adversary_names() : std::vector<std::string>{c.adversary};
  std::vector<Role> roles = c.role.empty() ? std::vector<Role>{Role::A, Role::B} : std::vector<Role>{parse_role(c.role)};
  for (const auto& name : names) protocol_adversary(name, Role::A);
  Report r;
  r.config = c.to_json();
  r.details["params"] = p.to_json();
  r.details["histograms"] = Json::object();
  for (Role role : roles) {
    const char* side = role == Role::A ? "A" : "B";
    for (const auto& name : names) {
      Adversary adv = protocol_adversary(name, role);
      std::string label = std::string(side) + "." + name;
      auto pairs = shard<std::pair<std::string, std::string>>(c.trials, c.workers, [&](int t) {
        Rng rng(derive_seed(c.seed, t, "real-vs-ideal"));
        std::string real = run_protocol(xa, xb, p, &adv, rng).outcome(rng);
        std::string ideal = ideal_run(adv, xa, xb, p, rng).outcome(rng);
        return std::make_pair(real, ideal);
      });
      std::map<std::string, int> real, ideal;
      for (int t = 0; t < c.trials; ++t) {
        real[pairs[t].first]++;
        ideal[pairs[t].second]++;
        r.csv.push_back(std::to_string(t) + "," + label + ".real," + pairs[t].first);
        r.csv.push_back(std::to_string(t) + "," + label + ".ideal," + pairs[t].second);
      }
      r.metrics.push_back(metric(label + ".tvd", empirical_tvd(real, ideal), tvd_std_error(real, ideal), "<", 0.05));
      r.details["histograms"][label] = {{"real", histogram_json(real)}, {"ideal", histogram_json(ideal)}};
    }
  }
  return r;
}

// ---------------------------------------------------------------- MPQC

MpqcParams mpqc_params(const ExperimentConfig& c) {
  MpqcParams p;
  try {
    p = MpqcParams::preset(c.preset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.lambda || c.parties) {
    int lambda = c.lambda.value_or(p.lambda), n = c.parties.value_or(p.n());
    if (lambda < 1 || n < 1) throw ConfigError("lambda and the party count must be positive");
    p = c.preset.rfind("shift", 0) == 0 ? MpqcParams::cyclic_shift(n, lambda) : MpqcParams::identity(n, lambda);
  }
  if (c.n_z || c.n_t) throw ConfigError("--n-z and --n-t do not apply to the MPQC presets");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

Report run_mpqc_suite(ExperimentConfig c) {
  if (c.preset.empty()) c.preset = "shift3-min";
  if (c.adversary.empty()) c.adversary = "honest";
  bool honest = c.adversary == "honest";
  if (!c.trials) c.trials = honest ? 3000 : 300;
  if (!honest && !c.party) c.party = 1;
  MpqcParams p = mpqc_params(c);
  int n = p.n();
  if (c.inputs.empty())
    for (int i = 0; i < n; ++i) c.inputs.push_back(std::vector<std::string>{"0", "1", "+"}[i % 3]);
  if (static_cast<int>(c.inputs.size()) != n) throw ConfigError("one input per party");
  std::vector<std::vector<cplx>> xs;
  Rng in_rng(derive_seed(c.seed, 0, "inputs"));
  try {
    for (int i = 0; i < n; ++i) xs.push_back(prepared_input(c.inputs[i], p.m[i], in_rng));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::optional<MpqcAdversary> adv;
  if (!honest) {
    if (*c.party < 0 || *c.party >= n) throw ConfigError("corrupted party out of range");
    try {
      adv = canned_mpqc_adversary(c.adversary, *c.party);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  Report r;
  r.config = c.to_json();
  r.details["params"] = p.to_json();

  struct Trial {
    std::vector<Mat> blocks;
    std::vector<bool> bot, released;
    bool any_vote = false;
    std::string outcome;
  };
  std::vector<Trial> trials = shard<Trial>(c.trials, c.workers, [&](int t) {
    Rng rng(derive_seed(c.seed, t, "run-mpqc"));
    MpqcResult res = run_mpqc(xs, p, adv ? &*adv : nullptr, rng);
    Trial tr;
    for (int i = 0; i < n; ++i) {
      tr.blocks.push_back(res.output_block(i));
      tr.bot.push_back(!res.outputs[i]);
    }
    tr.released = res.released;
    tr.any_vote = std::find(res.votes.begin(), res.votes.end(), true) != res.votes.end();
    tr.outcome = res.outcome(rng);
    return tr;
  });
  std::vector<MeanMatrix> means(static_cast<size_t>(n));
  std::map<std::string, int> hist;
  int detected = 0, aborted = 0, unsafe = 0;
  for (int t = 0; t < c.trials; ++t) {
    const Trial& tr = trials[t];
    bool honest_bot = false, any_bot = false;
    for (int i = 0; i < n; ++i) {
      means[i].add(tr.blocks[i]);
      any_bot = any_bot || tr.bot[i];
      if (!adv || !adv->corrupts(i)) honest_bot = honest_bot || tr.bot[i];
      if (tr.any_vote && tr.released[i]) ++unsafe;
    }
    detected += honest_bot;
    aborted += any_bot;
    hist[tr.outcome]++;
    r.csv.push_back(std::to_string(t) + ",real," + tr.outcome);
  }
  r.details["outcomes"] = histogram_json(hist);
  r.metrics.push_back(metric("release_after_abort_vote", unsafe, 0, "==", 0));
  if (honest) {
    StateVector in = reference_input(xs, p.q_zeros, p.n_t);
    double worst_exact = 0;
    DensityMatrix full = exact_cm_output(p.q, in);
    int off = 0;
    for (int i = 0; i < n; ++i) {
      Mat expect = pad_abort(reduce(full.matrix(), off, p.l[i]));
      off += p.l[i];
      r.metrics.push_back(metric("party" + std::to_string(i + 1) + ".trace_distance",
                                 trace_norm_distance(means[i].mean(), expect), means[i].std_error(), "<", 0.05));
      if (c.exact)
        for (int t = 0; t < std::min(c.trials, 40); ++t)
          worst_exact = std::max(worst_exact, trace_norm_distance(trials[t].blocks[i], expect));
    }
    double rate = aborted / static_cast<double>(c.trials);
    r.metrics.push_back(metric("honest.abort_rate", rate, freq_std_error(rate, c.trials), "==", 0));
    if (c.exact) r.metrics.push_back(metric("honest.per_seed_exact_distance", worst_exact, 0, "<", 1e-6));
  } else {
    double rate = detected / static_cast<double>(c.trials);
    r.metrics.push_back(
        metric("detection_rate", rate, freq_std_error(rate, c.trials), ">=", 1 - std::pow(2.0, -p.lambda) - 0.05));
  }
  return r;
}

// ---------------------------------------------------------------- checks

std::vector<F2Matrix> all_gl(int dim) {
  std::vector<F2Matrix> out;
  int cells = dim * dim;
  for (uint64_t bits = 0; bits < (uint64_t{1} << cells); ++bits) {
    F2Matrix m(static_cast<size_t>(dim), static_cast<size_t>(dim));
    for (int i = 0; i < cells; ++i) m.set(i / dim, i % dim, (bits >> i) & 1);
    if (m.invertible()) out.push_back(std::move(m));
  }
  return out;
}

// (2^{2n} + 1)-dimensional block: accepted 2n-qubit state plus a reject entry.
Mat with_reject(const Mat& accept, double reject) {
  Mat out = Mat::Zero(accept.rows() + 1, accept.cols() + 1);
  out.topLeftCorner(accept.rows(), accept.cols()) = accept;
  out(accept.rows(), accept.cols()) = reject;
  return out;
}

// Gadget run through the Clifford circuit, check outcomes enumerated.
Mat gadget_channel(const ZeroCheckGadget& g, const std::vector<cplx>& amps) {
  int k = g.k();
  size_t dim = size_t{1} << (2 * k);
  StateVector s = StateVector::from_amplitudes(amps);
  s.apply_clifford(g.u, iota_vec(0, 2 * k));
  double p_pass = 1.0;
  for (int j = k; j < 2 * k; ++j) {
    if (1.0 - s.prob_one(j) < 1e-15) return with_reject(Mat::Zero(dim, dim), 1.0);
    p_pass *= s.project_z(j, false);
  }
  return with_reject(p_pass * s.density().matrix(), 1.0 - p_pass);
}

// Half projection after the basis permutation v -> Mv, computed on amplitudes.
Mat half_channel(const F2Matrix& m, const std::vector<cplx>& amps, int n) {
  size_t dim = amps.size();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (size_t b = 0; b < dim; ++b) {
    size_t img = static_cast<size_t>(m.mul_vec(BitVec::from_uint(static_cast<size_t>(2 * n), b)).to_uint());
    if ((img >> n) == 0) v(static_cast<Eigen::Index>(img)) = amps[b];
  }
  Mat acc = v * v.adjoint();
  return with_reject(acc, 1.0 - acc.trace().real());
}

Mat full_channel(const std::vector<cplx>& amps) {
  Mat acc = Mat::Zero(static_cast<Eigen::Index>(amps.size()), static_cast<Eigen::Index>(amps.size()));
  acc(0, 0) = std::norm(amps[0]);
  return with_reject(acc, 1.0 - std::norm(amps[0]));
}

void zero_suite(const ExperimentConfig& c, Report& r) {
  if (c.exhaustive) {
    int n = c.n.value_or(1);
    if (n < 1 || n > 2) throw ConfigError("exhaustive zero check supports n = 1 or 2");
    size_t dim = size_t{1} << (2 * n);
    std::vector<std::vector<cplx>> inputs;
    for (size_t b = 0; b < dim; ++b) {
      std::vector<cplx> a(dim, 0);
      a[b] = 1;
      inputs.push_back(a);
    }
    Rng rng(derive_seed(c.seed, 0, "zero-inputs"));
    for (int i = 0; i < 2; ++i) inputs.push_back(random_amps(2 * n, rng));
    std::vector<F2Matrix> gl = all_gl(2 * n);
    double worst = 0, gap = 0;
    for (const auto& amps : inputs) {
      Mat gadget = Mat::Zero(dim + 1, dim + 1), reference = Mat::Zero(dim + 1, dim + 1);
      for (const F2Matrix& m : gl) {
        gadget += gadget_channel(ZeroCheckGadget::from_matrix(m), amps);
        reference += half_channel(m, amps, n);
      }
      gadget /= static_cast<double>(gl.size());
      reference /= static_cast<double>(gl.size());
      worst = std::max(worst, trace_norm_distance(gadget, reference));
      gap = std::max(gap, trace_norm_distance(gadget, full_channel(amps)));
    }
    r.metrics.push_back(metric("zero.exhaustive_channel_distance", worst, 0, "<", 1e-9));
    r.metrics.push_back(metric("zero.gap_to_full_projection", gap, 0));
    r.details["zero"] = {{"n", n},
                         {"group_order", gl.size()},
                         {"inputs", inputs.size()},
                         {"gap_on_basis_inputs", (std::pow(2.0, n) - 1) / (std::pow(2.0, 2 * n) - 1)}};
    return;
  }
  int k = c.n.value_or(6);
  if (k < 1 || k > 32) throw ConfigError("zero check size must be in 1..32");
  int trials = c.trials ? c.trials : 10000;
  auto caught = shard<int>(trials, c.workers, [&](int t) {
    Rng rng(derive_seed(c.seed, t, "zero"));
    ZeroCheckGadget g = ZeroCheckGadget::sample(k, rng);
    FrameState f(2 * k);
    f.apply_gate({GateKind::X, static_cast<int>(rng.below(2 * k))});
    std::vector<int> qs = iota_vec(0, 2 * k);
    return zero_check(g, f, qs, rng).pass ? 0 : 1;
  });
  double rate = std::accumulate(caught.begin(), caught.end(), 0) / static_cast<double>(trials);
  r.metrics.push_back(metric("zero.catch_rate", rate, freq_std_error(rate, trials), ">=", 1 - std::pow(2.0, -k) - 0.02));
  r.details["zero"] = {{"k", k},
                       {"trials", trials},
                       {"closed_form", 1 - (std::pow(2.0, k) - 1) / (std::pow(2.0, 2 * k) - 1)}};
}

void t_suite(const ExperimentConfig& c, Report& r) {
  int n_t = c.n_t.value_or(2), lambda = c.lambda.value_or(2);
  if (n_t < 0 || lambda < 1) throw ConfigError("bad T-check sizes");
  int trials = c.trials ? c.trials : 20000;
  auto caught = shard<int>(trials, c.workers, [&](int t) {
    Rng rng(derive_seed(c.seed, t, "tcheck"));
    TCheckGadget g = TCheckGadget::sample(n_t, lambda, rng);
    FrameState f(0);
    int bad = static_cast<int>(rng.below(g.total()));
    for (int q = 0; q < g.total(); ++q) {
      if (q == bad)
        f.append_zeros(1);
      else
        f.append_amplitudes(t_state_amplitudes());
    }
    std::vector<int> qs = iota_vec(0, g.total());
    return t_check(g, f, qs, rng).pass ? 0 : 1;
  });
  double rate = std::accumulate(caught.begin(), caught.end(), 0) / static_cast<double>(trials);
  // The bad slot is checked with probability 1/(n_t+1) and then fails the T measurement half the time.
  double closed = 1.0 / (2.0 * (n_t + 1));
  r.metrics.push_back(near_metric("t.catch_rate", rate, freq_std_error(rate, trials), closed, 0.02));
  r.details["t"] = {{"n_t", n_t}, {"lambda", lambda}, {"trials", trials}, {"closed_form", closed}};
}

void auth_suite(const ExperimentConfig& c, Report& r) {
  int n = c.n.value_or(1), lambda = c.lambda.value_or(6);
  if (n < 1 || lambda < 1 || n + lambda > qubit_cap()) throw ConfigError("bad authentication sizes");
  int trials = c.trials ? c.trials : 10000;
  struct Trial {
    int rejected_attack = 0, rejected_honest = 0;
  };
  auto res = shard<Trial>(trials, c.workers, [&](int t) {
    Rng rng(derive_seed(c.seed, t, "auth"));
    StateVector x = StateVector::from_amplitudes(random_amps(n, rng));
    AuthKey key = AuthKey::sample(n, lambda, rng);
    StateVector e = auth_encode(key, x);
    Trial tr;
    tr.rejected_honest = !auth_decode(key, e, rng).has_value();
    std::vector<int> target = {static_cast<int>(rng.below(n + lambda))};
    const char* kinds[] = {"X", "Y", "Z"};
    e.apply_pauli(PauliOp::from_string(kinds[rng.below(3)]), target);
    tr.rejected_attack = !auth_decode(key, e, rng).has_value();
    return tr;
  });
  int attack = 0, honest = 0;
  for (const Trial& tr : res) {
    attack += tr.rejected_attack;
    honest += tr.rejected_honest;
  }
  double rate = attack / static_cast<double>(trials), honest_rate = honest / static_cast<double>(trials);
  // A twirled non-identity Pauli survives iff it has no X part on the traps.
  double all = std::pow(4.0, n + lambda) - 1, survive = std::pow(4.0, n) * std::pow(2.0, lambda) - 1;
  double closed = 1 - survive / all;
  r.metrics.push_back(
      metric("auth.reject_rate", rate, freq_std_error(rate, trials), ">=", 1 - 2 * std::pow(2.0, -lambda) - 0.01));
  r.metrics.push_back(near_metric("auth.reject_rate_vs_closed_form", rate, freq_std_error(rate, trials), closed, 0.01));
  r.metrics.push_back(metric("auth.honest_reject_rate", honest_rate, 0, "==", 0));
  r.details["auth"] = {{"n", n}, {"lambda", lambda}, {"trials", trials}, {"closed_form", closed}};
}

// Key for a pure one-qubit state up to global phase.
std::string state_key(const StateVector& s) {
  const Mat& m = s.density().matrix();
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.9f,%.9f,%.9f", m(0, 0).real() + 0.0, m(0, 1).real() + 0.0, m(0, 1).imag() + 0.0);
  return buf;
}

void clifford_suite(const ExperimentConfig& c, Report& r) {
  if (c.n.value_or(1) != 1) throw ConfigError("the rerandomization check runs at n = 1");
  int trials = c.trials ? c.trials : 20;
  std::vector<CliffordOp> group = single_qubit_cliffords();
  auto mismatched = shard<int>(trials, c.workers, [&](int t) {
    Rng rng(derive_seed(c.seed, t, "rerandomize"));
    CliffordOp rr = sample_clifford(1, rng);
    std::vector<cplx> x = random_amps(1, rng);
    auto apply = [&x](const CliffordOp& op) {
      StateVector s = StateVector::from_amplitudes(x);
      s.apply_clifford(op);
      return s;
    };
    std::multiset<std::pair<std::string, std::string>> lhs, rhs;
    for (const CliffordOp& cc : group) lhs.emplace(state_key(apply(cc)), compose(rr, inverse(cc)).to_hex());
    for (const CliffordOp& d : group) rhs.emplace(state_key(apply(compose(inverse(d), rr))), d.to_hex());
    return lhs == rhs ? 0 : 1;
  });
  int bad = std::accumulate(mismatched.begin(), mismatched.end(), 0);
  r.metrics.push_back(metric("clifford.group_order", static_cast<double>(group.size()), 0, "==", 24));
  r.metrics.push_back(metric("clifford.multiset_mismatches", bad, 0, "==", 0));
  r.details["clifford"] = {{"instances", trials}};
}

Report check_suite(ExperimentConfig c) {
  if (c.gadget.empty()) c.gadget = "zero";
  Report r;
  if (c.gadget == "zero")
    zero_suite(c, r);
  else if (c.gadget == "t")
    t_suite(c, r);
  else if (c.gadget == "auth")
    auth_suite(c, r);
  else if (c.gadget == "clifford")
    clifford_suite(c, r);
  else
    throw ConfigError("unknown gadget '" + c.gadget + "' (zero, t, auth, clifford)");
  r.config = c.to_json();
  return r;
}

// ---------------------------------------------------------------- bench

Report bench(ExperimentConfig c) {
  if (!c.trials) c.trials = 20;
  Report r;
  r.config = c.to_json();
  auto time_it = [&](const std::string& name, auto&& body) {
    auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < c.trials; ++t) {
      Rng rng(derive_seed(c.seed, t, name));
      body(rng);
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    r.timing["ms_per_op"][name] = ms / c.trials;
  };
  time_it("sample_clifford_16", [](Rng& rng) { sample_clifford(16, rng); });
  GarblePreset g = garble_preset("cm-d2", c.seed);
  time_it("qgarble_cm-d2", [&](Rng& rng) { qgarble(g.lambda, g.q, rng); });
  ProtocolParams swap = ProtocolParams::preset("swap-min");
  std::vector<cplx> zero = {1, 0}, one = {0, 1};
  time_it("run_2pqc_swap-min", [&](Rng& rng) { run_protocol(zero, one, swap, nullptr, rng); });
  MpqcParams shift = MpqcParams::preset("shift3-min");
  time_it("run_mpqc_shift3-min", [&](Rng& rng) { run_mpqc({zero, one, zero}, shift, nullptr, rng); });
  r.details["ops"] = {"sample_clifford_16", "qgarble_cm-d2", "run_2pqc_swap-min", "run_mpqc_shift3-min"};
  return r;
}

}  // namespace

// ---------------------------------------------------------------- public

nlohmann::json ExperimentConfig::to_json() const {
  auto opt = [](const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"command", command},
          {"preset", preset},
          {"circuit", circuit ? *circuit : Json(nullptr)},
          {"lambda", opt(lambda)},
          {"n_z", opt(n_z)},
          {"n_t", opt(n_t)},
          {"n", opt(n)},
          {"parties", opt(parties)},
          {"adversary", adversary},
          {"party", opt(party)},
          {"role", role},
          {"gadget", gadget},
          {"inputs", inputs},
          {"seed", seed},
          {"trials", trials},
          {"exact", exact},
          {"exhaustive", exhaustive}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {"command", "preset", "circuit", "lambda", "n_z",   "n_t",
                                              "n",       "parties", "adversary", "party", "role", "gadget",
                                              "inputs",  "seed",   "trials",  "exact",  "exhaustive", "workers"};
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  ExperimentConfig c;
  try {
    auto str = [&](const char* k, std::string& out) {
      if (j.contains(k) && !j[k].is_null()) out = j[k].get<std::string>();
    };
    auto num = [&](const char* k, std::optional<int>& out) {
      if (j.contains(k) && !j[k].is_null()) out = j[k].get<int>();
    };
    str("command", c.command);
    str("preset", c.preset);
    str("adversary", c.adversary);
    str("role", c.role);
    str("gadget", c.gadget);
    if (j.contains("circuit") && !j["circuit"].is_null()) c.circuit = j["circuit"];
    num("lambda", c.lambda);
    num("n_z", c.n_z);
    num("n_t", c.n_t);
    num("n", c.n);
    num("parties", c.parties);
    num("party", c.party);
    if (j.contains("inputs")) c.inputs = j["inputs"].get<std::vector<std::string>>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("exact")) c.exact = j["exact"].get<bool>();
    if (j.contains("exhaustive")) c.exhaustive = j["exhaustive"].get<bool>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

bool Metric::pass() const {
  if (op.empty()) return true;
  if (op == "<") return value < bound;
  if (op == "<=") return value <= bound;
  if (op == ">=") return value >= bound;
  if (op == "==") return value == bound;
  if (op == "near") return std::abs(value - target) <= bound;
  throw std::logic_error("unknown tolerance operator " + op);
}

nlohmann::json Metric::to_json() const {
  Json tol = nullptr;
  if (op == "near")
    tol = {{"op", op}, {"target", target}, {"bound", bound}};
  else if (!op.empty())
    tol = {{"op", op}, {"bound", bound}};
  return {{"name", name}, {"value", value}, {"stderr", std_error}, {"tolerance", tol}, {"pass", pass()}};
}

bool Report::pass() const {
  return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass(); });
}

const Metric& Report::metric(const std::string& name) const {
  for (const Metric& m : metrics)
    if (m.name == name) return m;
  throw std::out_of_range("no metric '" + name + "' in " + suite + " report");
}

nlohmann::json Report::to_json(bool with_timing) const {
  Json ms = Json::array();
  for (const Metric& m : metrics) ms.push_back(m.to_json());
  Json j = {{"suite", suite}, {"config", config}, {"metrics", ms}, {"details", details}, {"pass", pass()}};
  if (with_timing) j["timing"] = timing;
  return j;
}

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> names = {"garble-demo",   "run-2pqc", "run-mpqc",
                                                 "check-suite",   "real-vs-ideal", "bench"};
  return names;
}

Report run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 0) throw ConfigError("trials must be at least 1");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (cfg.circuit && cfg.command != "garble-demo") throw ConfigError("--circuit applies to garble-demo only");
  auto t0 = std::chrono::steady_clock::now();
  Report r;
  if (cfg.command == "garble-demo")
    r = garble_demo(cfg);
  else if (cfg.command == "run-2pqc")
    r = run_2pqc(cfg);
  else if (cfg.command == "run-mpqc")
    r = run_mpqc_suite(cfg);
  else if (cfg.command == "check-suite")
    r = check_suite(cfg);
  else if (cfg.command == "real-vs-ideal")
    r = real_vs_ideal(cfg);
  else if (cfg.command == "bench")
    r = bench(cfg);
  else
    throw ConfigError("unknown command '" + cfg.command + "'");
  r.suite = cfg.command;
  r.timing["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<cplx> named_state(const std::string& name) {
  const double h = std::sqrt(0.5);
  if (name == "0") return {1, 0};
  if (name == "1") return {0, 1};
  if (name == "+") return {h, h};
  if (name == "-") return {h, -h};
  if (name == "+i") return {h, cplx(0, h)};
  if (name == "-i") return {h, cplx(0, -h)};
  if (name == "T") return t_state_amplitudes();
  throw std::invalid_argument("unknown preparation '" + name + "' (0, 1, +, -, +i, -i, T, random)");
}

DensityMatrix exact_cm_output(const CMCircuit& q, const StateVector& in) {
  if (in.num_qubits() != q.n0()) throw std::invalid_argument("exact_cm_output: input size mismatch");
  StateVector s = in;
  s.apply_clifford(q.f0);
  size_t dim = size_t{1} << q.output_width();
  Mat acc = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  cm_branches(std::move(s), q, 0, 1.0, acc);
  return DensityMatrix(acc);
}

const std::vector<std::string>& garble_preset_names() {
  static const std::vector<std::string> names = {"cm-d0", "cm-min", "cm-k2", "cm-d2", "cm-d2-l1"};
  return names;
}

GarblePreset garble_preset(const std::string& name, uint64_t circuit_seed) {
  static const std::map<std::string, std::tuple<int, std::vector<std::pair<int, int>>, int>> shapes = {
      {"cm-d0", {2, {}, 1}},
      {"cm-min", {2, {{1, 1}}, 1}},
      {"cm-k2", {3, {{1, 2}}, 2}},
      {"cm-d2", {3, {{2, 1}, {1, 1}}, 2}},
      {"cm-d2-l1", {3, {{2, 1}, {1, 1}}, 1}},
  };
  auto it = shapes.find(name);
  if (it == shapes.end()) throw ConfigError("unknown garbling preset '" + name + "'");
  auto [n0, layers, lambda] = it->second;
  Rng rng(derive_seed(circuit_seed, 0, "circuit:" + name));
  return {name, random_circuit(n0, layers, rng), lambda};
}

}  // namespace qmpc
