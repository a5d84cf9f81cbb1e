// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <algorithm>
#include <map>
#include <set>

#include "dense_oracle.hpp"
#include "qmpc/clifford.hpp"

using namespace qmpc;
using oracle::Mat;

namespace {

GateSeq random_circuit(int n, int len, Rng& rng) {
  static const GateKind one[] = {GateKind::H, GateKind::S, GateKind::Sdg, GateKind::X, GateKind::Y, GateKind::Z};
  static const GateKind two[] = {GateKind::CNOT, GateKind::CZ, GateKind::SWAP};
  GateSeq g;
  for (int i = 0; i < len; ++i) {
    if (n > 1 && rng.bit()) {
      int a = static_cast<int>(rng.below(n)), b = static_cast<int>(rng.below(n - 1));
      if (b >= a) ++b;
      g.push_back({two[rng.below(3)], a, b});
    } else {
      g.push_back({one[rng.below(6)], static_cast<int>(rng.below(n))});
    }
  }
  return g;
}

bool matrices_close(const Mat& a, const Mat& b, double tol = 1e-9) { return (a - b).norm() < tol; }

// Equal up to a global phase.
bool equal_up_to_phase(const oracle::Vec& a, const oracle::Vec& b) {
  std::complex<double> ip = a.dot(b);
  return std::abs(std::abs(ip) - 1.0) < 1e-9 && (a * ip - b).norm() < 1e-9;
}

void expect_circuit_matches_tableau(const GateSeq& gates, const CliffordOp& c) {
  int n = static_cast<int>(c.n());
  Mat u = oracle::circuit_matrix(gates, n);
  for (int q = 0; q < n; ++q) {
    for (char p : {'X', 'Z'}) {
      Mat lhs = u * oracle::pauli_matrix(PauliOp::single(n, q, p)) * u.adjoint();
      const PauliOp& img = p == 'X' ? c.image_x(q) : c.image_z(q);
      EXPECT_TRUE(matrices_close(lhs, oracle::pauli_matrix(img)));
    }
  }
}

std::string state_key(const oracle::Vec& v) {
  Mat rho = oracle::projector(v);
  std::string key;
  char buf[64];
  for (int r = 0; r < rho.rows(); ++r)
    for (int c = 0; c < rho.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f;", rho(r, c).real() + 0.0, rho(r, c).imag() + 0.0);
      key += buf;
    }
  return key;
}

// The 24 single-qubit Cliffords by closure under H and S.
std::vector<CliffordOp> enumerate_c1() {
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

}  // namespace

TEST(PauliMul, Examples) {
  EXPECT_TRUE((PauliOp::from_string("X") * PauliOp::from_string("X")).is_identity_up_to_phase());
  EXPECT_EQ((PauliOp::from_string("X") * PauliOp::from_string("X")).phase(), 0);
  PauliOp xz = pauli_mul(PauliOp::from_string("X"), PauliOp::from_string("Z"));
  PauliOp zx = pauli_mul(PauliOp::from_string("Z"), PauliOp::from_string("X"));
  EXPECT_TRUE(xz.same_up_to_phase(zx));
  EXPECT_EQ((xz.phase() - zx.phase() + 4) % 4, 2);
  PauliOp a = PauliOp::from_string("XZ"), b = PauliOp::from_string("ZX");
  EXPECT_TRUE(a.commutes(b));
  EXPECT_EQ(a * b, b * a);
}

TEST(PauliMul, SizeMismatchThrows) {
  EXPECT_THROW(PauliOp(2) * PauliOp(3), std::invalid_argument);
}

TEST(PauliMul, MatchesDenseProduct) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    int n = 1 + static_cast<int>(rng.below(3));
    PauliOp p = random_pauli(n, rng), q = random_pauli(n, rng);
    p.add_phase(static_cast<int>(rng.below(4)));
    EXPECT_TRUE(matrices_close(oracle::pauli_matrix(p * q), oracle::pauli_matrix(p) * oracle::pauli_matrix(q)));
  }
}

TEST(PauliOp, StringRoundTrip) {
  for (std::string s : {"+XIZ", "-Y", "+iZZ", "-iX", "+YY"})
    EXPECT_EQ(PauliOp::from_string(s).to_string(), s);
  EXPECT_TRUE(matrices_close(oracle::pauli_matrix(PauliOp::from_string("Y")), oracle::single('Y')));
}

TEST(Conjugate, Examples) {
  CliffordOp h = CliffordOp::from_gate(1, {GateKind::H, 0});
  EXPECT_EQ(conjugate(h, PauliOp::from_string("X")), PauliOp::from_string("Z"));
  CliffordOp s = CliffordOp::from_gate(1, {GateKind::S, 0});
  EXPECT_EQ(conjugate(s, PauliOp::from_string("X")), PauliOp::from_string("Y"));
  CliffordOp cx = CliffordOp::from_gate(2, {GateKind::CNOT, 0, 1});
  EXPECT_EQ(conjugate(cx, PauliOp::from_string("XI")), PauliOp::from_string("XX"));
  EXPECT_THROW(conjugate(cx, PauliOp(3)), std::invalid_argument);
}

TEST(Conjugate, MatchesDenseOracle) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    int n = 1 + static_cast<int>(rng.below(4));
    GateSeq g = random_circuit(n, 12, rng);
    CliffordOp c = CliffordOp::from_gates(n, g);
    Mat u = oracle::circuit_matrix(g, n);
    PauliOp p = random_pauli(n, rng);
    p.add_phase(static_cast<int>(rng.below(4)));
    EXPECT_TRUE(matrices_close(oracle::pauli_matrix(c.conjugate(p)), u * oracle::pauli_matrix(p) * u.adjoint()));
  }
}

TEST(SampleClifford, SingleQubitUniform) {
  std::vector<CliffordOp> group = enumerate_c1();
  ASSERT_EQ(group.size(), 24u);
  std::map<std::string, int> counts;
  for (const auto& c : group) counts[c.to_hex()] = 0;
  Rng rng(3);
  const int draws = 48000;
  for (int t = 0; t < draws; ++t) {
    auto it = counts.find(sample_clifford(1, rng).to_hex());
    ASSERT_NE(it, counts.end());
    ++it->second;
  }
  double chi2 = 0, expect = draws / 24.0;
  for (auto& [k, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
  EXPECT_GT(1 - boost::math::cdf(boost::math::chi_squared(23), chi2), 0.01);
}

TEST(SampleClifford, TwoQubitGroupOrder) {
  // |C_2| / |P_2| = 720 symplectic matrices; with signs there are 11520 tableaux.
  Rng rng(4);
  std::map<std::string, int> counts;
  const int draws = 400000;
  for (int t = 0; t < draws; ++t) ++counts[sample_clifford(2, rng).to_hex()];
  EXPECT_EQ(counts.size(), 11520u);
  double chi2 = 0, expect = draws / 11520.0;
  for (auto& [k, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
  EXPECT_GT(1 - boost::math::cdf(boost::math::chi_squared(11519), chi2), 0.01);
}

TEST(SampleClifford, AlwaysSymplectic) {
  Rng rng(5);
  for (size_t n = 1; n <= 10; ++n)
    for (int t = 0; t < 50; ++t) EXPECT_TRUE(sample_clifford(n, rng).is_valid());
}

TEST(SampleClifford, SingleQubitTwirl) {
  Rng rng(6);
  const int draws = 20000;
  Mat avg = Mat::Zero(2, 2);
  for (int t = 0; t < draws; ++t) {
    CliffordOp c = sample_clifford(1, rng);
    oracle::Vec v = oracle::circuit_matrix(to_gates(c), 1) * oracle::basis(1, 0);
    avg += oracle::projector(v);
  }
  avg /= draws;
  EXPECT_LT(oracle::trace_distance(avg, Mat::Identity(2, 2) / 2.0), 0.02);
}

TEST(ComposeInverse, Examples) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    size_t n = 1 + rng.below(5);
    CliffordOp c = sample_clifford(n, rng);
    EXPECT_EQ(compose(c, inverse(c)), CliffordOp::identity(n));
    EXPECT_EQ(compose(inverse(c), c), CliffordOp::identity(n));
  }
  CliffordOp h = CliffordOp::from_gate(1, {GateKind::H, 0});
  EXPECT_EQ(inverse(h), h);
  EXPECT_THROW(compose(CliffordOp(2), CliffordOp(3)), std::invalid_argument);
}

TEST(ComposeInverse, Associativity) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    CliffordOp a = sample_clifford(3, rng), b = sample_clifford(3, rng), c = sample_clifford(3, rng);
    EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
  }
}

TEST(ComposeInverse, Homomorphism) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    size_t n = 1 + rng.below(4);
    CliffordOp a = sample_clifford(n, rng), b = sample_clifford(n, rng);
    PauliOp p = random_pauli(n, rng);
    EXPECT_EQ(conjugate(compose(a, b), p), conjugate(a, conjugate(b, p)));
  }
}

TEST(ComposeInverse, AppliesSecondArgumentFirst) {
  Rng rng(10);
  GateSeq g1 = random_circuit(3, 10, rng), g2 = random_circuit(3, 10, rng);
  GateSeq both = g2;
  both.insert(both.end(), g1.begin(), g1.end());
  EXPECT_EQ(compose(CliffordOp::from_gates(3, g1), CliffordOp::from_gates(3, g2)), CliffordOp::from_gates(3, both));
}

TEST(ToGates, IdentityActsTrivially) {
  for (int n = 1; n <= 3; ++n) {
    Mat u = oracle::circuit_matrix(to_gates(CliffordOp(n)), n);
    for (size_t b = 0; b < (size_t{1} << n); ++b)
      EXPECT_TRUE(equal_up_to_phase(u * oracle::basis(n, b), oracle::basis(n, b)));
  }
}

TEST(ToGates, ConjugationMatchesTableau) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    size_t n = 1 + rng.below(4);
    CliffordOp c = sample_clifford(n, rng);
    GateSeq g = to_gates(c);
    for (const Gate& gate : g)
      EXPECT_TRUE(gate.kind == GateKind::H || gate.kind == GateKind::S || gate.kind == GateKind::CNOT ||
                  gate.kind == GateKind::X || gate.kind == GateKind::Z || gate.kind == GateKind::SWAP);
    expect_circuit_matches_tableau(g, c);
  }
}

TEST(ToGates, RoundTripPreservesStates) {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    int n = 1 + static_cast<int>(rng.below(4));
    GateSeq g = random_circuit(n, 15, rng);
    GateSeq back = to_gates(CliffordOp::from_gates(n, g));
    Mat u = oracle::circuit_matrix(g, n), w = oracle::circuit_matrix(back, n);
    oracle::Vec zero = oracle::basis(n, 0);
    oracle::Vec plus = oracle::Vec::Constant(size_t{1} << n, std::pow(M_SQRT1_2, n));
    EXPECT_TRUE(equal_up_to_phase(u * zero, w * zero));
    EXPECT_TRUE(equal_up_to_phase(u * plus, w * plus));
  }
}

TEST(ToGates, MalformedTableauThrows) {
  std::vector<PauliOp> imgs = {PauliOp::from_string("X"), PauliOp::from_string("X")};
  EXPECT_THROW(CliffordOp::from_images(imgs), InvalidTableau);
}

TEST(Serialize, RoundTrip) {
  CliffordOp id(2);
  EXPECT_EQ(CliffordOp::deserialize(id.serialize()), id);
  EXPECT_EQ(id.to_hex().substr(0, 12), "434c49467631");  // "CLIFv1"
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    CliffordOp c = sample_clifford(3, rng);
    EXPECT_EQ(CliffordOp::deserialize(c.serialize()), c);
    EXPECT_EQ(CliffordOp::from_hex(c.to_hex()), c);
  }
}

TEST(Serialize, CorruptionRejected) {
  Rng rng(14);
  CliffordOp c = sample_clifford(3, rng);
  std::vector<uint8_t> bytes = c.serialize();
  auto bad_header = bytes;
  bad_header[0] ^= 1;
  EXPECT_THROW(CliffordOp::deserialize(bad_header), InvalidTableau);
  auto bad_phase = bytes;
  bad_phase.back() = 7;
  EXPECT_THROW(CliffordOp::deserialize(bad_phase), InvalidTableau);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(CliffordOp::deserialize(truncated), InvalidTableau);
  // Flipping the x bit of qubit 0 in the first row breaks {X_0, Z_0} anticommutation.
  auto bad_row = bytes;
  bad_row[8] ^= 0x80;
  EXPECT_THROW(CliffordOp::deserialize(bad_row), InvalidTableau);
  // Any single bit flip in the tableau is either rejected or yields a different valid tableau.
  for (size_t i = 8; i < bytes.size(); ++i)
    for (int b = 0; b < 8; ++b) {
      auto mod = bytes;
      mod[i] ^= static_cast<uint8_t>(1 << b);
      try {
        EXPECT_FALSE(CliffordOp::deserialize(mod) == c);
      } catch (const InvalidTableau&) {
      }
    }
}

TEST(Rerandomization, SingleQubitMultisetIdentity) {
  std::vector<CliffordOp> group = enumerate_c1();
  Rng rng(15);
  for (int t = 0; t < 5; ++t) {
    CliffordOp r = sample_clifford(1, rng);
    oracle::Vec x(2);
    x << std::complex<double>(rng.uniform() - 0.5, rng.uniform() - 0.5),
        std::complex<double>(rng.uniform() - 0.5, rng.uniform() - 0.5);
    x.normalize();
    auto apply = [](const CliffordOp& c, const oracle::Vec& v) {
      return oracle::Vec(oracle::circuit_matrix(to_gates(c), 1) * v);
    };
    std::vector<std::pair<std::string, std::string>> lhs, rhs;
    for (const CliffordOp& c : group) lhs.emplace_back(state_key(apply(c, x)), compose(r, inverse(c)).to_hex());
    for (const CliffordOp& d : group)
      rhs.emplace_back(state_key(apply(compose(inverse(d), r), x)), d.to_hex());
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Embedding, TensorAndEmbedMatchDense) {
  Rng rng(16);
  CliffordOp a = sample_clifford(1, rng), b = sample_clifford(2, rng);
  CliffordOp ab = tensor(a, b);
  GateSeq g = to_gates(a);
  for (Gate x : to_gates(b)) {
    x.q0 += 1;
    if (x.q1 >= 0) x.q1 += 1;
    g.push_back(x);
  }
  EXPECT_EQ(ab, CliffordOp::from_gates(3, g));
  std::vector<int> qs = {2, 0};
  CliffordOp e = embed(b, 3, qs);
  GateSeq ge;
  for (Gate x : to_gates(b)) {
    x.q0 = qs[x.q0];
    if (x.q1 >= 0) x.q1 = qs[x.q1];
    ge.push_back(x);
  }
  EXPECT_EQ(e, CliffordOp::from_gates(3, ge));
}

TEST(Special, PermutationPauliAndLinearMap) {
  CliffordOp p = CliffordOp::permutation({2, 0, 1});
  EXPECT_EQ(p.conjugate(PauliOp::from_string("XIZ")), PauliOp::from_string("IZX"));
  PauliOp r = PauliOp::from_string("XYZ");
  CliffordOp cr = CliffordOp::from_pauli(r);
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    PauliOp q = random_pauli(3, rng);
    EXPECT_TRUE(matrices_close(oracle::pauli_matrix(cr.conjugate(q)),
                               oracle::pauli_matrix(r) * oracle::pauli_matrix(q) * oracle::pauli_matrix(r).adjoint()));
  }
  F2Matrix m = sample_gl(3, rng);
  Mat u = oracle::circuit_matrix(to_gates(CliffordOp::from_linear_map(m)), 3);
  for (uint64_t v = 0; v < 8; ++v) {
    oracle::Vec out = u * oracle::basis(3, v);
    EXPECT_TRUE(equal_up_to_phase(out, oracle::basis(3, m.mul_vec(BitVec::from_uint(3, v)).to_uint())));
  }
}
