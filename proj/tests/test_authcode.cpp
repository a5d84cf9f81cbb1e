// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "qmpc/authcode.hpp"

using namespace qmpc;

namespace {

StateVector random_state(int n, Rng& rng) {
  std::vector<cplx> a(size_t{1} << n);
  double s = 0;
  for (auto& x : a) {
    x = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    s += std::norm(x);
  }
  for (auto& x : a) x /= std::sqrt(s);
  return StateVector::from_amplitudes(a);
}

// Number of non-identity Paulis on n + lambda qubits whose trap part has no X
// component, i.e. the attacks that survive decoding after the Clifford twirl.
struct PauliCounts {
  double accepted_total;  // excludes the identity
  double accepted_data_identity;
  double all_nonidentity;
};

PauliCounts brute_force_counts(int n, int lambda) {
  int m = n + lambda;
  PauliCounts c{0, 0, 0};
  for (uint64_t x = 0; x < (uint64_t{1} << m); ++x)
    for (uint64_t z = 0; z < (uint64_t{1} << m); ++z) {
      if (x == 0 && z == 0) continue;
      c.all_nonidentity += 1;
      bool trap_x = (x >> n) != 0;
      if (trap_x) continue;
      c.accepted_total += 1;
      uint64_t data_mask = (uint64_t{1} << n) - 1;
      if ((x & data_mask) == 0 && (z & data_mask) == 0) c.accepted_data_identity += 1;
    }
  return c;
}

}  // namespace

TEST(AuthEncode, RoundTrip) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    StateVector x = random_state(1, rng);
    AuthKey key = AuthKey::sample(1, 2, rng);
    StateVector e = auth_encode(key, x);
    EXPECT_EQ(e.num_qubits(), 3);
    auto d = auth_decode(key, e, rng);
    ASSERT_TRUE(d.has_value());
    std::vector<int> q0 = {0};
    EXPECT_LT(trace_distance(d->density(q0), x.density(q0)), 1e-9);
  }
}

TEST(AuthEncode, SizeMismatch) {
  Rng rng(2);
  AuthKey key = AuthKey::sample(1, 2, rng);
  EXPECT_THROW(auth_encode(key, StateVector(2)), std::invalid_argument);
  EXPECT_THROW(auth_decode(key, StateVector(2), rng), std::invalid_argument);
}

TEST(AuthEncode, PerfectHidingOneTrap) {
  Rng rng(3);
  DensityAccumulator acc;
  for (int t = 0; t < 20000; ++t) acc.add(auth_encode(AuthKey::sample(1, 1, rng), StateVector(1)).density());
  EXPECT_LT(trace_distance(acc.mean(), DensityMatrix::maximally_mixed(2)), 0.03);
}

TEST(AuthEncode, HidingTwoInputs) {
  Rng rng(4);
  StateVector a(1), b = StateVector::from_amplitudes({M_SQRT1_2, cplx(0, M_SQRT1_2)});
  DensityAccumulator acc_a, acc_b;
  for (int t = 0; t < 20000; ++t) {
    acc_a.add(auth_encode(AuthKey::sample(1, 1, rng), a).density());
    acc_b.add(auth_encode(AuthKey::sample(1, 1, rng), b).density());
  }
  EXPECT_LT(trace_distance(acc_a.mean(), acc_b.mean()), 0.03);
}

TEST(AuthDecode, HonestNeverRejects) {
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    AuthKey key = AuthKey::sample(2, 3, rng);
    EXPECT_TRUE(auth_decode(key, auth_encode(key, random_state(2, rng)), rng).has_value());
  }
}

TEST(AuthDecode, SingleXRejectedAtSixTraps) {
  const int n = 1, lambda = 6, trials = 10000;
  PauliCounts c = brute_force_counts(n, lambda);
  double exact_reject = 1.0 - c.accepted_total / c.all_nonidentity;
  Rng rng(6);
  int rejects = 0;
  std::vector<int> target = {3};
  for (int t = 0; t < trials; ++t) {
    AuthKey key = AuthKey::sample(n, lambda, rng);
    StateVector e = auth_encode(key, StateVector(1));
    e.apply_pauli(PauliOp::from_string("X"), target);
    rejects += !auth_decode(key, e, rng).has_value();
  }
  double freq = rejects / static_cast<double>(trials);
  EXPECT_GE(freq, 1.0 - 2.0 * std::pow(2.0, -lambda) - 0.01);
  EXPECT_NEAR(freq, exact_reject, 0.01);
}

// Definition-level check: the decoded mixture (accept branch with its weight,
// plus the reject weight) is close to p0 * x + (1 - p0) * reject for some p0.
TEST(AuthDecode, PauliAttackMatchesIdealMixture) {
  const int n = 1, lambda = 4, trials = 100000;
  Rng rng(7);
  StateVector x = random_state(1, rng);
  DensityMatrix rho = x.density();
  PauliOp attack = PauliOp::from_string("XZYIZ");
  std::vector<int> all = iota_vec(0, n + lambda);
  Eigen::MatrixXcd acc_sum = Eigen::MatrixXcd::Zero(2, 2);
  int accepts = 0;
  for (int t = 0; t < trials; ++t) {
    AuthKey key = AuthKey::sample(n, lambda, rng);
    StateVector e = auth_encode(key, x);
    e.apply_pauli(attack, all);
    auto d = auth_decode(key, e, rng);
    if (!d) continue;
    ++accepts;
    acc_sum += d->density().matrix();
  }
  ASSERT_GE(accepts, 5000);
  Eigen::MatrixXcd sigma = acc_sum / static_cast<double>(trials);
  double p_acc = accepts / static_cast<double>(trials);
  double best = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    double p0 = p_acc * i / 1000.0;
    Eigen::MatrixXcd diff = sigma - p0 * rho.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff);
    double d = 0.5 * (es.eigenvalues().cwiseAbs().sum() + std::abs(p_acc - p0));
    best = std::min(best, d);
  }
  // Twirled attacks that pass the traps but touch the data form the garbage
  // mass G; the optimum distance for a qubit is 2G/3.
  PauliCounts c = brute_force_counts(n, lambda);
  double garbage = (c.accepted_total - c.accepted_data_identity) / c.all_nonidentity;
  EXPECT_NEAR(best, 2.0 * garbage / 3.0, 0.01);
  EXPECT_LT(best, 0.05);
}

TEST(AuthDecode, FrameStateAgrees) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    AuthKey key = AuthKey::sample(1, 3, rng);
    FrameState f(4);
    f.apply_gate({GateKind::H, 0});
    f.apply_gate({GateKind::T, 0});
    std::vector<int> qs = {0, 1, 2, 3};
    auth_encode_in_place(f, key, qs);
    ASSERT_TRUE(auth_decode_in_place(f, key, qs, rng));
    std::vector<int> q0 = {0};
    EXPECT_LT(trace_distance(f.density(q0), DensityMatrix::pure(t_state_amplitudes())), 1e-9);
  }
}
