// SPDX-License-Identifier: Apache-2.0
// Dense-matrix reference used only by tests. Qubit q is bit q of the basis index.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "qmpc/clifford.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat single(char p) {
  Mat m(2, 2);
  const cd i(0, 1);
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    case 'H': m << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2; break;
    case 'S': m << 1, 0, 0, i; break;
    case 's': m << 1, 0, 0, -i; break;
    case 'T': m << 1, 0, 0, std::polar(1.0, M_PI / 4); break;
    case 't': m << 1, 0, 0, std::polar(1.0, -M_PI / 4); break;
    default: m << 1, 0, 0, 1;
  }
  return m;
}

// Operator acting as m on qubit q of an n-qubit register.
inline Mat on_qubit(const Mat& m, int q, int n) {
  size_t d = size_t{1} << n;
  Mat out = Mat::Zero(d, d);
  for (size_t col = 0; col < d; ++col) {
    int b = (col >> q) & 1;
    for (int a = 0; a < 2; ++a) {
      size_t row = (col & ~(size_t{1} << q)) | (size_t(a) << q);
      out(row, col) += m(a, b);
    }
  }
  return out;
}

inline Mat permutation_matrix(int n, const std::function<size_t(size_t)>& f) {
  size_t d = size_t{1} << n;
  Mat out = Mat::Zero(d, d);
  for (size_t col = 0; col < d; ++col) out(f(col), col) = 1;
  return out;
}

inline Mat gate_matrix(const qmpc::Gate& g, int n) {
  using qmpc::GateKind;
  switch (g.kind) {
    case GateKind::H: return on_qubit(single('H'), g.q0, n);
    case GateKind::S: return on_qubit(single('S'), g.q0, n);
    case GateKind::Sdg: return on_qubit(single('s'), g.q0, n);
    case GateKind::X: return on_qubit(single('X'), g.q0, n);
    case GateKind::Y: return on_qubit(single('Y'), g.q0, n);
    case GateKind::Z: return on_qubit(single('Z'), g.q0, n);
    case GateKind::T: return on_qubit(single('T'), g.q0, n);
    case GateKind::Tdg: return on_qubit(single('t'), g.q0, n);
    case GateKind::CNOT:
      return permutation_matrix(n, [&](size_t v) {
        return ((v >> g.q0) & 1) ? v ^ (size_t{1} << g.q1) : v;
      });
    case GateKind::SWAP:
      return permutation_matrix(n, [&](size_t v) {
        size_t a = (v >> g.q0) & 1, b = (v >> g.q1) & 1;
        if (a == b) return v;
        return v ^ (size_t{1} << g.q0) ^ (size_t{1} << g.q1);
      });
    case GateKind::CZ: {
      size_t d = size_t{1} << n;
      Mat out = Mat::Identity(d, d);
      for (size_t v = 0; v < d; ++v)
        if (((v >> g.q0) & 1) && ((v >> g.q1) & 1)) out(v, v) = -1;
      return out;
    }
  }
  return Mat();
}

inline Mat circuit_matrix(const qmpc::GateSeq& gates, int n) {
  size_t d = size_t{1} << n;
  Mat u = Mat::Identity(d, d);
  for (const auto& g : gates) u = gate_matrix(g, n) * u;
  return u;
}

// i^phase X^x Z^z.
inline Mat pauli_matrix(const qmpc::PauliOp& p) {
  int n = static_cast<int>(p.n());
  size_t d = size_t{1} << n;
  Mat m = Mat::Identity(d, d);
  for (int q = 0; q < n; ++q)
    if (p.x().get(q)) m = m * on_qubit(single('X'), q, n);
  for (int q = 0; q < n; ++q)
    if (p.z().get(q)) m = m * on_qubit(single('Z'), q, n);
  const cd ph[] = {1, cd(0, 1), -1, cd(0, -1)};
  return ph[p.phase()] * m;
}

inline Vec basis(int n, size_t index) {
  Vec v = Vec::Zero(size_t{1} << n);
  v(index) = 1;
  return v;
}

inline double trace_distance(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline Mat projector(const Vec& v) { return v * v.adjoint(); }

}  // namespace oracle
