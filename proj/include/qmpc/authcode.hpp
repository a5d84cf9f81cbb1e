// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qmpc/frame_state.hpp"

namespace qmpc {

// Key of the n-qubit, lambda-trap Clifford code.
struct AuthKey {
  CliffordOp c;
  int n = 0;
  int lambda = 0;

  static AuthKey sample(int n, int lambda, Rng& rng) {
    return {sample_clifford(static_cast<size_t>(n + lambda), rng), n, lambda};
  }
};

// Applies the key to data qubits followed by trap qubits (traps must hold |0>).
template <QuantumState S>
void auth_encode_in_place(S& state, const AuthKey& key, std::span<const int> qubits) {
  if (qubits.size() != static_cast<size_t>(key.n + key.lambda))
    throw std::invalid_argument("auth_encode: register size mismatch");
  state.apply_clifford(key.c, qubits);
}

// Undoes the key and measures the traps; true iff every trap reads 0.
template <QuantumState S>
bool auth_decode_in_place(S& state, const AuthKey& key, std::span<const int> qubits, Rng& rng) {
  if (qubits.size() != static_cast<size_t>(key.n + key.lambda))
    throw std::invalid_argument("auth_decode: register size mismatch");
  state.apply_clifford(inverse(key.c), qubits);
  bool ok = true;
  for (int j = key.n; j < key.n + key.lambda; ++j) ok = !state.measure_z(qubits[j], rng) && ok;
  return ok;
}

// C(x, 0^lambda) on n + lambda qubits.
inline StateVector auth_encode(const AuthKey& key, StateVector x) {
  if (x.num_qubits() != key.n) throw std::invalid_argument("auth_encode: input size mismatch");
  x.append_zeros(key.lambda);
  std::vector<int> all = iota_vec(0, key.n + key.lambda);
  auth_encode_in_place(x, key, all);
  return x;
}

// The decoded n-qubit state, or nullopt for reject.
inline std::optional<StateVector> auth_decode(const AuthKey& key, StateVector e, Rng& rng) {
  if (e.num_qubits() != key.n + key.lambda) throw std::invalid_argument("auth_decode: input size mismatch");
  std::vector<int> all = iota_vec(0, key.n + key.lambda);
  if (!auth_decode_in_place(e, key, all, rng)) return std::nullopt;
  e.drop_high_zeros(key.lambda);
  return e;
}

}  // namespace qmpc
