// SPDX-License-Identifier: Apache-2.0
// Register bookkeeping shared by the protocol drivers.
#pragma once

#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmpc/frame_state.hpp"

namespace qmpc::detail {

inline std::vector<int> append_amps(FrameState& w, std::span<const cplx> amps) {
  int first = w.num_qubits();
  w.append_amplitudes(amps);
  return iota_vec(first, w.num_qubits() - first);
}

inline std::vector<int> append_zeros(FrameState& w, int k) {
  int first = w.num_qubits();
  w.append_zeros(k);
  return iota_vec(first, k);
}

inline std::vector<int> append_t(FrameState& w, int k) {
  std::vector<int> out;
  std::vector<cplx> t = t_state_amplitudes();
  for (int i = 0; i < k; ++i) out.push_back(append_amps(w, t)[0]);
  return out;
}

inline std::vector<int> slice(const std::vector<int>& v, int off, int len) {
  return {v.begin() + off, v.begin() + off + len};
}

inline std::vector<int> concat(std::initializer_list<std::vector<int>> parts) {
  std::vector<int> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::string bits_of(const std::vector<bool>& b) {
  std::string s;
  for (bool x : b) s += x ? '1' : '0';
  return s;
}

// (2^width + 1)-dimensional block: the output density, or only the trailing
// abort entry when out is empty.
inline Eigen::MatrixXcd with_abort_entry(const FrameState& w, const std::optional<std::vector<int>>& out, int width) {
  size_t dim = size_t{1} << width;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim + 1, dim + 1);
  if (out)
    m.topLeftCorner(dim, dim) = w.density(*out).matrix();
  else
    m(dim, dim) = 1;
  return m;
}

}  // namespace qmpc::detail
