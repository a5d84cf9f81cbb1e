// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace qmpc {

enum class GateKind { H, S, Sdg, X, Y, Z, CNOT, CZ, SWAP, T, Tdg };

struct Gate {
  GateKind kind;
  int q0;
  int q1 = -1;

  bool two_qubit() const {
    return kind == GateKind::CNOT || kind == GateKind::CZ || kind == GateKind::SWAP;
  }
  bool operator==(const Gate&) const = default;
};

using GateSeq = std::vector<Gate>;

std::string gate_name(GateKind k);
GateKind gate_from_name(const std::string& name);

}  // namespace qmpc
