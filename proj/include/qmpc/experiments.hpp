// SPDX-License-Identifier: Apache-2.0
// Statistical suites behind the command-line tool and the acceptance run.
#pragma once

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmpc/mpqc.hpp"

namespace qmpc {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string command;
  std::string preset;                      // empty: suite default
  std::optional<nlohmann::json> circuit;   // inline C+M circuit
  std::optional<int> lambda, n_z, n_t, n;  // overrides; n is the gadget size for check-suite
  std::optional<int> parties;              // MPQC party count
  std::string adversary;                   // empty: suite default
  std::optional<int> party;                // corrupted MPQC party, 0-based
  std::string role;                        // real-vs-ideal: "A", "B" or empty for both
  std::string gadget;                      // check-suite: zero, t, auth, clifford
  std::vector<std::string> inputs;         // named preparations, one per party
  uint64_t seed = 1;
  int trials = 0;  // 0: suite default
  bool exact = false;
  bool exhaustive = false;
  int workers = 1;  // never changes results, so it is not echoed

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);  // throws ConfigError
};

struct Metric {
  std::string name;
  double value = 0;
  double std_error = 0;
  // Tolerance: "<", "<=", ">=", "==" against bound, "near" for |value - target| <= bound,
  // or empty for informational metrics.
  std::string op;
  double bound = 0;
  double target = 0;

  bool pass() const;
  nlohmann::json to_json() const;
};

struct Report {
  std::string suite;
  nlohmann::json config;
  std::vector<Metric> metrics;
  nlohmann::json details = nlohmann::json::object();  // deterministic extras
  nlohmann::json timing = nlohmann::json::object();   // wall-clock fields
  std::vector<std::string> csv;                       // per-trial rows, "trial,label,outcome"

  bool pass() const;
  const Metric& metric(const std::string& name) const;  // throws std::out_of_range
  nlohmann::json to_json(bool with_timing = true) const;
};

const std::vector<std::string>& experiment_commands();

// Dispatches on cfg.command; throws ConfigError for bad configurations.
Report run_experiment(const ExperimentConfig& cfg);

// Single-qubit preparation by name: 0, 1, +, -, +i, -i, T.
std::vector<cplx> named_state(const std::string& name);

// Output density of q on `in`, enumerating every measurement branch.
DensityMatrix exact_cm_output(const CMCircuit& q, const StateVector& in);

// Circuits of the garbling family, drawn from circuit_seed. Names: cm-d0,
// cm-min, cm-k2, cm-d2, cm-d2-l1.
struct GarblePreset {
  std::string name;
  CMCircuit q;
  int lambda;
};
GarblePreset garble_preset(const std::string& name, uint64_t circuit_seed);
const std::vector<std::string>& garble_preset_names();

}  // namespace qmpc
