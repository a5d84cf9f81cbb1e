// SPDX-License-Identifier: Apache-2.0
// Command-line front end: qmpc <command> [flags]. Exit 0 when every declared
// tolerance holds, 1 on a tolerance failure, 2 on a configuration error.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "qmpc/experiments.hpp"

using namespace qmpc;

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum garbling and multi-party computation experiments"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string circuit_path, config_path, out_path, csv_path;
  std::optional<int> lambda, n_z, n_t, n, parties, party;
  std::optional<uint64_t> seed;
  std::optional<int> trials, workers;

  for (const auto& name : experiment_commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config JSON; flags override its fields");
    sub->add_option("--preset", cfg.preset);
    sub->add_option("--circuit", circuit_path, "C+M circuit JSON file");
    sub->add_option("--seed", seed);
    sub->add_option("--trials", trials);
    sub->add_option("--adversary", cfg.adversary);
    sub->add_option("--role", cfg.role, "corrupted 2PQC party: A or B");
    sub->add_option("--party", party, "corrupted MPQC party, 0-based");
    sub->add_option("--parties", parties);
    sub->add_option("--inputs", cfg.inputs, "named preparations: 0 1 + - +i -i T random")->delimiter(',');
    sub->add_option("--lambda", lambda);
    sub->add_option("--n-z", n_z);
    sub->add_option("--n-t", n_t);
    sub->add_option("--n", n, "gadget size");
    sub->add_option("--gadget", cfg.gadget, "zero, t, auth or clifford");
    sub->add_flag("--exact", cfg.exact, "add exact per-seed or exhaustive metrics");
    sub->add_flag("--exhaustive", cfg.exhaustive);
    sub->add_option("--workers", workers);
    sub->add_option("--out", out_path, "report path (default stdout)");
    sub->add_option("--csv", csv_path, "per-trial outcomes");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ExperimentConfig c = cfg;
    if (!config_path.empty()) {
      c = ExperimentConfig::from_json(read_json(config_path));
      if (!cfg.preset.empty()) c.preset = cfg.preset;
      if (!cfg.adversary.empty()) c.adversary = cfg.adversary;
      if (!cfg.role.empty()) c.role = cfg.role;
      if (!cfg.gadget.empty()) c.gadget = cfg.gadget;
      if (!cfg.inputs.empty()) c.inputs = cfg.inputs;
      c.exact = c.exact || cfg.exact;
      c.exhaustive = c.exhaustive || cfg.exhaustive;
    }
    c.command = app.get_subcommands().front()->get_name();
    if (!circuit_path.empty()) c.circuit = read_json(circuit_path);
    if (seed) c.seed = *seed;
    if (trials) {
      if (*trials < 1) throw ConfigError("--trials must be at least 1");
      c.trials = *trials;
    }
    if (workers) c.workers = *workers;
    for (auto [dst, src] : {std::pair{&c.lambda, &lambda}, {&c.n_z, &n_z}, {&c.n_t, &n_t}, {&c.n, &n},
                            {&c.parties, &parties}, {&c.party, &party}})
      if (*src) *dst = *src;

    Report r = run_experiment(c);
    std::string text = r.to_json().dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      write_file(out_path, text);
      std::cerr << r.suite << ": " << (r.pass() ? "pass" : "FAIL") << " -> " << out_path << "\n";
    }
    if (!csv_path.empty()) {
      std::string rows = "trial,label,outcome\n";
      for (const auto& row : r.csv) rows += row + "\n";
      write_file(csv_path, rows);
    }
    for (const Metric& m : r.metrics)
      if (!m.pass()) std::cerr << "tolerance failed: " << m.name << " = " << m.value << "\n";
    return r.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
