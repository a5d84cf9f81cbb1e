// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qmpc/qgc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / ("qmpc_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Invocation run(const std::string& args, const std::string& env = "") {
  fs::path dir = scratch();
  fs::path out = dir / "stdout", err = dir / "stderr";
  std::string cmd = env + " " QMPC_CLI_PATH " " + args + " >" + out.string() + " 2>" + err.string();
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

json metric(const json& report, const std::string& name) {
  for (const auto& m : report["metrics"])
    if (m["name"] == name) return m;
  ADD_FAILURE() << "missing metric " << name;
  return json::object();
}

std::string without_timing(const std::string& text) {
  json j = json::parse(text);
  j.erase("timing");
  return j.dump();
}

}  // namespace

TEST(Cli, HonestSwapWithinTolerance) {
  Invocation r = run("run-2pqc --preset swap-min --seed 7 --trials 3000");
  ASSERT_EQ(r.code, 0) << r.err;
  json rep = json::parse(r.out);
  json m = metric(rep, "honest.trace_distance");
  EXPECT_LT(m["value"].get<double>(), 0.03);
  EXPECT_TRUE(m["pass"].get<bool>());
  EXPECT_EQ(m["tolerance"]["op"], "<");
  EXPECT_TRUE(m.contains("stderr"));
  EXPECT_EQ(rep["config"]["seed"], 7);
  EXPECT_EQ(rep["config"]["trials"], 3000);
  EXPECT_TRUE(rep["timing"].contains("wall_seconds"));
}

TEST(Cli, ExhaustiveZeroCheck) {
  Invocation r = run("check-suite --gadget zero --n 1 --exhaustive");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(metric(json::parse(r.out), "zero.exhaustive_channel_distance")["value"].get<double>(), 1e-9);
}

TEST(Cli, ConfigErrorsExitTwo) {
  Invocation r = run("run-2pqc --preset nope");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
  EXPECT_EQ(r.err.find('\n'), r.err.size() - 1) << "one diagnostic line";
  EXPECT_EQ(run("launch-rockets").code, 2);
  EXPECT_EQ(run("run-2pqc --trials 0").code, 2);
  EXPECT_EQ(run("run-mpqc --adversary nobody").code, 2);
  EXPECT_EQ(run("check-suite --gadget zero --n 3 --exhaustive").code, 2);
  EXPECT_EQ(run("run-2pqc --circuit /nonexistent.json").code, 2);
}

TEST(Cli, ToleranceFailureExitsOne) {
  // A single trial cannot land within 0.02 of a 1/6 catch rate.
  Invocation r = run("check-suite --gadget t --trials 1");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(json::parse(r.out)["pass"].get<bool>());
}

TEST(Cli, ReportsDeterministicAcrossRunsAndWorkers) {
  for (const std::string args : {"run-2pqc --preset swap-std --trials 60 --seed 3",
                                 "real-vs-ideal --preset swap-min --trials 40 --seed 5",
                                 "garble-demo --preset cm-d2 --trials 200",
                                 "run-mpqc --trials 8 --adversary circle-pauli",
                                 "check-suite --gadget auth --trials 300"}) {
    Invocation a = run(args), b = run(args), c = run(args + " --workers 3");
    ASSERT_NE(a.code, 2) << args << ": " << a.err;
    EXPECT_EQ(without_timing(a.out), without_timing(b.out)) << args;
    EXPECT_EQ(without_timing(a.out), without_timing(c.out)) << args;
  }
  EXPECT_NE(without_timing(run("run-2pqc --trials 20 --seed 1").out),
            without_timing(run("run-2pqc --trials 20 --seed 2").out));
}

TEST(Cli, OutCsvAndConfigFile) {
  fs::path dir = scratch();
  fs::path cfg = dir / "cfg.json", rep = dir / "rep.json", csv = dir / "rows.csv";
  std::ofstream(cfg) << R"({"preset": "identity3-min", "trials": 5, "seed": 11, "inputs": ["1", "+", "0"]})";
  Invocation r = run("run-mpqc --config " + cfg.string() + " --out " + rep.string() + " --csv " + csv.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  json j = json::parse(slurp(rep));
  EXPECT_EQ(j["config"]["preset"], "identity3-min");
  EXPECT_EQ(j["config"]["inputs"], json({"1", "+", "0"}));
  Invocation flags = run("run-mpqc --preset identity3-min --trials 5 --seed 11 --inputs 1,+,0");
  EXPECT_EQ(without_timing(flags.out), without_timing(slurp(rep)));
  std::string rows = slurp(csv);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 6);
  EXPECT_EQ(rows.rfind("trial,label,outcome\n", 0), 0u);

  std::ofstream(cfg) << R"({"preset": "swap-min", "colour": "blue"})";
  EXPECT_EQ(run("run-2pqc --config " + cfg.string()).code, 2);
}

TEST(Cli, CustomCircuitFile) {
  qmpc::Rng rng(4);
  qmpc::CMCircuit q{qmpc::sample_clifford(2, rng), {}};
  qmpc::CMLayer layer{1, 1, {}, std::nullopt};
  layer.f[0] = qmpc::CliffordOp(1);
  layer.f[1] = qmpc::sample_clifford(1, rng);
  q.layers.push_back(layer);
  fs::path circ = scratch() / "circ.json";
  std::ofstream(circ) << q.to_json().dump();
  Invocation r = run("garble-demo --circuit " + circ.string() + " --trials 500 --exact");
  ASSERT_EQ(r.code, 0) << r.err;
  json rep = json::parse(r.out);
  EXPECT_EQ(rep["config"]["circuit"], q.to_json());
  EXPECT_LT(metric(rep, "custom.exhaustive_trace_distance")["value"].get<double>(), 1e-6);
  EXPECT_EQ(run("garble-demo --circuit " + circ.string() + " --preset cm-min").code, 2);
}

TEST(Cli, QubitCapFromEnvironment) {
  Invocation r = run("garble-demo --preset cm-k2 --trials 10", "QSIM_QUBIT_CAP=4");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cap"), std::string::npos);
  EXPECT_NE(run("garble-demo --preset cm-k2 --trials 10", "QSIM_QUBIT_CAP=16").code, 2);
}
