// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "pricer/experiments.hpp"

using Catch::Matchers::WithinRel;
using namespace pricer;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "pricer-exp-test" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Two nodes with asymmetric links, fully specified so no tuning runs.
json explicit_simulate_cfg() {
  return json::parse(R"({
    "topology": {
      "kind": "explicit",
      "network": {"n": 2, "p": [0.8, 0.6], "P": [[1.0, 0.7], [0.9, 1.0]]},
      "trust": {"eps": [["inf", 1.5], [1.5, "inf"]],
                "delta": [[1e-3, 1e-3], [1e-3, 1e-3]]}
    },
    "scheme": {"A": [[1.25, 0.4], [0.3, 1.0]],
               "Sigma": [[0.0, 0.5], [0.6, 0.0]]},
    "dataset": {"R": 1.0, "d": 2},
    "trials": 500
  })");
}

}  // namespace

TEST_CASE("optimizer settings parse with layered step-size keys",
          "[experiments]") {
  OptimizerConfig oc = optimizer_from_json(json::object(), 77);
  REQUIRE(oc.seed == 77);
  REQUIRE(oc.eta_alpha == 0.01);
  REQUIRE(oc.eta_sigma == 0.01);

  // "eta" sets both step sizes; "eta_sigma" can still split off.
  oc = optimizer_from_json(json::parse(R"({"optimizer":{"eta":0.5}})"), 0);
  REQUIRE(oc.eta_alpha == 0.5);
  REQUIRE(oc.eta_sigma == 0.5);

  oc = optimizer_from_json(json::parse(R"({"optimizer":{
    "eta_alpha": 0.4, "eta_sigma": 0.2, "bias_norm": "l1",
    "lambda": 0.3, "max_iters": 50, "randomize_init": true}})"), 0);
  REQUIRE(oc.eta_alpha == 0.4);
  REQUIRE(oc.eta_sigma == 0.2);
  REQUIRE(oc.bias_norm == BiasNorm::kL1);
  REQUIRE(oc.lambda == 0.3);
  REQUIRE(oc.max_iters == 50);
  REQUIRE(oc.randomize_init);

  REQUIRE_THROWS_AS(
      optimizer_from_json(json::parse(R"({"optimizer":{"bias_norm":"x"}})"), 0),
      std::invalid_argument);
}

TEST_CASE("experiment runs deepen the optimizer and thin its trace",
          "[experiments]") {
  OptimizerConfig oc = deep_optimizer_defaults(json::object(), 1);
  REQUIRE(oc.max_iters == 1000000);
  REQUIRE(oc.trace_stride == 1000);

  oc = deep_optimizer_defaults(
      json::parse(R"({"optimizer":{"max_iters":500}})"), 1);
  REQUIRE(oc.max_iters == 500);
  REQUIRE(oc.trace_stride == 1);
}

TEST_CASE("topology blocks cover ring, scattered and explicit forms",
          "[experiments]") {
  Topology t = topology_from_config(
      json::parse(R"({"topology":{"kind":"ring","n":6,"k_hops":2}})"));
  REQUIRE(t.model.n == 6);
  REQUIRE(t.trust.eps(0, 2) == 1e3);
  REQUIRE(t.trust.eps(0, 3) == 1.0);

  t = topology_from_config(json::parse(R"({"topology":{"kind":"scattered"}})"));
  REQUIRE(t.model.n == 10);
  REQUIRE(t.trust.n() == 10);

  t = topology_from_config(explicit_simulate_cfg());
  REQUIRE(t.model.p == Vec{0.8, 0.6});
  REQUIRE(t.model.E == independent_correlations(t.model.P));
  REQUIRE(std::isinf(t.trust.eps(0, 0)));

  REQUIRE_THROWS_AS(
      topology_from_config(json::parse(R"({"topology":{"kind":"mesh"}})")),
      std::invalid_argument);

  json bad = explicit_simulate_cfg();
  bad["topology"]["trust"]["eps"] = json::parse(R"([[ "inf",1,1],[1,"inf",1],[1,1,"inf"]])");
  bad["topology"]["trust"]["delta"] =
      json::parse(R"([[0.001,0.001,0.001],[0.001,0.001,0.001],[0.001,0.001,0.001]])");
  REQUIRE_THROWS_AS(topology_from_config(bad), std::invalid_argument);
}

TEST_CASE("dataset blocks produce aligned or sphere-distributed rows",
          "[experiments]") {
  Dataset ds = dataset_from_config(
      json::parse(R"({"dataset":{"R":2.0,"d":3,"aligned":true}})"), 4, 9);
  REQUIRE(ds.R == 2.0);
  REQUIRE(ds.X(1, 0) == 2.0);
  REQUIRE(ds.X(1, 1) == 0.0);

  ds = dataset_from_config(json::parse(R"({"dataset":{"R":1.5,"d":3}})"), 4, 9);
  for (std::size_t i = 0; i < 4; ++i)
    REQUIRE_THAT(squared_norm(ds.X.row(i)), WithinRel(1.5 * 1.5, 1e-12));

  REQUIRE_THROWS_AS(dataset_from_config(json::object(), 4, 9),
                    std::invalid_argument);
}

TEST_CASE("silent fallback scheme inverts arrival probabilities",
          "[experiments]") {
  NetworkModel m;
  m.n = 2;
  m.p = {0.5, 0.0};
  m.P = Mat::identity(2);
  m.E = Mat::identity(2);
  const CollaborationScheme s = no_collab_scheme(m);
  REQUIRE(s.A(0, 0) == 2.0);
  REQUIRE(s.A(1, 1) == 0.0);
  REQUIRE(s.Sigma == Mat(2, 2));
}

TEST_CASE("closed-form grid run reports its row count", "[experiments]") {
  const fs::path dir = fresh_dir("er");
  const json cfg = json::parse(
      R"({"n":[10],"m":[2],"p":[0.5],"q":[0.5],"lambda":[0.1,"inf"]})");
  const json summary = run_experiment("er-analytic", cfg, dir, 1);
  REQUIRE(summary.at("rows") == 2);
  REQUIRE(summary.at("kind") == "er-analytic");
  const std::string csv = read_file(dir / "er.csv");
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);
  REQUIRE(csv.find(",inf,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("tuning run writes a trace and a feasible scheme",
          "[experiments]") {
  const fs::path dir = fresh_dir("opt");
  const json cfg = json::parse(R"({
    "topology": {"kind": "ring", "n": 4},
    "optimizer": {"max_iters": 200}
  })");
  const json summary = run_experiment("optimize", cfg, dir, 5);
  REQUIRE(summary.at("feasible").get<bool>());
  REQUIRE(summary.at("mse_bound").get<double>() > 0.0);
  REQUIRE(fs::exists(dir / "trace.csv"));

  // The stored scheme reloads as valid matrices of the right size.
  const json doc = load_json_file((dir / "scheme.json").string());
  REQUIRE(scheme_from_json(doc).n() == 4);
  fs::remove_all(dir);
}

TEST_CASE("same seed reproduces simulation outputs byte for byte",
          "[experiments]") {
  const fs::path a = fresh_dir("sim-a");
  const fs::path b = fresh_dir("sim-b");
  const json cfg = explicit_simulate_cfg();

  const json sa = run_experiment("simulate", cfg, a, 42);
  const json sb = run_experiment("simulate", cfg, b, 42);
  REQUIRE(sa.contains("exact_mse"));  // two nodes, so enumeration is open
  REQUIRE(read_file(a / "simulate.csv") == read_file(b / "simulate.csv"));
  REQUIRE(read_file(a / "summary.json") == read_file(b / "summary.json"));

  // A different seed moves the Monte-Carlo estimate.
  const json sc = run_experiment("simulate", cfg, b, 43);
  REQUIRE(sc.at("mse_mc") != sa.at("mse_mc"));

  REQUIRE_THROWS_AS(run_experiment("warp", cfg, a, 1), std::invalid_argument);
  fs::remove_all(a);
  fs::remove_all(b);
}
