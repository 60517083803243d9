// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT
//
// Command-line front end: every subcommand reads a JSON config, writes CSV
// tables plus a summary.json into --out, and is fully determined by --seed.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "pricer/experiments.hpp"
#include "pricer/serialize.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config,
                  "JSON config file (optional; simulate needs a dataset block)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "output directory")->required();
  cmd->add_option("--seed", args.seed, "run seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pricer-lab: private collaborative mean estimation toolkit"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"optimize", "tune a collaboration scheme by projected gradient descent"},
      {"simulate", "Monte Carlo mean-squared error of a scheme on a network"},
      {"privacy-report", "certify per-link, relay, and aggregator guarantees"},
      {"tradeoff", "sweep the bias penalty against the error bound"},
      {"neighbor-sweep", "widen a trust ring hop by hop and track the error"},
      {"er-analytic", "closed-form schemes for two-tier random graphs"},
      {"kmeans", "federated clustering on top of private mean estimation"}};
  Args args;
  for (const auto& [kind, blurb] : kinds)
    add_common(app.add_subcommand(kind, blurb), args);

  CLI11_PARSE(app, argc, argv);
  const std::string kind = app.get_subcommands().front()->get_name();

  try {
    const pricer::json cfg = args.config.empty()
                                 ? pricer::json::object()
                                 : pricer::load_json_file(args.config);
    const pricer::json summary =
        pricer::run_experiment(kind, cfg, args.out, args.seed);
    std::cout << summary.dump(2) << std::endl;
    return 0;
  } catch (const std::exception& e) {
    const pricer::json err{{"error", e.what()}, {"kind", kind}};
    std::cerr << err.dump(2) << std::endl;
    return 1;
  }
}
