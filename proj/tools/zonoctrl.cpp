#include <CLI11.hpp>
#include <iostream>

#include "zonoctrl/pipeline.hpp"

using namespace zonoctrl;

int main(int argc, char** argv) {
  CLI::App app{"zonoctrl: reach-avoid controller synthesis on overlapping zonotope partitions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  uint64_t seed = 0;
  bool seed_set = false;
  bool strict_safety = false;
  bool serial = false;
  int alternatives = 0;

  app.add_option("--config", config_path, "scenario configuration file")->required();
  app.add_option("--out-dir", out_dir, "artifact output directory");
  app.add_option("--seed", seed, "override the partition seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_flag("--strict-safety", strict_safety,
               "inflate obstacles by tau*u_max/2 in the trajectory checker");
  app.add_flag("--serial", serial, "use the serial reference kernels");

  auto* cmd_partition = app.add_subcommand("partition", "partition the state space");
  auto* cmd_verify = app.add_subcommand("verify", "build the graph and verify the specification");
  cmd_verify->add_option("--alternatives", alternatives, "list up to N alternative paths");
  auto* cmd_abstract = app.add_subcommand("abstract", "build symbolic abstractions");
  auto* cmd_synthesize = app.add_subcommand("synthesize", "synthesize the composed controller");
  auto* cmd_simulate = app.add_subcommand("simulate", "run the closed-loop simulation");
  auto* cmd_run = app.add_subcommand("run", "full pipeline");
  auto* cmd_baseline = app.add_subcommand("baseline", "uniform-grid reference backend");

  CLI11_PARSE(app, argc, argv);

  try {
    Scenario sc = Scenario::load(config_path);
    if (seed_set) sc.seed = seed;

    if (cmd_baseline->parsed()) {
      auto rep = run_baseline(sc, out_dir, !serial);
      std::cout << rep.to_text();
      return rep.exit_code;
    }

    Phase phase = Phase::Run;
    if (cmd_partition->parsed()) phase = Phase::Partition;
    if (cmd_verify->parsed()) phase = Phase::Verify;
    if (cmd_abstract->parsed()) phase = Phase::Abstract;
    if (cmd_synthesize->parsed()) phase = Phase::Synthesize;
    if (cmd_simulate->parsed() || cmd_run->parsed()) phase = Phase::Run;

    PipelineResult result;
    auto rep = run_pipeline(sc, out_dir, phase, !serial, &result, strict_safety);
    std::cout << rep.to_text();

    if (cmd_verify->parsed() && alternatives > 0 && result.verification.satisfiable) {
      auto accepting = sc.accepting_path
                           ? compile_spec(result.task_graph, *sc.accepting_path)
                           : compile_spec(result.task_graph);
      auto alts = list_paths(result.task_graph, accepting, alternatives);
      std::cout << "alternative paths:\n";
      for (const auto& p : alts) {
        for (int v : p) std::cout << " " << vertex_name(result.task_graph, v);
        std::cout << "\n";
      }
    }
    return rep.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
