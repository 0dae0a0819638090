#ifndef ZONOCTRL_PIPELINE_HPP_
#define ZONOCTRL_PIPELINE_HPP_

#include <string>
#include <vector>

#include "zonoctrl/scenario.hpp"
#include "zonoctrl/synthesis.hpp"

namespace zonoctrl {

enum class Phase { Partition, Verify, Abstract, Synthesize, Simulate, Run };

struct Trajectory {
  struct Sample {
    long step = 0;
    Vec state;
    Vec input; /* input applied at this instant; zero on the terminal sample */
    int stage = 0;
  };
  std::vector<Sample> samples;
  double tau = 0.0;
  bool reached_goal = false;
  std::string stop_reason;
};

struct TrajectoryVerdict {
  bool satisfied = false;
  long first_violation = -1;
  std::string reason;
};

struct RunReport {
  std::string verdict; /* satisfied | unsatisfiable | synthesis-failure |
                          refinement-failure | partial */
  int exit_code = 1;
  uint64_t seed = 0;
  int cells_total = 0, cells_zonotope = 0, cells_residual = 0;
  std::vector<std::pair<int, uint64_t>> per_cell_transitions; /* (symbol, count) */
  uint64_t total_transitions = 0;
  double t_partition = 0, t_verify = 0, t_abs = 0, t_con = 0, t_sim = 0;
  std::vector<std::string> notes;
  io::json config_echo;

  io::json to_json() const;
  std::string to_text() const;
};

struct PipelineResult {
  std::vector<Cell> cells;
  ForbiddenRegions obstacles;
  TaskGraph task_graph;
  VerificationResult verification;
  ComposedController controller;
  Trajectory trajectory;
  RunReport report;
};

SampledSystem system_of(const Scenario& sc);

/* executes phases up to `upto`, writing this run's artifacts under out_dir */
RunReport run_pipeline(const Scenario& sc, const std::string& out_dir, Phase upto,
                       bool parallel = true, PipelineResult* result = nullptr,
                       bool strict_safety = false);

Trajectory simulate(const SampledSystem& sys, const ComposedController& cc, const Vec& x0,
                    int max_steps);

TrajectoryVerdict check_trajectory(const Trajectory& traj, const Scenario& sc,
                                   bool strict_safety = false);

/* uniform-grid reference backend over all of X at the finest cell spacing */
RunReport run_baseline(const Scenario& sc, const std::string& out_dir, bool parallel = true);

}  // namespace zonoctrl

#endif
