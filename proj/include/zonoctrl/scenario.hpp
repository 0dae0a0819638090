#ifndef ZONOCTRL_SCENARIO_HPP_
#define ZONOCTRL_SCENARIO_HPP_

#include <optional>
#include <string>
#include <vector>

#include "zonoctrl/io.hpp"

namespace zonoctrl {

struct Scenario {
  std::string name = "scenario";
  Box state_box;
  Box input_box;
  Box init_box;
  std::vector<Box> goal_boxes; /* ordered visit sequence */
  std::vector<Box> obstacle_boxes;

  std::string dynamics = "single_integrator";
  Vec dyn_params;
  double lipschitz = 0.0;

  double tau = 0.5;
  double epsilon = 1.0;
  std::vector<double> cell_spacings; /* per plan cell, cycled */
  double default_spacing = 0.5;
  double input_spacing = 0.5;

  int partition_count = 4;
  uint64_t seed = 0;
  int neighbor_count = 0; /* 0: n + 1 */
  double conn_resolution = 0.0; /* 0: epsilon / 5 */
  int max_steps = 200;
  std::optional<std::vector<std::string>> accepting_path;

  void check() const;
  /* positional spacing with the list's last entry pinned to the final stage */
  double spacing_for(size_t plan_position, size_t plan_length = 0) const;
  double connectivity_resolution() const {
    return conn_resolution > 0 ? conn_resolution : epsilon / 5.0;
  }

  io::json to_json() const;
  static Scenario from_json(const io::json& j);
  static Scenario load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace zonoctrl

#endif
