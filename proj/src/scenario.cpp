#include "zonoctrl/scenario.hpp"

namespace zonoctrl {

void Scenario::check() const {
  state_box.check();
  input_box.check();
  init_box.check();
  require(state_box.contains(init_box.lower) && state_box.contains(init_box.upper),
          "scenario: init box must lie inside the state box");
  require(!goal_boxes.empty(), "scenario: need at least one goal region");
  for (const auto& g : goal_boxes) {
    g.check();
    require(state_box.contains(g.lower) && state_box.contains(g.upper),
            "scenario: goal regions must lie inside the state box");
  }
  for (const auto& o : obstacle_boxes) o.check();
  require(tau > 0, "scenario: tau must be > 0");
  require(epsilon > 0, "scenario: epsilon must be > 0");
  require(default_spacing > 0 && default_spacing <= epsilon,
          "scenario: default spacing must be in (0, epsilon]");
  for (double s : cell_spacings)
    require(s > 0 && s <= epsilon, "scenario: cell spacings must be in (0, epsilon]");
  require(input_spacing > 0, "scenario: input spacing must be > 0");
  require(partition_count > state_box.dim(), "scenario: need N > n");
  require(max_steps > 0, "scenario: max_steps must be > 0");
  require(lipschitz >= 0, "scenario: lipschitz must be >= 0");
}

double Scenario::spacing_for(size_t plan_position, size_t plan_length) const {
  if (cell_spacings.empty()) return default_spacing;
  if (plan_length > 0 && plan_position + 1 == plan_length) return cell_spacings.back();
  if (plan_position < cell_spacings.size()) return cell_spacings[plan_position];
  return cell_spacings.back();
}

io::json Scenario::to_json() const {
  io::json j;
  j["format"] = "zonoctrl-scenario";
  j["version"] = 1;
  j["name"] = name;
  j["state_box"] = io::box_to_json(state_box);
  j["input_box"] = io::box_to_json(input_box);
  j["init_box"] = io::box_to_json(init_box);
  io::json goals = io::json::array();
  for (const auto& g : goal_boxes) goals.push_back(io::box_to_json(g));
  j["goals"] = goals;
  io::json obs = io::json::array();
  for (const auto& o : obstacle_boxes) obs.push_back(io::box_to_json(o));
  j["obstacles"] = obs;
  j["dynamics"] = {{"type", dynamics},
                   {"params", io::vec_to_json(dyn_params.size() ? dyn_params : Vec::Zero(0))},
                   {"lipschitz", lipschitz}};
  j["tau"] = tau;
  j["epsilon"] = epsilon;
  j["cell_spacings"] = cell_spacings;
  j["default_spacing"] = default_spacing;
  j["input_spacing"] = input_spacing;
  j["partition"] = {{"count", partition_count},
                    {"seed", seed},
                    {"neighbor_count", neighbor_count}};
  j["connectivity_resolution"] = conn_resolution;
  j["max_steps"] = max_steps;
  if (accepting_path) j["accepting_path"] = *accepting_path;
  return j;
}

Scenario Scenario::from_json(const io::json& j) {
  require(j.at("format") == "zonoctrl-scenario", "scenario: wrong format tag");
  require(j.at("version") == 1, "scenario: unsupported version");
  Scenario s;
  s.name = j.value("name", std::string("scenario"));
  s.state_box = io::box_from_json(j.at("state_box"));
  s.input_box = io::box_from_json(j.at("input_box"));
  s.init_box = io::box_from_json(j.at("init_box"));
  for (const auto& g : j.at("goals")) s.goal_boxes.push_back(io::box_from_json(g));
  if (j.contains("obstacles"))
    for (const auto& o : j.at("obstacles")) s.obstacle_boxes.push_back(io::box_from_json(o));
  const auto& dyn = j.at("dynamics");
  s.dynamics = dyn.at("type").get<std::string>();
  s.dyn_params = dyn.contains("params") ? io::vec_from_json(dyn.at("params")) : Vec::Zero(0);
  s.lipschitz = dyn.value("lipschitz", 0.0);
  s.tau = j.at("tau").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  if (j.contains("cell_spacings"))
    s.cell_spacings = j.at("cell_spacings").get<std::vector<double>>();
  s.default_spacing = j.value("default_spacing", 0.5);
  s.input_spacing = j.at("input_spacing").get<double>();
  const auto& part = j.at("partition");
  s.partition_count = part.at("count").get<int>();
  s.seed = part.at("seed").get<uint64_t>();
  s.neighbor_count = part.value("neighbor_count", 0);
  s.conn_resolution = j.value("connectivity_resolution", 0.0);
  s.max_steps = j.value("max_steps", 200);
  if (j.contains("accepting_path"))
    s.accepting_path = j.at("accepting_path").get<std::vector<std::string>>();
  s.check();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  return from_json(io::json::parse(io::read_text_file(path)));
}

void Scenario::save(const std::string& path) const {
  io::write_text_file(path, to_json().dump(1) + "\n");
}

}  // namespace zonoctrl
