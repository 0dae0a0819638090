#ifndef ZONOCTRL_IO_HPP_
#define ZONOCTRL_IO_HPP_

#include <json.hpp>
#include <string>
#include <vector>

#include "zonoctrl/czono.hpp"
#include "zonoctrl/partition.hpp"

namespace zonoctrl::io {

using json = nlohmann::ordered_json;

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);
json mat_to_json(const Mat& m); /* row-major data layout */
Mat mat_from_json(const json& j);
json box_to_json(const Box& b);
Box box_from_json(const json& j);
json czono_to_json(const ConstrainedZonotope& s);
ConstrainedZonotope czono_from_json(const json& j);
json cell_to_json(const Cell& c);
Cell cell_from_json(const json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

void write_partition(const std::string& path, const std::vector<Cell>& cells, const Box& X,
                     const PartitionConfig& cfg);
std::vector<Cell> read_partition(const std::string& path);

}  // namespace zonoctrl::io

namespace zonoctrl {
struct Abstraction;
struct ComposedController;
struct Trajectory;
struct Scenario;
}  // namespace zonoctrl

namespace zonoctrl::io {

/* versioned binary dump of a transition table: magic, version, counts, then
 * delta-encoded successor lists */
void write_abstraction_dump(const std::string& path, const Abstraction& abs);
/* returns the transition table; lattice geometry is not stored */
std::vector<std::vector<int32_t>> read_abstraction_dump(const std::string& path,
                                                        uint64_t* n_states = nullptr,
                                                        uint64_t* n_inputs = nullptr);

void write_controller(const std::string& path, const ComposedController& cc);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/* Fig-5-style overview: cells, obstacles, init, goals, waypoints, trajectory */
struct SvgScene {
  Box world{Vec::Zero(2), Vec::Ones(2)};
  const std::vector<Cell>* cells = nullptr;
  const std::vector<Vec>* centers = nullptr;
  const std::vector<Box>* obstacles = nullptr;
  const Box* init_box = nullptr;
  const std::vector<Box>* goals = nullptr;
  const std::vector<poly::Polygon>* waypoints = nullptr;
  const Trajectory* trajectory = nullptr;
};
void write_svg(const std::string& path, const SvgScene& scene);

}  // namespace zonoctrl::io

#endif
