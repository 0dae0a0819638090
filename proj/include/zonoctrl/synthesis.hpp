#ifndef ZONOCTRL_SYNTHESIS_HPP_
#define ZONOCTRL_SYNTHESIS_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zonoctrl/abstraction.hpp"
#include "zonoctrl/specgraph.hpp"

namespace zonoctrl {

/* per-cell reach-avoid task on abstract state indices */
struct LocalTask {
  int cell_index = 0;
  std::set<int> init_set;
  std::set<int> target_set;
  std::set<int> avoid_set;

  void check() const;
};

/* memoryless controller on the winning set */
struct AbstractController {
  struct Entry {
    int input = -1;
    int steps_to_go = 0;
  };
  /* indexed by abstract state; input < 0 means outside the domain */
  std::vector<Entry> table;
  std::set<int> winning;

  bool in_domain(int q) const {
    return q >= 0 && q < static_cast<int>(table.size()) && table[static_cast<size_t>(q)].input >= 0;
  }
};

/* one-step controllable predecessor under adversarial nondeterminism */
std::set<int> controllable_predecessor(const Abstraction& abs, const std::set<int>& W,
                                       const std::set<int>& avoid);

struct SynthesisError : std::runtime_error {
  std::set<int> uncovered_init;
  explicit SynthesisError(const std::string& msg, std::set<int> uncovered = {})
      : std::runtime_error(msg), uncovered_init(std::move(uncovered)) {}
};

AbstractController solve_reach_avoid(const Abstraction& abs, const LocalTask& task);

/* one synthesized stage of the sequential composition */
struct Stage {
  int cell_index = 0;
  Abstraction abstraction;
  AbstractController controller;
  Quantizer quantizer; /* rebound to this stage's lattice by compose */
  FreeRegion handoff;  /* advance when the state enters this region */
  double quant_epsilon = 0.0;
};

struct ComposedController {
  std::vector<Stage> stages;
  const ForbiddenRegions* obstacles = nullptr;
};

ComposedController compose(std::vector<Stage> stages, const PathPlan& plan,
                           const ForbiddenRegions& obstacles);

struct RefineResult {
  bool advance = false; /* state entered the stage handoff region */
  bool failed = false;  /* quantizer misses the controller domain */
  Vec input;
  int chosen_state = -1;
};

RefineResult refine(const ComposedController& cc, const Vec& x, int stage);

/* abstract target/init sets from concrete regions:
 * - targets demand the closed G-ball of radius ball_eps around the point to
 *   stay inside the region (handoff is then certain at the concrete level);
 *   obstacle clearance may use its own radius when the region is too thin
 *   for the full certificate
 * - init sets use plain point membership */
std::set<int> target_states(const Abstraction& abs, const FreeRegion& region,
                            const ForbiddenRegions& obstacles, double ball_eps,
                            double obstacle_ball_eps = -1.0);
std::set<int> init_states(const Abstraction& abs, const FreeRegion& region,
                          const ForbiddenRegions& obstacles);
std::set<int> unsafe_states(const Abstraction& abs, const ForbiddenRegions& obstacles,
                            double margin);

}  // namespace zonoctrl

#endif
