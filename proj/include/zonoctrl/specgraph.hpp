#ifndef ZONOCTRL_SPECGRAPH_HPP_
#define ZONOCTRL_SPECGRAPH_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zonoctrl/partition.hpp"

namespace zonoctrl {

struct ForbiddenRegions {
  std::vector<ConstrainedZonotope> regions;
  std::vector<poly::Polygon> polygons; /* planar caches, parallel to regions */

  static ForbiddenRegions make(std::vector<ConstrainedZonotope> regions);
  bool any_contains(const Vec& x) const;
  bool empty() const { return regions.empty(); }
};

/* intersection region Omega with obstacle-difference semantics: membership of
 * I = Omega \ O is contains(Omega, x) and not in any obstacle */
struct FreeRegion {
  ConstrainedZonotope omega;
  poly::Polygon polygon; /* planar cache of omega */

  static FreeRegion make(ConstrainedZonotope omega);
  bool contains_omega(const Vec& x) const;
  bool contains_free(const Vec& x, const ForbiddenRegions& obs) const;
};

struct AdjacencyGraph {
  int size = 0;
  std::vector<char> matrix; /* size*size, symmetric, zero diagonal */
  std::map<std::pair<int, int>, FreeRegion> intersections; /* keyed i<j */

  bool at(int i, int j) const {
    return matrix[static_cast<size_t>(i) * static_cast<size_t>(size) + static_cast<size_t>(j)] != 0;
  }
  const FreeRegion* region(int i, int j) const;
};

/* cells are vertices 0..n_cells-1, then the init vertex, then goal vertices */
struct TaskGraph {
  int n_cells = 0;
  int init_vertex = 0;
  std::vector<int> goal_vertices;
  std::vector<std::vector<int>> adj; /* sorted neighbor lists */
  ConstrainedZonotope init_region;
  std::vector<ConstrainedZonotope> goal_regions;
  std::map<std::pair<int, int>, FreeRegion> intersections; /* keyed min<max */

  int vertex_count() const { return static_cast<int>(adj.size()); }
  bool is_goal(int v) const;
  const FreeRegion* region(int a, int b) const;
};

std::string vertex_name(const TaskGraph& tg, int v);
int vertex_by_name(const TaskGraph& tg, const std::string& name);

/* sequenced reach-avoid fragment: visit goals in order, always avoid O */
struct ReachAvoidSpec {
  std::vector<ConstrainedZonotope> goals;
  ForbiddenRegions obstacles;
};

struct PathPlan {
  std::vector<int> cells;          /* 0-based cell indices; a repeat marks a goal checkpoint */
  std::vector<FreeRegion> waypoints; /* entry region per plan cell, then the final target */
  std::vector<int> vertex_sequence;  /* realized path through the task graph */
};

struct VerificationResult {
  bool satisfiable = false;
  PathPlan plan;
  std::vector<std::string> notes;
};

/* admissibility of one overlap: none when bodies are disjoint, either body is
 * fully forbidden, or (a cup b) \ (Omega cap O) fails the flood-fill
 * connectivity test at resolution r_conn */
std::optional<FreeRegion> admissible_intersection(const Cell& a, const Cell& b,
                                                  const ForbiddenRegions& obstacles,
                                                  double r_conn);

AdjacencyGraph build_adjacency(const std::vector<Cell>& cells, const ForbiddenRegions& obstacles,
                               double r_conn);

TaskGraph extend_graph(const AdjacencyGraph& g, const std::vector<Cell>& cells, const Box& X0,
                       const ReachAvoidSpec& spec, double r_conn);

/* accepting path (task-graph vertex ids), default or externally supplied */
std::vector<int> compile_spec(const TaskGraph& tg);
std::vector<int> compile_spec(const TaskGraph& tg, const std::vector<std::string>& bypass);

VerificationResult find_path(const TaskGraph& tg, const std::vector<int>& accepting,
                             const std::vector<Cell>& cells, const ForbiddenRegions& obstacles,
                             double r_conn);

/* all shortest realizations, for the alternatives listing */
std::vector<std::vector<int>> list_paths(const TaskGraph& tg, const std::vector<int>& accepting,
                                         int limit);

std::string to_dot(const TaskGraph& tg);

}  // namespace zonoctrl

#endif
