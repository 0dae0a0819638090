#include "zonoctrl/specgraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zonoctrl {

ForbiddenRegions ForbiddenRegions::make(std::vector<ConstrainedZonotope> regions) {
  ForbiddenRegions out;
  out.regions = std::move(regions);
  for (const auto& r : out.regions) {
    require(!is_empty(r), "obstacles must be nonempty sets");
    if (r.dim() == 2) {
      auto vs = vertices_2d(r);
      out.polygons.emplace_back(vs.begin(), vs.end());
    } else {
      out.polygons.emplace_back();
    }
  }
  return out;
}

bool ForbiddenRegions::any_contains(const Vec& x) const {
  for (size_t i = 0; i < regions.size(); ++i) {
    if (polygons[i].size() >= 3 && x.size() == 2) {
      if (poly::point_in(polygons[i], poly::Pt(x[0], x[1]), 1e-9)) return true;
    } else if (contains(regions[i], x)) {
      return true;
    }
  }
  return false;
}

FreeRegion FreeRegion::make(ConstrainedZonotope omega) {
  FreeRegion out;
  out.omega = std::move(omega);
  if (out.omega.dim() == 2 && !is_empty(out.omega)) {
    auto vs = vertices_2d(out.omega);
    out.polygon.assign(vs.begin(), vs.end());
  }
  return out;
}

bool FreeRegion::contains_omega(const Vec& x) const {
  if (polygon.size() >= 1 && x.size() == 2)
    return poly::point_in(polygon, poly::Pt(x[0], x[1]), 1e-9);
  return contains(omega, x);
}

bool FreeRegion::contains_free(const Vec& x, const ForbiddenRegions& obs) const {
  return contains_omega(x) && !obs.any_contains(x);
}

const FreeRegion* AdjacencyGraph::region(int i, int j) const {
  auto it = intersections.find({std::min(i, j), std::max(i, j)});
  return it == intersections.end() ? nullptr : &it->second;
}

bool TaskGraph::is_goal(int v) const {
  return std::find(goal_vertices.begin(), goal_vertices.end(), v) != goal_vertices.end();
}

const FreeRegion* TaskGraph::region(int a, int b) const {
  auto it = intersections.find({std::min(a, b), std::max(a, b)});
  return it == intersections.end() ? nullptr : &it->second;
}

std::string vertex_name(const TaskGraph& tg, int v) {
  if (v < tg.n_cells) return "pi_" + std::to_string(v + 1);
  if (v == tg.init_vertex) return "pi_0";
  for (size_t i = 0; i < tg.goal_vertices.size(); ++i)
    if (tg.goal_vertices[i] == v) return "pi_phi_" + std::to_string(i + 1);
  return "v" + std::to_string(v);
}

int vertex_by_name(const TaskGraph& tg, const std::string& name) {
  for (int v = 0; v < tg.vertex_count(); ++v)
    if (vertex_name(tg, v) == name) return v;
  throw ConfigError("unknown symbol: " + name);
}

namespace {

struct Grid {
  double res = 0;
  long ix0 = 0, iy0 = 0, nx = 0, ny = 0;
  std::vector<char> in;
  std::vector<int> comp;
  int n_comps = 0;

  size_t at(long ix, long iy) const {
    return static_cast<size_t>(iy - iy0) * static_cast<size_t>(nx) +
           static_cast<size_t>(ix - ix0);
  }
  bool valid(long ix, long iy) const {
    return ix >= ix0 && ix < ix0 + nx && iy >= iy0 && iy < iy0 + ny;
  }
};

poly::Pt poly_min(const poly::Polygon& p) {
  poly::Pt m = p.front();
  for (const auto& q : p) m = m.cwiseMin(q);
  return m;
}

poly::Pt poly_max(const poly::Polygon& p) {
  poly::Pt m = p.front();
  for (const auto& q : p) m = m.cwiseMax(q);
  return m;
}

template <class Pred>
Grid make_grid(const poly::Pt& lo, const poly::Pt& hi, double res, Pred&& pred) {
  Grid g;
  g.res = res;
  g.ix0 = static_cast<long>(std::floor(lo.x() / res)) - 1;
  g.iy0 = static_cast<long>(std::floor(lo.y() / res)) - 1;
  g.nx = static_cast<long>(std::ceil(hi.x() / res)) + 2 - g.ix0;
  g.ny = static_cast<long>(std::ceil(hi.y() / res)) + 2 - g.iy0;
  g.in.assign(static_cast<size_t>(g.nx) * static_cast<size_t>(g.ny), 0);
  for (long iy = g.iy0; iy < g.iy0 + g.ny; ++iy) {
    for (long ix = g.ix0; ix < g.ix0 + g.nx; ++ix) {
      Vec p(2);
      p << res * static_cast<double>(ix), res * static_cast<double>(iy);
      if (pred(p)) g.in[g.at(ix, iy)] = 1;
    }
  }
  return g;
}

void label_components(Grid& g) {
  g.comp.assign(g.in.size(), -1);
  g.n_comps = 0;
  std::deque<std::pair<long, long>> queue;
  for (long iy = g.iy0; iy < g.iy0 + g.ny; ++iy) {
    for (long ix = g.ix0; ix < g.ix0 + g.nx; ++ix) {
      if (!g.in[g.at(ix, iy)] || g.comp[g.at(ix, iy)] >= 0) continue;
      const int id = g.n_comps++;
      queue.push_back({ix, iy});
      g.comp[g.at(ix, iy)] = id;
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        const long dx[4] = {1, -1, 0, 0};
        const long dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const long nx2 = cx + dx[d], ny2 = cy + dy[d];
          if (!g.valid(nx2, ny2)) continue;
          const size_t k = g.at(nx2, ny2);
          if (g.in[k] && g.comp[k] < 0) {
            g.comp[k] = id;
            queue.push_back({nx2, ny2});
          }
        }
      }
    }
  }
}

bool body_fully_forbidden(const Cell& c, const ForbiddenRegions& obstacles, double r_conn) {
  if (obstacles.empty() || c.body_polygon.size() < 3) return false;
  const auto lo = poly_min(c.body_polygon), hi = poly_max(c.body_polygon);
  bool any_point = false;
  for (double y = std::floor(lo.y() / r_conn) * r_conn; y <= hi.y() + r_conn; y += r_conn) {
    for (double x = std::floor(lo.x() / r_conn) * r_conn; x <= hi.x() + r_conn; x += r_conn) {
      Vec p(2);
      p << x, y;
      if (!c.body_contains(p)) continue;
      any_point = true;
      if (!obstacles.any_contains(p)) return false;
    }
  }
  return any_point;
}

}  // namespace

std::optional<FreeRegion> admissible_intersection(const Cell& a, const Cell& b,
                                                  const ForbiddenRegions& obstacles,
                                                  double r_conn) {
  require(a.body.dim() == 2, "admissible_intersection: planar cells only");
  require(r_conn > 0, "admissible_intersection: resolution must be > 0");
  ConstrainedZonotope omega = intersect(a.body, b.body);
  if (is_empty(omega)) return std::nullopt;
  if (body_fully_forbidden(a, obstacles, r_conn) || body_fully_forbidden(b, obstacles, r_conn))
    return std::nullopt;

  /* connectivity of (a cup b) \ (Omega cap O) by flood fill */
  auto fr = FreeRegion::make(omega);
  if (!obstacles.empty()) {
    poly::Pt lo(1e300, 1e300), hi(-1e300, -1e300);
    for (const auto* poly : {&a.body_polygon, &b.body_polygon}) {
      if (poly->empty()) continue;
      lo = lo.cwiseMin(poly_min(*poly));
      hi = hi.cwiseMax(poly_max(*poly));
    }
    auto pred = [&](const Vec& p) {
      const bool ina = a.body_contains(p);
      const bool inb = b.body_contains(p);
      if (!ina && !inb) return false;
      if (ina && inb && fr.contains_omega(p) && obstacles.any_contains(p)) return false;
      return true;
    };
    Grid g = make_grid(lo, hi, r_conn, pred);
    label_components(g);
    if (g.n_comps != 1) return std::nullopt;
  }
  return fr;
}

AdjacencyGraph build_adjacency(const std::vector<Cell>& cells, const ForbiddenRegions& obstacles,
                               double r_conn) {
  require(cells.size() >= 2, "build_adjacency: need at least two cells");
  const int n = static_cast<int>(cells.size());
  AdjacencyGraph g;
  g.size = n;
  g.matrix.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0);

  std::vector<char> forbidden(static_cast<size_t>(n), 0);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i)
    forbidden[static_cast<size_t>(i)] =
        body_fully_forbidden(cells[static_cast<size_t>(i)], obstacles, r_conn) ? 1 : 0;

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!forbidden[static_cast<size_t>(i)] && !forbidden[static_cast<size_t>(j)])
        pairs.push_back({i, j});

  std::vector<std::optional<FreeRegion>> results(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < static_cast<long>(pairs.size()); ++k) {
    const auto [i, j] = pairs[static_cast<size_t>(k)];
    results[static_cast<size_t>(k)] = admissible_intersection(
        cells[static_cast<size_t>(i)], cells[static_cast<size_t>(j)], obstacles, r_conn);
  }

  for (size_t k = 0; k < pairs.size(); ++k) {
    if (!results[k]) continue;
    const auto [i, j] = pairs[k];
    g.matrix[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] = 1;
    g.matrix[static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(i)] = 1;
    g.intersections.emplace(std::make_pair(i, j), std::move(*results[k]));
  }
  return g;
}

namespace {

Cell pseudo_cell(const ConstrainedZonotope& body) {
  Cell c;
  c.symbol_index = -1;
  c.kind = CellKind::Constrained;
  c.base = body;
  c.body = body;
  c.gnorm_generators = body.generators;
  c.finalize();
  return c;
}

}  // namespace

TaskGraph extend_graph(const AdjacencyGraph& g, const std::vector<Cell>& cells, const Box& X0,
                       const ReachAvoidSpec& spec, double r_conn) {
  require(!spec.goals.empty(), "extend_graph: need at least one goal region");
  const int n = static_cast<int>(cells.size());
  const int K = static_cast<int>(spec.goals.size());
  TaskGraph tg;
  tg.n_cells = n;
  tg.init_vertex = n;
  for (int k = 0; k < K; ++k) tg.goal_vertices.push_back(n + 1 + k);
  tg.adj.assign(static_cast<size_t>(n + 1 + K), {});
  tg.init_region = X0.to_czono();
  tg.goal_regions = spec.goals;
  tg.intersections = g.intersections;

  auto add_edge = [&tg](int a, int b) {
    tg.adj[static_cast<size_t>(a)].push_back(b);
    tg.adj[static_cast<size_t>(b)].push_back(a);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.at(i, j)) add_edge(i, j);

  /* pseudo-cells for the init and goal regions share the admissibility test */
  std::vector<Cell> extras;
  extras.push_back(pseudo_cell(tg.init_region));
  for (const auto& gr : spec.goals) extras.push_back(pseudo_cell(gr));

  bool init_touches_cell = false;
  for (int e = 0; e < static_cast<int>(extras.size()); ++e) {
    const int ev = n + e;
    for (int k = 0; k < n; ++k) {
      if (e == 0 && !is_empty(intersect(extras[static_cast<size_t>(e)].body,
                                        cells[static_cast<size_t>(k)].body)))
        init_touches_cell = true;
      auto r = admissible_intersection(extras[static_cast<size_t>(e)],
                                       cells[static_cast<size_t>(k)], spec.obstacles, r_conn);
      if (r) {
        add_edge(ev, k);
        tg.intersections.emplace(std::make_pair(std::min(ev, k), std::max(ev, k)),
                                 std::move(*r));
      }
    }
    for (int f = e + 1; f < static_cast<int>(extras.size()); ++f) {
      auto r = admissible_intersection(extras[static_cast<size_t>(e)],
                                       extras[static_cast<size_t>(f)], spec.obstacles, r_conn);
      if (r) {
        add_edge(n + e, n + f);
        tg.intersections.emplace(std::make_pair(n + e, n + f), std::move(*r));
      }
    }
  }
  if (!init_touches_cell)
    throw std::runtime_error("extend_graph: initial region lies outside every cell");

  for (auto& lst : tg.adj) {
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
  }
  return tg;
}

std::vector<int> compile_spec(const TaskGraph& tg) {
  require(!tg.goal_vertices.empty(), "compile_spec: no goals");
  std::vector<int> out = {tg.init_vertex};
  for (int v : tg.goal_vertices) out.push_back(v);
  return out;
}

std::vector<int> compile_spec(const TaskGraph& tg, const std::vector<std::string>& bypass) {
  if (bypass.empty()) return compile_spec(tg);
  std::vector<int> out;
  for (const auto& name : bypass) out.push_back(vertex_by_name(tg, name));
  require(out.front() == tg.init_vertex, "accepting path must start at pi_0");
  return out;
}

namespace {

/* lexicographically smallest shortest path between two vertices; empty if
 * unreachable */
std::vector<int> lex_shortest_path(const std::vector<std::vector<int>>& adj,
                                   const std::vector<char>& active, int from, int to) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> dist(static_cast<size_t>(n), -1);
  std::deque<int> q;
  dist[static_cast<size_t>(to)] = 0;
  q.push_back(to);
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<size_t>(u)]) {
      if (!active[static_cast<size_t>(v)] || dist[static_cast<size_t>(v)] >= 0) continue;
      dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
      q.push_back(v);
    }
  }
  if (!active[static_cast<size_t>(from)] || dist[static_cast<size_t>(from)] < 0) return {};
  std::vector<int> path = {from};
  int cur = from;
  while (cur != to) {
    int next = -1;
    for (int v : adj[static_cast<size_t>(cur)]) {
      if (!active[static_cast<size_t>(v)]) continue;
      if (dist[static_cast<size_t>(v)] == dist[static_cast<size_t>(cur)] - 1) {
        next = v;
        break; /* neighbor lists are sorted: smallest id wins */
      }
    }
    if (next < 0) return {};
    path.push_back(next);
    cur = next;
  }
  return path;
}

struct PlanStep {
  int cell;
  int edge_a, edge_b; /* task-graph edge that produced the entry region */
};

}  // namespace

VerificationResult find_path(const TaskGraph& tg, const std::vector<int>& accepting,
                             const std::vector<Cell>& cells, const ForbiddenRegions& obstacles,
                             double r_conn) {
  require(accepting.size() >= 2, "find_path: accepting path needs init and one goal");
  require(accepting.front() == tg.init_vertex, "find_path: accepting path must start at pi_0");

  VerificationResult out;
  std::vector<char> active(static_cast<size_t>(tg.vertex_count()), 1);
  auto adj = tg.adj;

  auto remove_edge = [&adj](int a, int b) {
    auto& la = adj[static_cast<size_t>(a)];
    la.erase(std::remove(la.begin(), la.end(), b), la.end());
    auto& lb = adj[static_cast<size_t>(b)];
    lb.erase(std::remove(lb.begin(), lb.end(), a), lb.end());
  };

  /* free-space component grid per cell, built on demand */
  std::vector<std::optional<Grid>> cell_grid(cells.size());
  auto grid_for = [&](int ci) -> Grid& {
    auto& slot = cell_grid[static_cast<size_t>(ci)];
    if (!slot) {
      const Cell& c = cells[static_cast<size_t>(ci)];
      require(c.body_polygon.size() >= 3, "find_path: degenerate cell polygon");
      auto pred = [&](const Vec& p) {
        return c.body_contains(p) && !obstacles.any_contains(p);
      };
      Grid g = make_grid(poly_min(c.body_polygon), poly_max(c.body_polygon), r_conn, pred);
      label_components(g);
      slot = std::move(g);
    }
    return *slot;
  };

  /* component ids of the grid points inside a free region */
  auto region_comps = [&](int ci, const FreeRegion& r) {
    Grid& g = grid_for(ci);
    std::set<int> comps;
    for (long iy = g.iy0; iy < g.iy0 + g.ny; ++iy) {
      for (long ix = g.ix0; ix < g.ix0 + g.nx; ++ix) {
        const size_t k = g.at(ix, iy);
        if (!g.in[k]) continue;
        Vec p(2);
        p << g.res * static_cast<double>(ix), g.res * static_cast<double>(iy);
        if (r.contains_free(p, obstacles)) comps.insert(g.comp[k]);
      }
    }
    return comps;
  };

  for (int iteration = 0; iteration < 4 * tg.vertex_count() + 8; ++iteration) {
    /* realize the accepting path segment by segment */
    std::vector<int> seq;
    bool reachable = true;
    for (size_t s = 0; s + 1 < accepting.size(); ++s) {
      auto seg = lex_shortest_path(adj, active, accepting[s], accepting[s + 1]);
      if (seg.empty()) {
        out.notes.push_back("no path between " + vertex_name(tg, accepting[s]) + " and " +
                            vertex_name(tg, accepting[s + 1]));
        reachable = false;
        break;
      }
      if (!seq.empty()) seg.erase(seg.begin());
      seq.insert(seq.end(), seg.begin(), seg.end());
    }
    if (!reachable) {
      out.satisfiable = false;
      return out;
    }

    /* translate the vertex walk into plan cells and entry regions */
    std::vector<PlanStep> steps;
    int final_a = -1, final_b = -1;
    for (size_t i = 0; i + 1 < seq.size(); ++i) {
      const int u = seq[i], v = seq[i + 1];
      if (v < tg.n_cells) {
        steps.push_back({v, u, v});
      } else if (i + 2 == seq.size()) {
        final_a = u;
        final_b = v;
      }
    }
    if (final_a < 0) { /* accepting path ends inside a cell vertex: impossible here */
      final_a = seq[seq.size() - 2];
      final_b = seq.back();
    }

    /* Theorem 2 per-cell conditions along the plan */
    bool pruned = false;
    for (size_t i = 0; i < steps.size() && !pruned; ++i) {
      const int ci = steps[i].cell;
      const FreeRegion* entry = tg.region(steps[i].edge_a, steps[i].edge_b);
      const FreeRegion* exit = (i + 1 < steps.size())
                                   ? tg.region(steps[i + 1].edge_a, steps[i + 1].edge_b)
                                   : tg.region(final_a, final_b);
      require(entry != nullptr && exit != nullptr, "find_path: missing edge region");
      auto in_comps = region_comps(ci, *entry);
      auto out_comps = region_comps(ci, *exit);
      if (in_comps.empty() || out_comps.empty()) {
        /* waypoint empty at this resolution: drop the offending edge */
        if (in_comps.empty()) {
          remove_edge(steps[i].edge_a, steps[i].edge_b);
          out.notes.push_back("empty waypoint between " + vertex_name(tg, steps[i].edge_a) +
                              " and " + vertex_name(tg, steps[i].edge_b));
        } else {
          const int ea = (i + 1 < steps.size()) ? steps[i + 1].edge_a : final_a;
          const int eb = (i + 1 < steps.size()) ? steps[i + 1].edge_b : final_b;
          remove_edge(ea, eb);
          out.notes.push_back("empty waypoint between " + vertex_name(tg, ea) + " and " +
                              vertex_name(tg, eb));
        }
        pruned = true;
        break;
      }
      Grid& g = grid_for(ci);
      if (g.n_comps == 1) continue; /* condition (a) */
      std::set<int> common;
      std::set_intersection(in_comps.begin(), in_comps.end(), out_comps.begin(), out_comps.end(),
                            std::inserter(common, common.begin()));
      if (!common.empty()) continue; /* condition (b) */
      active[static_cast<size_t>(ci)] = 0;
      out.notes.push_back("pruned " + vertex_name(tg, ci) +
                          ": free space disconnected between its waypoints");
      pruned = true;
    }
    if (pruned) continue;

    out.satisfiable = true;
    out.plan.vertex_sequence = seq;
    for (const auto& st : steps) {
      out.plan.cells.push_back(st.cell);
      out.plan.waypoints.push_back(*tg.region(st.edge_a, st.edge_b));
    }
    out.plan.waypoints.push_back(*tg.region(final_a, final_b));
    return out;
  }
  out.satisfiable = false;
  out.notes.push_back("pruning failed to converge");
  return out;
}

std::vector<std::vector<int>> list_paths(const TaskGraph& tg, const std::vector<int>& accepting,
                                         int limit) {
  /* enumerate shortest realizations of the first segment chain by DFS over
   * the shortest-path DAG */
  std::vector<std::vector<int>> out;
  if (accepting.size() < 2) return out;
  std::vector<char> active(static_cast<size_t>(tg.vertex_count()), 1);

  std::function<void(std::vector<int>&, size_t)> extend = [&](std::vector<int>& prefix,
                                                              size_t seg) {
    if (static_cast<int>(out.size()) >= limit) return;
    if (seg + 1 >= accepting.size()) {
      out.push_back(prefix);
      return;
    }
    const int from = accepting[seg], to = accepting[seg + 1];
    /* distances to the segment target */
    std::vector<int> dist(static_cast<size_t>(tg.vertex_count()), -1);
    std::deque<int> q;
    dist[static_cast<size_t>(to)] = 0;
    q.push_back(to);
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int v : tg.adj[static_cast<size_t>(u)])
        if (dist[static_cast<size_t>(v)] < 0) {
          dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
          q.push_back(v);
        }
    }
    if (dist[static_cast<size_t>(from)] < 0) return;
    std::function<void(int)> walk = [&](int cur) {
      if (static_cast<int>(out.size()) >= limit) return;
      if (cur == to) {
        extend(prefix, seg + 1);
        return;
      }
      for (int v : tg.adj[static_cast<size_t>(cur)]) {
        if (dist[static_cast<size_t>(v)] == dist[static_cast<size_t>(cur)] - 1) {
          prefix.push_back(v);
          walk(v);
          prefix.pop_back();
        }
      }
    };
    walk(from);
  };
  std::vector<int> prefix = {accepting.front()};
  extend(prefix, 0);
  return out;
}

std::string to_dot(const TaskGraph& tg) {
  std::ostringstream os;
  os << "graph task_graph {\n";
  for (int v = 0; v < tg.vertex_count(); ++v) {
    os << "  \"" << vertex_name(tg, v) << "\"";
    if (v == tg.init_vertex) os << " [shape=box]";
    if (tg.is_goal(v)) os << " [shape=doublecircle]";
    os << ";\n";
  }
  for (int v = 0; v < tg.vertex_count(); ++v)
    for (int w : tg.adj[static_cast<size_t>(v)])
      if (v < w) os << "  \"" << vertex_name(tg, v) << "\" -- \"" << vertex_name(tg, w) << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace zonoctrl
