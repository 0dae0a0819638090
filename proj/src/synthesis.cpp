#include "zonoctrl/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace zonoctrl {

void LocalTask::check() const {
  for (int q : target_set)
    require(!avoid_set.count(q), "local task: target and avoid sets overlap");
}

std::set<int> controllable_predecessor(const Abstraction& abs, const std::set<int>& W,
                                       const std::set<int>& avoid) {
  std::set<int> out;
  const int Q = static_cast<int>(abs.num_states());
  const int M = static_cast<int>(abs.num_inputs());
  for (int q = 0; q < Q; ++q) {
    if (avoid.count(q)) continue;
    for (int v = 0; v < M; ++v) {
      const auto& succ = abs.successors(q, v);
      if (succ.empty()) continue;
      bool inside = true;
      for (int32_t s : succ)
        if (!W.count(s)) {
          inside = false;
          break;
        }
      if (inside) {
        out.insert(q);
        break;
      }
    }
  }
  return out;
}

AbstractController solve_reach_avoid(const Abstraction& abs, const LocalTask& task) {
  task.check();
  const int Q = static_cast<int>(abs.num_states());
  const int M = static_cast<int>(abs.num_inputs());
  AbstractController c;
  c.table.assign(static_cast<size_t>(Q), {});
  for (auto& e : c.table) e.input = -1;

  std::vector<char> in_avoid(static_cast<size_t>(Q), 0);
  for (int q : task.avoid_set) in_avoid[static_cast<size_t>(q)] = 1;
  std::vector<char> in_prev(static_cast<size_t>(Q), 0);
  std::vector<char> in_w(static_cast<size_t>(Q), 0);
  for (int q : task.target_set) {
    if (in_avoid[static_cast<size_t>(q)]) continue;
    in_w[static_cast<size_t>(q)] = 1;
    c.table[static_cast<size_t>(q)].steps_to_go = 0;
    c.winning.insert(q);
  }

  /* watch position per (q, v): first successor not yet known winning */
  std::vector<size_t> watch(static_cast<size_t>(Q) * static_cast<size_t>(M), 0);

  int steps = 0;
  bool grew = true;
  while (grew) {
    grew = false;
    ++steps;
    in_prev = in_w;
    std::vector<int> added;
    for (int q = 0; q < Q; ++q) {
      if (in_prev[static_cast<size_t>(q)] || in_avoid[static_cast<size_t>(q)]) continue;
      for (int v = 0; v < M; ++v) {
        const auto& succ = abs.successors(q, v);
        if (succ.empty()) continue;
        size_t& w = watch[static_cast<size_t>(q) * static_cast<size_t>(M) +
                          static_cast<size_t>(v)];
        while (w < succ.size() && in_prev[static_cast<size_t>(succ[w])]) ++w;
        if (w == succ.size()) {
          c.table[static_cast<size_t>(q)] = {v, steps};
          added.push_back(q);
          break;
        }
      }
    }
    for (int q : added) {
      in_w[static_cast<size_t>(q)] = 1;
      c.winning.insert(q);
      grew = true;
    }
  }

  std::set<int> uncovered;
  for (int q : task.init_set)
    if (!c.winning.count(q)) uncovered.insert(q);
  if (!uncovered.empty())
    throw SynthesisError("local synthesis failure: " + std::to_string(uncovered.size()) +
                             " initial states outside the winning set",
                         uncovered);
  return c;
}

namespace {

/* planar polygon of the G-ball {v : max_k |<v, ghat_k>| <= r} */
poly::Polygon gball_polygon(const Mat& gnorm, double r, double clip_extent) {
  poly::Polygon ball = {{-clip_extent, -clip_extent},
                        {clip_extent, -clip_extent},
                        {clip_extent, clip_extent},
                        {-clip_extent, clip_extent}};
  for (long k = 0; k < gnorm.cols(); ++k) {
    const Eigen::Vector2d ghat = Eigen::Vector2d(gnorm.col(k)).normalized();
    ball = poly::clip_halfplane(ball, ghat, r);
    ball = poly::clip_halfplane(ball, -ghat, r);
  }
  return ball;
}

bool polygons_overlap(const poly::Polygon& a, const poly::Polygon& b) {
  poly::Polygon c = a;
  const size_t n = b.size();
  for (size_t i = 0; i < n && c.size() >= 3; ++i) {
    const poly::Pt& p = b[i];
    const poly::Pt& q = b[(i + 1) % n];
    poly::Pt nrm(q.y() - p.y(), -(q.x() - p.x()));
    c = poly::clip_halfplane(c, nrm, nrm.dot(p));
  }
  return c.size() >= 3 && std::fabs(poly::area(c)) > 1e-12;
}

double euclid_dist_to_polygon(const poly::Polygon& p, const poly::Pt& x) {
  if (p.empty()) return std::numeric_limits<double>::infinity();
  if (poly::point_in(p, x)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const poly::Pt& a = p[i];
    const poly::Pt& b = p[(i + 1) % n];
    const poly::Pt d = b - a;
    const double len2 = d.squaredNorm();
    const double t = len2 > 0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (x - (a + t * d)).norm());
  }
  return best;
}

}  // namespace

std::set<int> target_states(const Abstraction& abs, const FreeRegion& region,
                            const ForbiddenRegions& obstacles, double ball_eps,
                            double obstacle_ball_eps) {
  std::set<int> out;
  if (region.polygon.size() < 3) return out;
  if (obstacle_ball_eps < 0) obstacle_ball_eps = ball_eps;
  const Box bb = loose_bounding_box(region.omega);
  const double extent =
      2.0 * (bb.upper - bb.lower).norm() + 10.0 * std::max(ball_eps, obstacle_ball_eps) + 1.0;
  const poly::Polygon ball = gball_polygon(abs.lattice.gnorm, ball_eps, extent);
  const poly::Polygon oball = gball_polygon(abs.lattice.gnorm, obstacle_ball_eps, extent);
  if (ball.size() < 3 || oball.size() < 3) return out;
  for (size_t q = 0; q < abs.lattice.points.size(); ++q) {
    const Vec& p = abs.lattice.points[q];
    poly::Polygon shifted = ball;
    for (auto& v : shifted) v += poly::Pt(p[0], p[1]);
    bool ok = true;
    for (const auto& v : shifted)
      if (!poly::point_in(region.polygon, v, 1e-9)) {
        ok = false;
        break;
      }
    if (ok && !obstacles.empty()) {
      poly::Polygon oshift = oball;
      for (auto& v : oshift) v += poly::Pt(p[0], p[1]);
      for (size_t o = 0; ok && o < obstacles.regions.size(); ++o) {
        if (obstacles.polygons[o].size() >= 3 && polygons_overlap(oshift, obstacles.polygons[o]))
          ok = false;
      }
    }
    if (ok) out.insert(static_cast<int>(q));
  }
  return out;
}

std::set<int> init_states(const Abstraction& abs, const FreeRegion& region,
                          const ForbiddenRegions& obstacles) {
  std::set<int> out;
  for (size_t q = 0; q < abs.lattice.points.size(); ++q)
    if (region.contains_free(abs.lattice.points[q], obstacles)) out.insert(static_cast<int>(q));
  return out;
}

std::set<int> unsafe_states(const Abstraction& abs, const ForbiddenRegions& obstacles,
                            double margin) {
  std::set<int> out;
  if (obstacles.empty()) return out;
  const Mat& G = abs.lattice.gnorm;
  Mat ghat(G.rows(), G.cols());
  for (long k = 0; k < G.cols(); ++k) ghat.col(k) = G.col(k).normalized();
  Eigen::JacobiSVD<Mat> svd(Mat(ghat.transpose()));
  const double smin = svd.singularValues().minCoeff();
  const double factor = smin > 1e-12 ? std::sqrt(static_cast<double>(G.cols())) / smin : 1e12;
  for (size_t q = 0; q < abs.lattice.points.size(); ++q) {
    const Vec& p = abs.lattice.points[q];
    for (size_t o = 0; o < obstacles.regions.size(); ++o) {
      if (obstacles.polygons[o].size() >= 3) {
        const double ed = euclid_dist_to_polygon(obstacles.polygons[o], poly::Pt(p[0], p[1]));
        if (ed == 0.0) {
          out.insert(static_cast<int>(q));
          break;
        }
        /* ||v||_G >= |v| / factor: far enough in euclidean terms is safe */
        if (ed >= margin * factor) continue;
      }
      if (g_norm_distance(G, obstacles.regions[o], p) < margin) {
        out.insert(static_cast<int>(q));
        break;
      }
    }
  }
  return out;
}

ComposedController compose(std::vector<Stage> stages, const PathPlan& plan,
                           const ForbiddenRegions& obstacles) {
  require(stages.size() == plan.cells.size(), "compose: one controller per plan cell");
  require(plan.waypoints.size() == plan.cells.size() + 1, "compose: waypoint count mismatch");
  ComposedController cc;
  cc.stages = std::move(stages);
  cc.obstacles = &obstacles;
  for (size_t i = 0; i < cc.stages.size(); ++i) {
    Stage& st = cc.stages[i];
    st.handoff = plan.waypoints[i + 1];
    st.quantizer.lattice = &st.abstraction.lattice;
    st.quantizer.epsilon = st.quant_epsilon;
  }
  /* seam consistency: the seam must be a real region and the next stage must
   * be able to take over somewhere inside it */
  for (size_t i = 0; i + 1 < cc.stages.size(); ++i) {
    const Stage& next = cc.stages[i + 1];
    const FreeRegion& seam = cc.stages[i].handoff;
    require(seam.polygon.size() >= 3, "compose: empty seam region after stage " +
                                          std::to_string(i) + " (cell pi_" +
                                          std::to_string(cc.stages[i].cell_index + 1) + ")");
    bool has_goal_state = false;
    for (const auto& e : cc.stages[i].controller.table)
      if (e.steps_to_go == 0 && cc.stages[i].controller.winning.size()) {
        has_goal_state = true;
        break;
      }
    require(has_goal_state, "compose: stage " + std::to_string(i) + " has no target states");
    int reachable = 0, sampled = 0;
    std::mt19937_64 eng(0xc0de + i);
    auto unit = [&eng]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
    for (int t = 0; t < 64; ++t) {
      const poly::Pt p = poly::sample_point(seam.polygon, unit(), unit(), unit());
      Vec x(2);
      x << p.x(), p.y();
      if (!seam.contains_free(x, obstacles)) continue;
      ++sampled;
      auto F = quantize(next.quantizer, x);
      for (int qi : F)
        if (next.controller.in_domain(qi)) {
          ++reachable;
          break;
        }
    }
    require(sampled > 0 && reachable > 0,
            "compose: handoff inconsistency at the seam after stage " + std::to_string(i) +
                " (cell pi_" + std::to_string(cc.stages[i].cell_index + 1) + ")");
  }
  return cc;
}

RefineResult refine(const ComposedController& cc, const Vec& x, int stage) {
  require(stage >= 0 && stage < static_cast<int>(cc.stages.size()), "refine: bad stage index");
  const Stage& st = cc.stages[static_cast<size_t>(stage)];
  RefineResult r;
  /* stage advance is checked before input selection; a non-final stage only
   * hands off once its successor can actually take over at x */
  if (st.handoff.contains_free(x, *cc.obstacles)) {
    bool ready = true;
    if (static_cast<size_t>(stage) + 1 < cc.stages.size()) {
      const Stage& next = cc.stages[static_cast<size_t>(stage) + 1];
      ready = false;
      for (int qi : quantize(next.quantizer, x))
        if (next.controller.in_domain(qi)) {
          ready = true;
          break;
        }
    }
    if (ready) {
      r.advance = true;
      return r;
    }
  }
  auto F = quantize(st.quantizer, x);
  int best = -1;
  double best_dist = 0.0;
  for (int qi : F) {
    if (!st.controller.in_domain(qi)) continue;
    if (st.controller.table[static_cast<size_t>(qi)].input < 0) continue;
    const double d =
        g_norm(st.abstraction.lattice.gnorm, Vec(st.abstraction.lattice.points[qi] - x));
    const int steps = st.controller.table[static_cast<size_t>(qi)].steps_to_go;
    if (best < 0) {
      best = qi;
      best_dist = d;
      continue;
    }
    const int bsteps = st.controller.table[static_cast<size_t>(best)].steps_to_go;
    if (steps < bsteps || (steps == bsteps && (d < best_dist - 1e-15 ||
                                               (std::fabs(d - best_dist) <= 1e-15 && qi < best)))) {
      best = qi;
      best_dist = d;
    }
  }
  if (best < 0) {
    r.failed = true;
    return r;
  }
  r.chosen_state = best;
  r.input = st.abstraction.grid.inputs[static_cast<size_t>(
      st.controller.table[static_cast<size_t>(best)].input)];
  return r;
}

}  // namespace zonoctrl
