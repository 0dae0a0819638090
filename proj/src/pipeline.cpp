#include "zonoctrl/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <sstream>

namespace zonoctrl {

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<ConstrainedZonotope> boxes_to_czonos(const std::vector<Box>& boxes) {
  std::vector<ConstrainedZonotope> out;
  for (const auto& b : boxes) out.push_back(b.to_czono());
  return out;
}

}  // namespace

SampledSystem system_of(const Scenario& sc) {
  SampledSystem sys;
  sys.dynamics = sc.dynamics;
  sys.params = sc.dyn_params;
  sys.tau = sc.tau;
  sys.lipschitz = sc.lipschitz;
  sys.state_box = sc.state_box;
  sys.input_box = sc.input_box;
  sys.check();
  return sys;
}

io::json RunReport::to_json() const {
  io::json j;
  j["format"] = "zonoctrl-report";
  j["version"] = 1;
  j["verdict"] = verdict;
  j["exit_code"] = exit_code;
  j["seed"] = seed;
  j["cells"] = {{"total", cells_total},
                {"zonotopes", cells_zonotope},
                {"constrained", cells_residual}};
  io::json per = io::json::array();
  for (const auto& [sym, cnt] : per_cell_transitions)
    per.push_back({{"symbol", "pi_" + std::to_string(sym)}, {"transitions", cnt}});
  j["per_cell_transitions"] = per;
  j["transition_number"] = total_transitions;
  j["times"] = {{"t_partition", t_partition},
                {"t_verify", t_verify},
                {"t_abs", t_abs},
                {"t_con", t_con},
                {"t_sim", t_sim}};
  j["notes"] = notes;
  j["config"] = config_echo;
  return j;
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "verdict: " << verdict << "\n";
  os << "seed: " << seed << "\n";
  os << "cells: " << cells_total << " (" << cells_zonotope << " zonotopes, " << cells_residual
     << " constrained)\n";
  os << "transition number: " << total_transitions << "\n";
  for (const auto& [sym, cnt] : per_cell_transitions)
    os << "  pi_" << sym << ": " << cnt << "\n";
  os << "t_abs: " << t_abs << " s\n";
  os << "t_con: " << t_con << " s\n";
  os << "t_partition: " << t_partition << " s, t_verify: " << t_verify << " s, t_sim: " << t_sim
     << " s\n";
  for (const auto& n : notes) os << "note: " << n << "\n";
  return os.str();
}

namespace {

void write_report_files(const std::string& out_dir, const RunReport& rep,
                        const std::string& stem = "report") {
  io::write_text_file(out_dir + "/" + stem + ".json", rep.to_json().dump(1) + "\n");
  io::write_text_file(out_dir + "/" + stem + ".txt", rep.to_text());
}

void write_verification_file(const std::string& out_dir, const TaskGraph& tg,
                             const VerificationResult& vr) {
  io::json j;
  j["format"] = "zonoctrl-verification";
  j["version"] = 1;
  j["satisfiable"] = vr.satisfiable;
  io::json seq = io::json::array();
  for (int v : vr.plan.vertex_sequence) seq.push_back(vertex_name(tg, v));
  j["path"] = seq;
  io::json cells = io::json::array();
  for (int c : vr.plan.cells) cells.push_back("pi_" + std::to_string(c + 1));
  j["plan_cells"] = cells;
  j["notes"] = vr.notes;
  io::write_text_file(out_dir + "/verification.json", j.dump(1) + "\n");
}

}  // namespace

Trajectory simulate(const SampledSystem& sys, const ComposedController& cc, const Vec& x0,
                    int max_steps) {
  Trajectory traj;
  traj.tau = sys.tau;
  Vec x = x0;
  int stage = 0;
  const int n_stages = static_cast<int>(cc.stages.size());
  for (long k = 0; k <= max_steps; ++k) {
    /* stage advance before input selection */
    RefineResult r;
    while (stage < n_stages) {
      r = refine(cc, x, stage);
      if (!r.advance) break;
      ++stage;
    }
    if (stage >= n_stages) {
      traj.samples.push_back({k, x, Vec::Zero(sys.input_dim()), stage});
      traj.reached_goal = true;
      traj.stop_reason = "goal";
      return traj;
    }
    if (r.failed) {
      traj.samples.push_back({k, x, Vec::Zero(sys.input_dim()), stage});
      traj.stop_reason = "refinement-failure";
      return traj;
    }
    if (k == max_steps) break;
    traj.samples.push_back({k, x, r.input, stage});
    x = integrate(sys, x, r.input);
  }
  traj.samples.push_back({static_cast<long>(max_steps), x, Vec::Zero(sys.input_dim()),
                          stage});
  traj.stop_reason = "max-steps";
  return traj;
}

TrajectoryVerdict check_trajectory(const Trajectory& traj, const Scenario& sc,
                                   bool strict_safety) {
  TrajectoryVerdict v;
  if (traj.samples.empty()) {
    v.reason = "empty trajectory";
    return v;
  }
  double margin = 0.0;
  if (strict_safety) {
    const double umax =
        std::max(sc.input_box.lower.cwiseAbs().maxCoeff(), sc.input_box.upper.cwiseAbs().maxCoeff());
    margin = 0.5 * sc.tau * umax;
  }
  size_t next_goal = 0;
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    const Vec& x = traj.samples[i].state;
    for (const auto& o : sc.obstacle_boxes) {
      if (o.contains(x, margin)) {
        v.first_violation = static_cast<long>(i);
        v.reason = "obstacle contact at sample " + std::to_string(i);
        return v;
      }
    }
    while (next_goal < sc.goal_boxes.size() && sc.goal_boxes[next_goal].contains(x, 1e-9))
      ++next_goal;
  }
  if (next_goal < sc.goal_boxes.size()) {
    v.reason = "goal sequence incomplete (" + std::to_string(next_goal) + "/" +
               std::to_string(sc.goal_boxes.size()) + ")";
    return v;
  }
  if (!sc.goal_boxes.back().contains(traj.samples.back().state, 1e-9)) {
    v.reason = "trajectory does not end in the final goal region";
    return v;
  }
  v.satisfied = true;
  v.reason = "satisfied";
  return v;
}

RunReport run_pipeline(const Scenario& sc, const std::string& out_dir, Phase upto, bool parallel,
                       PipelineResult* result, bool strict_safety) {
  sc.check();
  std::filesystem::create_directories(out_dir);
  PipelineResult local;
  PipelineResult& R = result ? *result : local;
  RunReport& rep = R.report;
  rep.seed = sc.seed;
  rep.config_echo = sc.to_json();
  rep.verdict = "partial";
  rep.exit_code = 0;

  /* ---- partition ---- */
  double t0 = now_s();
  PartitionConfig pcfg;
  pcfg.count = sc.partition_count;
  pcfg.epsilon = sc.epsilon;
  pcfg.seed = sc.seed;
  pcfg.neighbor_count = sc.neighbor_count;
  R.cells = make_partition(sc.state_box, pcfg);
  rep.t_partition = now_s() - t0;
  rep.cells_total = static_cast<int>(R.cells.size());
  rep.cells_zonotope = sc.partition_count;
  rep.cells_residual = rep.cells_total - sc.partition_count;
  io::write_partition(out_dir + "/partition.json", R.cells, sc.state_box, pcfg);
  {
    std::vector<Vec> centers;
    for (int i = 0; i < sc.partition_count; ++i)
      centers.push_back(R.cells[static_cast<size_t>(i)].base.center);
    io::SvgScene scene;
    scene.world = sc.state_box;
    scene.cells = &R.cells;
    scene.centers = &centers;
    scene.obstacles = &sc.obstacle_boxes;
    scene.init_box = &sc.init_box;
    scene.goals = &sc.goal_boxes;
    io::write_svg(out_dir + "/partition.svg", scene);
  }
  if (upto == Phase::Partition) {
    write_report_files(out_dir, rep);
    return rep;
  }

  /* ---- verify ---- */
  t0 = now_s();
  R.obstacles = ForbiddenRegions::make(boxes_to_czonos(sc.obstacle_boxes));
  const double r_conn = sc.connectivity_resolution();
  auto adjacency = build_adjacency(R.cells, R.obstacles, r_conn);
  ReachAvoidSpec spec;
  spec.goals = boxes_to_czonos(sc.goal_boxes);
  spec.obstacles = R.obstacles;
  R.task_graph = extend_graph(adjacency, R.cells, sc.init_box, spec, r_conn);
  const auto accepting = sc.accepting_path ? compile_spec(R.task_graph, *sc.accepting_path)
                                           : compile_spec(R.task_graph);
  R.verification = find_path(R.task_graph, accepting, R.cells, R.obstacles, r_conn);
  rep.t_verify = now_s() - t0;
  io::write_text_file(out_dir + "/graph.dot", to_dot(R.task_graph));
  write_verification_file(out_dir, R.task_graph, R.verification);
  for (const auto& n : R.verification.notes) rep.notes.push_back(n);
  if (!R.verification.satisfiable) {
    rep.verdict = "unsatisfiable";
    rep.exit_code = 2;
    write_report_files(out_dir, rep);
    return rep;
  }
  if (upto == Phase::Verify) {
    rep.verdict = "satisfiable";
    write_report_files(out_dir, rep);
    return rep;
  }

  /* ---- abstract: one abstraction per distinct plan cell ---- */
  t0 = now_s();
  const auto sys = system_of(sc);
  const auto grid = approx_input_set(sc.input_box, sc.input_spacing);
  const auto& plan = R.verification.plan;
  std::map<int, Abstraction> abstractions;
  std::map<int, double> cell_eps;
  {
    /* a repeated cell gets the finest spacing assigned to its occurrences */
    for (size_t i = 0; i < plan.cells.size(); ++i) {
      const double s = sc.spacing_for(i, plan.cells.size());
      auto it = cell_eps.find(plan.cells[i]);
      if (it == cell_eps.end() || s < it->second) cell_eps[plan.cells[i]] = s;
    }
    io::json stats = io::json::array();
    for (size_t i = 0; i < plan.cells.size(); ++i) {
      const int ci = plan.cells[i];
      if (abstractions.count(ci)) continue;
      const double spacing = cell_eps.at(ci);
      const Cell& cell = R.cells[static_cast<size_t>(ci)];
      const double tb = now_s();
      auto lattice = approx_state_set(cell, spacing, sc.epsilon);
      auto abs = build_abstraction(sys, cell, lattice, grid, spacing, parallel);
      const double dt = now_s() - tb;
      const std::string sym = "pi_" + std::to_string(ci + 1);
      io::write_abstraction_dump(out_dir + "/abstraction_" + sym + ".bin", abs);
      stats.push_back({{"symbol", sym},
                       {"states", abs.num_states()},
                       {"inputs", abs.num_inputs()},
                       {"transitions", abs.transition_count()},
                       {"epsilon", spacing},
                       {"build_seconds", dt}});
      rep.per_cell_transitions.push_back({ci + 1, abs.transition_count()});
      rep.total_transitions += abs.transition_count();
      abstractions.emplace(ci, std::move(abs));
    }
    io::json aj;
    aj["format"] = "zonoctrl-abstraction-stats";
    aj["version"] = 1;
    aj["cells"] = stats;
    io::write_text_file(out_dir + "/abstractions.json", aj.dump(1) + "\n");
  }
  rep.t_abs = now_s() - t0;
  if (upto == Phase::Abstract) {
    rep.verdict = "satisfiable";
    write_report_files(out_dir, rep);
    return rep;
  }

  /* ---- synthesize stage controllers backward along the plan, so each
   * stage's targets are certified take-over points of its successor ---- */
  t0 = now_s();
  try {
    const size_t L = plan.cells.size();
    std::vector<Stage> stages(L);
    for (size_t ri = 0; ri < L; ++ri) {
      const size_t i = L - 1 - ri;
      const int ci = plan.cells[i];
      const double eps = cell_eps.at(ci);
      Abstraction abs = abstractions.at(ci); /* stage-owned copy */
      LocalTask task;
      task.cell_index = ci;
      /* thin region overlaps cannot host the full containment ball; relax the
       * region radius only, keeping the obstacle clearance certificate */
      for (double shrink : {1.0, 0.5, 0.25, 0.125}) {
        task.target_set =
            target_states(abs, plan.waypoints[i + 1], R.obstacles, 0.5 * eps * shrink, 0.5 * eps);
        if (!task.target_set.empty()) {
          if (shrink < 1.0)
            rep.notes.push_back("relaxed target ball to " + std::to_string(0.5 * eps * shrink) +
                                " in cell pi_" + std::to_string(ci + 1) + " (stage " +
                                std::to_string(i) + ")");
          break;
        }
      }
      if (i + 1 < L) {
        /* keep only targets whose quantization ball the next stage covers */
        const Stage& next = stages[i + 1];
        Quantizer nq{&next.abstraction.lattice, next.quant_epsilon};
        std::set<int> kept;
        for (int qt : task.target_set) {
          const Vec& p = abs.lattice.points[static_cast<size_t>(qt)];
          bool ok = true;
          for (int dir = 0; dir < 8 && ok; ++dir) {
            const double ang = dir * M_PI / 4.0;
            Vec x = p;
            x[0] += 0.5 * eps * std::cos(ang);
            x[1] += 0.5 * eps * std::sin(ang);
            if (!plan.waypoints[i + 1].contains_free(x, R.obstacles)) continue;
            bool covered = false;
            for (int qn : quantize(nq, x))
              if (next.controller.in_domain(qn)) {
                covered = true;
                break;
              }
            ok = covered;
          }
          if (ok) {
            bool center_ok = false;
            for (int qn : quantize(nq, p))
              if (next.controller.in_domain(qn)) {
                center_ok = true;
                break;
              }
            if (center_ok) kept.insert(qt);
          }
        }
        task.target_set = std::move(kept);
      }
      if (task.target_set.empty())
        throw SynthesisError("empty abstract target set in cell pi_" + std::to_string(ci + 1) +
                             " (stage " + std::to_string(i) + ")");
      auto avoid = unsafe_states(abs, R.obstacles, 0.5 * eps);
      for (int q : task.target_set) avoid.erase(q);
      task.avoid_set = std::move(avoid);
      auto init = init_states(abs, plan.waypoints[i], R.obstacles);
      for (int q : task.avoid_set) init.erase(q);
      task.init_set = std::move(init);
      abs.init_states.assign(task.init_set.begin(), task.init_set.end());
      Stage st;
      st.cell_index = ci;
      st.controller = solve_reach_avoid(abs, task);
      st.abstraction = std::move(abs);
      st.quant_epsilon = 0.5 * eps;
      stages[i] = std::move(st);
    }
    R.controller = compose(std::move(stages), plan, R.obstacles);
  } catch (const std::exception& e) {
    rep.t_con = now_s() - t0;
    rep.verdict = "synthesis-failure";
    rep.exit_code = 3;
    rep.notes.push_back(e.what());
    write_report_files(out_dir, rep);
    return rep;
  }
  rep.t_con = now_s() - t0;
  io::write_controller(out_dir + "/controller.json", R.controller);
  if (upto == Phase::Synthesize) {
    rep.verdict = "synthesized";
    write_report_files(out_dir, rep);
    return rep;
  }

  /* ---- simulate the closed loop from the init-box center ---- */
  t0 = now_s();
  R.trajectory = simulate(sys, R.controller, sc.init_box.center(), sc.max_steps);
  const auto verdict = check_trajectory(R.trajectory, sc, strict_safety);
  rep.t_sim = now_s() - t0;
  io::write_trajectory_csv(out_dir + "/trajectory.csv", R.trajectory);
  {
    std::vector<poly::Polygon> waypoints;
    for (const auto& w : plan.waypoints)
      if (w.polygon.size() >= 3) waypoints.push_back(w.polygon);
    io::SvgScene scene;
    scene.world = sc.state_box;
    scene.cells = &R.cells;
    scene.obstacles = &sc.obstacle_boxes;
    scene.init_box = &sc.init_box;
    scene.goals = &sc.goal_boxes;
    scene.waypoints = &waypoints;
    scene.trajectory = &R.trajectory;
    io::write_svg(out_dir + "/trajectory.svg", scene);
  }
  if (verdict.satisfied) {
    rep.verdict = "satisfied";
    rep.exit_code = 0;
  } else if (R.trajectory.stop_reason == "refinement-failure") {
    rep.verdict = "refinement-failure";
    rep.exit_code = 4;
    rep.notes.push_back(verdict.reason);
  } else {
    rep.verdict = "violated";
    rep.exit_code = 1;
    rep.notes.push_back(verdict.reason);
  }
  write_report_files(out_dir, rep);
  return rep;
}

RunReport run_baseline(const Scenario& sc, const std::string& out_dir, bool parallel) {
  sc.check();
  std::filesystem::create_directories(out_dir);
  RunReport rep;
  rep.seed = sc.seed;
  rep.config_echo = sc.to_json();

  double spacing = sc.default_spacing;
  for (double s : sc.cell_spacings) spacing = std::min(spacing, s);

  double est = 1.0;
  for (long d = 0; d < sc.state_box.dim(); ++d)
    est *= (sc.state_box.upper[d] - sc.state_box.lower[d]) / spacing + 1;
  require(est <= 1e7, "baseline: refusing a grid with more than 1e7 states");

  Cell domain;
  domain.symbol_index = 0;
  domain.kind = CellKind::Zonotope;
  domain.base = sc.state_box.to_czono();
  domain.body = domain.base;
  domain.gnorm_generators = domain.base.generators;
  domain.finalize();

  const auto sys = system_of(sc);
  const auto grid = approx_input_set(sc.input_box, sc.input_spacing);
  const auto obstacles = ForbiddenRegions::make(boxes_to_czonos(sc.obstacle_boxes));

  double t0 = now_s();
  auto lattice = approx_state_set(domain, spacing, spacing);
  auto abs = build_abstraction(sys, domain, lattice, grid, spacing, parallel);
  rep.t_abs = now_s() - t0;
  rep.total_transitions = abs.transition_count();
  rep.per_cell_transitions.push_back({0, abs.transition_count()});
  rep.cells_total = 1;

  t0 = now_s();
  try {
    LocalTask task;
    task.init_set = init_states(abs, FreeRegion::make(sc.init_box.to_czono()), obstacles);
    task.target_set = target_states(abs, FreeRegion::make(sc.goal_boxes.back().to_czono()),
                                    obstacles, 0.5 * spacing);
    auto avoid = unsafe_states(abs, obstacles, 0.5 * spacing);
    for (int q : task.target_set) avoid.erase(q);
    task.avoid_set = std::move(avoid);
    solve_reach_avoid(abs, task);
    rep.verdict = "baseline-synthesized";
    rep.exit_code = 0;
  } catch (const std::exception& e) {
    rep.verdict = "baseline-synthesis-failure";
    rep.exit_code = 3;
    rep.notes.push_back(e.what());
  }
  rep.t_con = now_s() - t0;
  rep.notes.push_back("uniform grid spacing " + std::to_string(spacing) + ", " +
                      std::to_string(abs.num_states()) + " states");
  write_report_files(out_dir, rep, "baseline_report");
  return rep;
}

}  // namespace zonoctrl
