#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "zonoctrl/abstraction.hpp"
#include "zonoctrl/dynamics.hpp"

using namespace zonoctrl;
using testutil::Rng;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

SampledSystem vehicle(double tau = 0.5) {
  SampledSystem sys;
  sys.dynamics = "single_integrator";
  sys.tau = tau;
  sys.lipschitz = 0.0;
  sys.state_box = Box{v2(-15, -10), v2(15, 10)};
  sys.input_box = Box{v2(-2, -2), v2(2, 2)};
  return sys;
}

Cell box_cell(double x0, double y0, double x1, double y1, int symbol = 1) {
  Cell c;
  c.symbol_index = symbol;
  c.kind = CellKind::Zonotope;
  c.base = Box{v2(x0, y0), v2(x1, y1)}.to_czono();
  c.body = c.base;
  c.gnorm_generators = c.base.generators;
  c.finalize();
  return c;
}

/* closed-form affine flow through the augmented matrix exponential */
Vec affine_flow(const Mat& A, const Mat& B, const Vec& x, const Vec& u, double tau) {
  const long n = A.rows(), m = B.cols();
  Mat aug = Mat::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = A;
  aug.topRightCorner(n, m) = B;
  Mat e = (aug * tau).exp();
  return e.topLeftCorner(n, n) * x + e.topRightCorner(n, m) * u;
}

}  // namespace

TEST_CASE("integrate examples") {
  auto sys = vehicle();
  CHECK((integrate(sys, v2(0, 0), v2(1, 0)) - v2(0.5, 0)).norm() < 1e-12);
  CHECK((integrate(sys, v2(3, -2), v2(0, 0)) - v2(3, -2)).norm() == 0.0);

  SampledSystem bad = sys;
  bad.dynamics = "warp_drive";
  CHECK_THROWS(integrate(bad, v2(0, 0), v2(0, 0)));
}

TEST_CASE("rk4 matches the affine closed form") {
  Rng rng(77);
  for (int it = 0; it < 25; ++it) {
    Mat A(2, 2), B(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        A(i, j) = rng.uniform(-0.6, 0.6);
        B(i, j) = rng.uniform(-1, 1);
      }
    SampledSystem sys;
    sys.dynamics = "affine";
    sys.tau = 0.5;
    sys.lipschitz = 1.0;
    sys.state_box = Box{v2(-10, -10), v2(10, 10)};
    sys.input_box = Box{v2(-2, -2), v2(2, 2)};
    sys.params = Vec(8);
    sys.params << A(0, 0), A(0, 1), A(1, 0), A(1, 1), B(0, 0), B(0, 1), B(1, 0), B(1, 1);

    const Vec x = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const Vec u = v2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec exact = affine_flow(A, B, x, u, sys.tau);
    const Vec num = integrate(sys, x, u);
    CHECK((num - exact).norm() <= tol::integrator);
  }
}

TEST_CASE("basic_generator examples") {
  Mat G(2, 2);
  G << 2, 0, 0, 2;
  auto bs = basic_generator(G, 1.0, 1.0);
  REQUIRE(bs.size() == 2);
  CHECK(bs[0].subdivisions == 2);
  CHECK(bs[1].subdivisions == 2);
  CHECK((bs[0].step - v2(1, 0)).norm() == 0.0);
  CHECK((bs[1].step - v2(0, 1)).norm() == 0.0);

  Mat S(2, 1);
  S << 0.3, 0;
  auto bs2 = basic_generator(S, 0.5, 1.0);
  CHECK(bs2[0].subdivisions == 1);

  CHECK_THROWS(basic_generator(G, 1.5, 1.0)); /* spacing above the precision */
}

TEST_CASE("approx_state_set on the unit box is the 25-point grid") {
  auto cell = box_cell(-1, -1, 1, 1);
  auto lat = approx_state_set(cell, 0.5, 1.0);
  REQUIRE(lat.size() == 25);
  std::set<std::pair<long, long>> got;
  for (const auto& p : lat.points) {
    got.insert({std::lround(p[0] * 2), std::lround(p[1] * 2)});
    CHECK(contains(cell.body, p));
  }
  CHECK(got.size() == 25);
  for (long i = -2; i <= 2; ++i)
    for (long j = -2; j <= 2; ++j) CHECK(got.count({i, j}) == 1);
  CHECK(lat.step_max == doctest::Approx(0.5));
}

TEST_CASE("lattice covering bound on random cells") {
  Rng rng(501);
  for (int it = 0; it < 12; ++it) {
    /* random zonotope cell with 2..4 generators */
    const int ng = rng.uniform_int(2, 4);
    Mat G(2, ng);
    for (int k = 0; k < ng; ++k) {
      Eigen::Vector2d g;
      do {
        g = Eigen::Vector2d(rng.uniform(-3, 3), rng.uniform(-3, 3));
      } while (g.norm() < 0.5);
      G.col(k) = g;
    }
    Cell cell;
    cell.symbol_index = it + 1;
    cell.kind = CellKind::Zonotope;
    cell.base = ConstrainedZonotope::zonotope(v2(rng.uniform(-3, 3), rng.uniform(-3, 3)), G);
    cell.body = cell.base;
    cell.gnorm_generators = G;
    cell.finalize();

    const double spacing = rng.uniform(0.3, 0.9);
    auto lat = approx_state_set(cell, spacing, 1.0);
    const double rho = 0.5 * lat.step_max;
    for (int t = 0; t < 1000; ++t) {
      const poly::Pt p = poly::sample_point(cell.body_polygon, rng.uniform(0, 1),
                                            rng.uniform(0, 1), rng.uniform(0, 1));
      Vec x = v2(p.x(), p.y());
      double best = 1e300;
      for (const auto& q : lat.points)
        best = std::min(best, g_norm(cell.gnorm_generators, Vec(q - x)));
      CHECK(best <= rho + 1e-9);
    }
    /* all points inside the body */
    for (const auto& q : lat.points) CHECK(cell.body_contains(q));
  }
}

TEST_CASE("lattice on a constrained cell stays inside") {
  /* box cut by a diagonal constraint */
  auto tri = polytope_to_cz({{0, 0}, {3, 0}, {0, 3}});
  Cell cell;
  cell.symbol_index = 9;
  cell.kind = CellKind::Constrained;
  cell.base = tri;
  cell.body = tri;
  /* gnorm columns: the nonzero generators, as the partition does */
  std::vector<long> keep;
  for (long j = 0; j < tri.generators.cols(); ++j)
    if (tri.generators.col(j).norm() > 1e-12) keep.push_back(j);
  cell.gnorm_generators = Mat(2, static_cast<long>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j)
    cell.gnorm_generators.col(static_cast<long>(j)) = tri.generators.col(keep[j]);
  cell.finalize();
  auto lat = approx_state_set(cell, 0.4, 1.0);
  CHECK(lat.size() > 10);
  for (const auto& q : lat.points) CHECK(contains(cell.body, q));

  /* covering with the repair pass active near the corners */
  Rng rng(91);
  const double rho = 0.5 * lat.step_max;
  for (int t = 0; t < 1000; ++t) {
    const poly::Pt p = poly::sample_point(cell.body_polygon, rng.uniform(0, 1),
                                          rng.uniform(0, 1), rng.uniform(0, 1));
    Vec x = v2(p.x(), p.y());
    double best = 1e300;
    for (const auto& q : lat.points)
      best = std::min(best, g_norm(cell.gnorm_generators, Vec(q - x)));
    CHECK(best <= rho + 1e-9);
  }
}

TEST_CASE("approx_input_set examples") {
  auto g = approx_input_set(Box{v2(-2, -2), v2(2, 2)}, 0.5);
  CHECK(g.inputs.size() == 81);
  bool has_center = false;
  for (const auto& u : g.inputs)
    if (u.norm() == 0.0) has_center = true;
  CHECK(has_center);

  Vec p(2);
  p << 1.5, -0.5;
  auto single = approx_input_set(Box{p, p}, 0.5);
  REQUIRE(single.inputs.size() == 1);
  CHECK((single.inputs[0] - p).norm() == 0.0);

  CHECK_THROWS(approx_input_set(Box{v2(-1, -1), v2(1, 1)}, 0.0));
}

TEST_CASE("input approximation bound for the single integrator") {
  auto sys = vehicle();
  auto cell = box_cell(-2, -2, 2, 2);
  auto grid = approx_input_set(sys.input_box, 0.5);
  const Mat& G = cell.gnorm_generators;
  /* kappa(G): worst G-norm of a unit-infinity-ball direction */
  double kappa = 0.0;
  for (long k = 0; k < G.cols(); ++k)
    kappa = std::max(kappa, G.col(k).cwiseAbs().sum() / G.col(k).norm());
  const double bound = sys.tau * grid.spacing * kappa / 2 + 1e-12;

  Rng rng(33);
  const Vec q = v2(0.3, -0.7);
  for (int t = 0; t < 500; ++t) {
    const Vec u1 = v2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec x1 = integrate(sys, q, u1);
    double best = 1e300;
    for (const auto& u2 : grid.inputs)
      best = std::min(best, g_norm(G, Vec(x1 - integrate(sys, q, u2))));
    CHECK(best <= bound);
  }
}

TEST_CASE("abstraction radius and nonempty successors") {
  auto sys = vehicle();
  auto cell = box_cell(-3, -3, 3, 3);
  auto lat = approx_state_set(cell, 0.5, 1.0);
  auto grid = approx_input_set(sys.input_box, 1.0);
  auto abs = build_abstraction(sys, cell, lat, grid, 0.5);

  CHECK(abs.radius == doctest::Approx(1.5 * 0.5)); /* L = 0: (0.5 + 1) eps */

  long enabled = 0;
  for (int q = 0; q < static_cast<int>(abs.num_states()); ++q) {
    for (int v = 0; v < static_cast<int>(abs.num_inputs()); ++v) {
      if (abs.enabled(q, v)) {
        ++enabled;
        CHECK(abs.successors(q, v).size() >= 1);
      }
    }
  }
  CHECK(enabled > 0);
  CHECK(abs.transition_count() > 0);
}

TEST_CASE("transition monotonicity in the radius") {
  auto sys = vehicle();
  auto cell = box_cell(-2, -2, 2, 2);
  auto lat = approx_state_set(cell, 0.5, 1.0);
  auto grid = approx_input_set(sys.input_box, 1.0);
  auto base = build_abstraction(sys, cell, lat, grid, 0.5, true, 1.0);
  auto wider = build_abstraction(sys, cell, lat, grid, 0.5, true, 1.3);
  for (size_t k = 0; k < base.transitions.size(); ++k) {
    const auto& a = base.transitions[k];
    const auto& b = wider.transitions[k];
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("serial and parallel kernels build the same table") {
  auto sys = vehicle();
  auto cell = box_cell(-3, -2, 2, 3);
  auto lat = approx_state_set(cell, 0.4, 1.0);
  auto grid = approx_input_set(sys.input_box, 1.0);
  auto a = build_abstraction(sys, cell, lat, grid, 0.4, false);
  auto b = build_abstraction(sys, cell, lat, grid, 0.4, true);
  REQUIRE(a.transitions.size() == b.transitions.size());
  for (size_t k = 0; k < a.transitions.size(); ++k) CHECK(a.transitions[k] == b.transitions[k]);
}

TEST_CASE("quantize examples") {
  auto cell = box_cell(-1, -1, 1, 1);
  auto lat = approx_state_set(cell, 0.5, 1.0);
  Quantizer q{&lat, 0.5};

  /* a lattice point quantizes to itself among others */
  const Vec p = lat.points[7];
  auto F = quantize(q, p);
  bool self = false;
  for (int i : F)
    if ((lat.points[static_cast<size_t>(i)] - p).norm() == 0.0) self = true;
  CHECK(self);

  /* eps >= half max step keeps the map nonempty across the cell */
  Rng rng(3);
  Quantizer qmin{&lat, 0.5 * lat.step_max};
  for (int t = 0; t < 1000; ++t) {
    Vec x = v2(rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK(!quantize(qmin, x).empty());
  }

  /* eps = 0 off the lattice is empty */
  Quantizer q0{&lat, 0.0};
  CHECK(quantize(q0, v2(0.21, 0.07)).empty());
}

TEST_CASE("frr holds and the halved radius breaks it") {
  /* skewed generators and an incommensurate tau keep the lattice out of
   * arithmetic alignment with the input steps */
  auto sys = vehicle(0.37);
  Mat G(2, 3);
  G << 2.9, 1.1, -0.7, 0.3, 2.3, 1.9;
  Cell cell;
  cell.symbol_index = 2;
  cell.kind = CellKind::Zonotope;
  cell.base = ConstrainedZonotope::zonotope(v2(0.4, -0.3), G);
  cell.body = cell.base;
  cell.gnorm_generators = G;
  cell.finalize();

  const double eps = 0.5;
  auto lat = approx_state_set(cell, eps, 1.0);
  auto grid = approx_input_set(sys.input_box, 0.5);
  auto abs = build_abstraction(sys, cell, lat, grid, eps);

  Quantizer q{&lat, 0.5 * eps};
  auto rep = check_frr(sys, cell, abs, q, 4000, 99);
  CHECK(rep.samples == 4000);
  CHECK(rep.violations_a == 0);
  CHECK(rep.violations_b == 0);
  CHECK(rep.quantizer_misses == 0);
  CHECK(rep.checked_b > 1000);

  auto mutated = build_abstraction(sys, cell, lat, grid, eps, true, 0.5);
  auto rep2 = check_frr(sys, cell, mutated, q, 4000, 99);
  CHECK(rep2.violations_b >= 1);
}
