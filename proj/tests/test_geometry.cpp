#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "zonoctrl/czono.hpp"
#include "zonoctrl/linprog.hpp"
#include "zonoctrl/polygon.hpp"

using namespace zonoctrl;
using testutil::Rng;

namespace {

ConstrainedZonotope unit_box2() {
  return ConstrainedZonotope::zonotope(Vec::Zero(2), Mat::Identity(2, 2));
}

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("linprog basics") {
  /* min x+y s.t. x+y >= 1 encoded as -x-y <= -1, box [0,2]^2 */
  lp::Problem p;
  p.c = v2(1, 1);
  p.A_eq = Mat::Zero(0, 2);
  p.b_eq = Vec::Zero(0);
  p.A_ub = Mat(1, 2);
  p.A_ub << -1, -1;
  p.b_ub = Vec::Constant(1, -1.0);
  p.lo = Vec::Zero(2);
  p.hi = Vec::Constant(2, 2.0);
  auto r = lp::solve(p);
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-9));

  /* inconsistent equalities are infeasible */
  lp::Problem q;
  q.c = v2(0, 0);
  q.A_eq = Mat(2, 2);
  q.A_eq << 1, 0, 1, 0;
  q.b_eq = v2(0, 1);
  q.A_ub = Mat::Zero(0, 2);
  q.b_ub = Vec::Zero(0);
  q.lo = Vec::Constant(2, -1.0);
  q.hi = Vec::Constant(2, 1.0);
  CHECK(!lp::solve(q).ok());

  /* equality forcing a variable beyond its box is infeasible */
  lp::Problem z;
  z.c = v2(1, 0);
  z.A_eq = Mat(1, 2);
  z.A_eq << 1, 0;
  z.b_eq = Vec::Constant(1, 5.0);
  z.A_ub = Mat::Zero(0, 2);
  z.b_ub = Vec::Zero(0);
  z.lo = Vec::Constant(2, -1.0);
  z.hi = Vec::Constant(2, 1.0);
  CHECK(!lp::solve(z).ok());
}

TEST_CASE("is_empty examples") {
  CHECK(!is_empty(unit_box2()));

  ConstrainedZonotope s;
  s.center = Vec::Zero(1);
  s.generators = Mat::Ones(1, 1);
  s.constraint_matrix = Mat::Ones(1, 1);
  s.constraint_offset = Vec::Constant(1, 2.0);
  CHECK(is_empty(s));

  ConstrainedZonotope t = unit_box2();
  t.constraint_matrix = Mat(1, 2);
  t.constraint_matrix << 1, 1;
  t.constraint_offset = Vec::Constant(1, 2.0);
  CHECK(!is_empty(t)); /* the single point (1,1) */
}

TEST_CASE("contains examples") {
  const auto box = unit_box2();
  CHECK(contains(box, v2(0.5, 0.5)));
  CHECK(!contains(box, v2(1.5, 0)));

  Mat G(2, 2);
  G << 1, 1, 0, 1;
  auto par = ConstrainedZonotope::zonotope(v2(1, 1), G);
  CHECK(contains(par, v2(1, 1)));

  CHECK_THROWS_AS(contains(box, Vec::Zero(3)), DimensionError);
}

TEST_CASE("expand examples") {
  const auto box = unit_box2();
  auto e = expand(box, 1.0);
  CHECK(contains(e, v2(1.9, 0)));
  CHECK(!contains(e, v2(2.1, 0)));
  CHECK_THROWS(expand(box, -0.1));

  /* eps = 0 keeps the membership predicate */
  auto z = expand(box, 0.0);
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Vec x = v2(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    CHECK(contains(z, x) == contains(box, x));
  }

  /* monotonicity for a constrained set */
  ConstrainedZonotope t = unit_box2();
  t.constraint_matrix = Mat(1, 2);
  t.constraint_matrix << 1, 1;
  t.constraint_offset = Vec::Constant(1, 0.5);
  auto te = expand(t, 0.5);
  for (int i = 0; i < 200; ++i) {
    Vec x = v2(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
    if (contains(t, x)) CHECK(contains(te, x));
  }
}

TEST_CASE("intersect examples") {
  const auto a = unit_box2();
  Box shifted{v2(0, -1), v2(2, 1)};
  const auto b = shifted.to_czono();
  auto w = intersect(a, b);
  CHECK(contains(w, v2(0.5, 0)));
  CHECK(contains(w, v2(0, 0)));
  CHECK(contains(w, v2(1, 1)));
  CHECK(!contains(w, v2(-0.5, 0)));
  CHECK(!contains(w, v2(1.5, 0)));

  Box b1{v2(-1, -1), v2(0, 0)}, b2{v2(2, 2), v2(3, 3)};
  CHECK(is_empty(intersect(b1.to_czono(), b2.to_czono())));

  auto self = intersect(a, a);
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Vec x = v2(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    CHECK(contains(self, x) == contains(a, x));
  }
}

TEST_CASE("vertices_2d examples") {
  auto vs = vertices_2d(unit_box2());
  REQUIRE(vs.size() == 4);
  CHECK(testutil::same_vertex_set(
      vs, {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}, 1e-9));

  Mat G(2, 2);
  G << 1, 1, 1, -1;
  auto diamond = vertices_2d(ConstrainedZonotope::zonotope(Vec::Zero(2), G));
  CHECK(testutil::same_vertex_set(
      diamond, {{2, 0}, {0, 2}, {-2, 0}, {0, -2}}, 1e-9));

  /* segment from a constrained square */
  ConstrainedZonotope seg = unit_box2();
  seg.constraint_matrix = Mat(1, 2);
  seg.constraint_matrix << 1, 1;
  seg.constraint_offset = Vec::Constant(1, 1.0);
  auto ends = vertices_2d(seg);
  REQUIRE(ends.size() == 2);
  CHECK(testutil::same_vertex_set(ends, {{0, 1}, {1, 0}}, 1e-7));

  CHECK_THROWS(vertices_2d(ConstrainedZonotope::zonotope(Vec::Zero(3), Mat::Identity(3, 3))));
}

TEST_CASE("vertices_2d counterclockwise order") {
  Mat G(2, 3);
  G << 1, 0.5, -0.3, 0.2, 1.0, 0.7;
  auto vs = vertices_2d(ConstrainedZonotope::zonotope(v2(3, -2), G));
  REQUIRE(vs.size() >= 4);
  poly::Polygon p(vs.begin(), vs.end());
  CHECK(poly::area(p) > 0);
}

TEST_CASE("polytope_to_cz examples") {
  auto sq = polytope_to_cz({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}});
  Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    Vec x = v2(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4));
    const bool inside = std::fabs(x[0]) <= 1 && std::fabs(x[1]) <= 1;
    CHECK(contains(sq, x) == inside);
  }

  auto tri = polytope_to_cz({{0, 0}, {1, 0}, {0, 1}});
  CHECK(contains(tri, v2(0.2, 0.2)));
  CHECK(!contains(tri, v2(0.6, 0.6)));

  auto pt = polytope_to_cz({{3, 4}});
  CHECK(contains(pt, v2(3, 4)));
  CHECK(!contains(pt, v2(3.1, 4)));

  CHECK_THROWS(polytope_to_cz({}));
}

TEST_CASE("g_norm examples") {
  CHECK(g_norm(Mat::Identity(2, 2), v2(3, -4)) == doctest::Approx(4.0));
  Mat G(2, 2);
  G << 2, 0, 0, 1;
  CHECK(g_norm(G, v2(1, 1)) == doctest::Approx(1.0));
  CHECK(g_norm(G, Vec::Zero(2)) == doctest::Approx(0.0));
  Mat Z(2, 2);
  Z << 1, 0, 0, 0;
  CHECK_THROWS(g_norm(Z, v2(1, 1)));
}

TEST_CASE("g_norm is absolutely homogeneous and subadditive") {
  Rng rng(17);
  for (int it = 0; it < 200; ++it) {
    Mat G(2, rng.uniform_int(1, 5));
    for (long j = 0; j < G.cols(); ++j) {
      Eigen::Vector2d g;
      do {
        g = Eigen::Vector2d(rng.uniform(-2, 2), rng.uniform(-2, 2));
      } while (g.norm() < 0.2);
      G.col(j) = g;
    }
    Vec u = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    Vec w = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const double a = rng.uniform(-2, 2);
    CHECK(g_norm(G, a * u) == doctest::Approx(std::fabs(a) * g_norm(G, u)).epsilon(1e-9));
    CHECK(g_norm(G, u + w) <= g_norm(G, u) + g_norm(G, w) + 1e-12);
  }
}

TEST_CASE("rasterize examples") {
  auto pts = rasterize(unit_box2(), 1.0);
  CHECK(pts.size() == 9);

  ConstrainedZonotope s;
  s.center = Vec::Zero(1);
  s.generators = Mat::Ones(1, 1);
  s.constraint_matrix = Mat::Ones(1, 1);
  s.constraint_offset = Vec::Constant(1, 2.0);
  CHECK(rasterize(s, 0.5).empty());

  auto tri = polytope_to_cz({{0, 0}, {1, 0}, {0, 1}});
  CHECK(rasterize(tri, 0.5).size() == 6);

  CHECK_THROWS(rasterize(unit_box2(), 0.0));
}

TEST_CASE("membership matches factor-sampling oracle") {
  Rng rng(101);
  int checked = 0;
  for (int it = 0; it < 60; ++it) {
    auto s = testutil::random_czono(rng);
    if (is_empty(s)) continue;
    auto mo = testutil::build_oracle(s);
    if (!mo.usable) continue;
    const double margin = 10 * tol::feas;
    /* sampled members are exactly inside */
    for (size_t i = 0; i < mo.cloud.size(); i += std::max<size_t>(1, mo.cloud.size() / 40)) {
      CHECK(contains(s, Vec(mo.cloud[i])));
      ++checked;
    }
    const Box bb = bounding_box(s);
    for (int t = 0; t < 80; ++t) {
      Vec x = v2(rng.uniform(bb.lower[0] - 2, bb.upper[0] + 2),
                 rng.uniform(bb.lower[1] - 2, bb.upper[1] + 2));
      const int cls = testutil::oracle_classify(mo, Eigen::Vector2d(x), margin);
      if (cls == 0) continue;
      CHECK(contains(s, x) == (cls == 1));
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("zonotope vertices match sign-corner hulls") {
  Rng rng(211);
  for (int it = 0; it < 120; ++it) {
    const int ng = rng.uniform_int(1, 8);
    Mat G(2, ng);
    for (int j = 0; j < ng; ++j) {
      Eigen::Vector2d g;
      do {
        g = Eigen::Vector2d(rng.uniform(-2, 2), rng.uniform(-2, 2));
      } while (g.norm() < 0.2);
      G.col(j) = g;
    }
    auto z = ConstrainedZonotope::zonotope(v2(rng.uniform(-3, 3), rng.uniform(-3, 3)), G);
    auto brute = testutil::sign_corner_hull(z);
    auto fast = vertices_2d(z);
    CHECK(testutil::same_vertex_set(fast, {brute.begin(), brute.end()}, 1e-6));
  }
}

TEST_CASE("cz vertices round-trip membership") {
  Rng rng(331);
  for (int it = 0; it < 40; ++it) {
    auto s = testutil::random_czono(rng);
    if (is_empty(s)) continue;
    VertexList vs;
    try {
      vs = vertices_2d(s);
    } catch (const std::exception&) {
      continue;
    }
    if (vs.size() < 3) continue;
    auto back = polytope_to_cz(vs);
    const Box bb = bounding_box(s);
    for (int t = 0; t < 50; ++t) {
      Vec x = v2(rng.uniform(bb.lower[0] - 1, bb.upper[0] + 1),
                 rng.uniform(bb.lower[1] - 1, bb.upper[1] + 1));
      /* skip near-boundary points: two exact representations may disagree
       * within tolerance there */
      poly::Polygon p(vs.begin(), vs.end());
      const bool in_strict = poly::point_in(p, Eigen::Vector2d(x), -1e-6);
      const bool out_strict = !poly::point_in(p, Eigen::Vector2d(x), 1e-6);
      if (in_strict) {
        CHECK(contains(back, x));
        CHECK(contains(s, x));
      } else if (out_strict) {
        CHECK(!contains(back, x));
        CHECK(!contains(s, x));
      }
    }
  }
}

TEST_CASE("intersect membership equals conjunction on samples") {
  Rng rng(401);
  for (int it = 0; it < 25; ++it) {
    auto a = testutil::random_czono(rng);
    auto b = testutil::random_czono(rng);
    auto w = intersect(a, b);
    for (int t = 0; t < 80; ++t) {
      Vec x = v2(rng.uniform(-8, 8), rng.uniform(-8, 8));
      CHECK(contains(w, x) == (contains(a, x) && contains(b, x)));
    }
  }
}

TEST_CASE("g_norm_distance agrees with sampling") {
  Rng rng(501);
  const auto box = unit_box2();
  const Mat G = Mat::Identity(2, 2);
  /* distance from points to the unit box in the identity G-norm is the
   * infinity-norm distance */
  CHECK(g_norm_distance(G, box, v2(3, 0)) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g_norm_distance(G, box, v2(0.5, 0)) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(g_norm_distance(G, box, v2(-2, -2)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("polygon helpers") {
  poly::Polygon sq = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(poly::area(sq) == doctest::Approx(4.0));
  CHECK(poly::point_in(sq, {1, 1}));
  CHECK(!poly::point_in(sq, {3, 1}));
  auto c = poly::centroid(sq);
  CHECK(c.x() == doctest::Approx(1.0));
  CHECK(c.y() == doctest::Approx(1.0));

  /* subtract an inscribed diamond: four corner triangles */
  poly::Polygon diamond = {{1, 0}, {2, 1}, {1, 2}, {0, 1}};
  auto pieces = poly::subtract(sq, diamond);
  double total = 0;
  for (const auto& p : pieces) total += std::fabs(poly::area(p));
  CHECK(pieces.size() == 4);
  CHECK(total == doctest::Approx(2.0).epsilon(1e-9));

  /* pieces stay out of the clip interior */
  for (const auto& p : pieces) {
    auto pc = poly::centroid(p);
    CHECK(!poly::point_in(diamond, pc, -1e-9));
  }

  /* merging two halves of a square is convex */
  poly::Polygon left = {{0, 0}, {1, 0}, {1, 2}, {0, 2}};
  poly::Polygon right = {{1, 0}, {2, 0}, {2, 2}, {1, 2}};
  auto merged = poly::merge_if_convex(left, right);
  REQUIRE(merged.has_value());
  CHECK(std::fabs(poly::area(*merged)) == doctest::Approx(4.0));

  /* a square and a far triangle do not merge */
  poly::Polygon far_tri = {{5, 5}, {6, 5}, {5, 6}};
  CHECK(!poly::merge_if_convex(left, far_tri).has_value());
}
