#include "zonoctrl/czono.hpp"

#include <algorithm>
#include <cmath>

#include "zonoctrl/linprog.hpp"

namespace zonoctrl {

namespace {

/* factor box used inside the feasibility LPs; anything needing |xi| > 2 is
 * already infeasible for the unit factor set */
constexpr double kXiBox = 2.0;

/* min ||xi||_inf subject to E xi = f within the kXiBox box.
 * Returns (feasible, t*). */
std::pair<bool, double> min_factor_norm(const Mat& E, const Vec& f) {
  const long ng = E.cols();
  const long m = E.rows();
  lp::Problem p;
  const long nv = ng + 1; /* xi, t */
  p.c = Vec::Zero(nv);
  p.c[ng] = 1.0;
  p.A_eq = Mat::Zero(m, nv);
  p.A_eq.block(0, 0, m, ng) = E;
  p.b_eq = f;
  p.A_ub = Mat::Zero(2 * ng, nv);
  p.b_ub = Vec::Zero(2 * ng);
  for (long i = 0; i < ng; ++i) {
    p.A_ub(2 * i, i) = 1.0;
    p.A_ub(2 * i, ng) = -1.0;
    p.A_ub(2 * i + 1, i) = -1.0;
    p.A_ub(2 * i + 1, ng) = -1.0;
  }
  p.lo = Vec::Constant(nv, -kXiBox);
  p.hi = Vec::Constant(nv, kXiBox);
  p.lo[ng] = 0.0;
  auto r = lp::solve(p);
  if (!r.ok()) return {false, 0.0};
  return {true, r.objective};
}

double coord_scale(const ConstrainedZonotope& s) {
  return 1.0 + s.center.lpNorm<Eigen::Infinity>() +
         (s.num_generators() ? s.generators.cwiseAbs().maxCoeff() : 0.0);
}

}  // namespace

void ConstrainedZonotope::check() const {
  require(center.size() >= 1, "czono: empty center");
  require(generators.rows() == center.size(), "czono: generator row mismatch");
  require(generators.cols() >= 1, "czono: need n_g >= 1");
  require(constraint_matrix.cols() == generators.cols() || constraint_matrix.rows() == 0,
          "czono: constraint column mismatch");
  require(constraint_offset.size() == constraint_matrix.rows(),
          "czono: constraint offset mismatch");
  require(center.allFinite() && generators.allFinite(), "czono: non-finite entries");
  if (constraint_matrix.size() > 0)
    require(constraint_matrix.allFinite() && constraint_offset.allFinite(),
            "czono: non-finite constraint entries");
}

ConstrainedZonotope ConstrainedZonotope::zonotope(Vec c, Mat G) {
  ConstrainedZonotope s;
  s.center = std::move(c);
  s.generators = std::move(G);
  s.constraint_matrix = Mat::Zero(0, s.generators.cols());
  s.constraint_offset = Vec::Zero(0);
  s.check();
  return s;
}

ConstrainedZonotope ConstrainedZonotope::point(Vec p) {
  const long n = p.size();
  return zonotope(std::move(p), Mat::Zero(n, 1));
}

bool Box::contains(const Vec& x, double slack) const {
  if (x.size() != dim()) throw DimensionError("box: dimension mismatch");
  return (x.array() >= lower.array() - slack).all() &&
         (x.array() <= upper.array() + slack).all();
}

ConstrainedZonotope Box::to_czono() const {
  check();
  return ConstrainedZonotope::zonotope(center(), Mat(halfwidth().asDiagonal()));
}

void Box::check() const {
  require(lower.size() == upper.size() && lower.size() >= 1, "box: bad dimensions");
  require((lower.array() <= upper.array()).all(), "box: lower > upper");
  require(lower.allFinite() && upper.allFinite(), "box: non-finite bounds");
}

bool is_empty(const ConstrainedZonotope& s) {
  s.check();
  if (s.is_zonotope()) return false;
  auto [feasible, t] = min_factor_norm(s.constraint_matrix, s.constraint_offset);
  return !feasible || t > 1.0 + tol::feas;
}

bool contains(const ConstrainedZonotope& s, const Vec& x) {
  s.check();
  if (x.size() != s.dim()) throw DimensionError("contains: dimension mismatch");

  /* interval reject: x outside the constraint-free hull cannot be inside */
  const Vec reach = s.generators.cwiseAbs().rowwise().sum();
  const double slack = tol::feas * coord_scale(s);
  for (long i = 0; i < s.dim(); ++i) {
    if (std::fabs(x[i] - s.center[i]) > reach[i] + slack) return false;
  }

  const long n = s.dim(), ng = s.num_generators();
  if (s.is_zonotope() && ng == n) {
    Eigen::FullPivLU<Mat> lu(s.generators);
    if (lu.isInvertible()) {
      Vec xi = lu.solve(x - s.center);
      return xi.lpNorm<Eigen::Infinity>() <= 1.0 + tol::feas;
    }
  }

  Mat E(n + s.num_constraints(), ng);
  E.topRows(n) = s.generators;
  E.bottomRows(s.num_constraints()) = s.constraint_matrix;
  Vec f(n + s.num_constraints());
  f.head(n) = x - s.center;
  f.tail(s.num_constraints()) = s.constraint_offset;
  auto [feasible, t] = min_factor_norm(E, f);
  return feasible && t <= 1.0 + tol::feas;
}

ConstrainedZonotope expand(const ConstrainedZonotope& s, double eps) {
  s.check();
  require(eps >= 0.0, "expand: eps must be >= 0");
  if (eps == 0.0) return s;
  const long n = s.dim(), ng = s.num_generators(), nc = s.num_constraints();
  ConstrainedZonotope r;
  r.center = s.center;
  r.generators = Mat(n, ng + n);
  r.generators.leftCols(ng) = s.generators;
  r.generators.rightCols(n) = eps * Mat::Identity(n, n);
  r.constraint_matrix = Mat::Zero(nc, ng + n);
  r.constraint_matrix.leftCols(ng) = s.constraint_matrix;
  r.constraint_offset = s.constraint_offset;
  return r;
}

ConstrainedZonotope intersect(const ConstrainedZonotope& a, const ConstrainedZonotope& b) {
  a.check();
  b.check();
  if (a.dim() != b.dim()) throw DimensionError("intersect: dimension mismatch");
  const long n = a.dim();
  const long ga = a.num_generators(), gb = b.num_generators();
  const long ca = a.num_constraints(), cb = b.num_constraints();
  ConstrainedZonotope r;
  r.center = a.center;
  r.generators = Mat::Zero(n, ga + gb);
  r.generators.leftCols(ga) = a.generators;
  r.constraint_matrix = Mat::Zero(ca + cb + n, ga + gb);
  r.constraint_offset = Vec::Zero(ca + cb + n);
  r.constraint_matrix.block(0, 0, ca, ga) = a.constraint_matrix;
  r.constraint_offset.head(ca) = a.constraint_offset;
  r.constraint_matrix.block(ca, ga, cb, gb) = b.constraint_matrix;
  r.constraint_offset.segment(ca, cb) = b.constraint_offset;
  r.constraint_matrix.block(ca + cb, 0, n, ga) = a.generators;
  r.constraint_matrix.block(ca + cb, ga, n, gb) = -b.generators;
  r.constraint_offset.tail(n) = b.center - a.center;
  return r;
}

double support(const ConstrainedZonotope& s, const Vec& d) {
  return d.dot(support_point(s, d));
}

Vec support_point(const ConstrainedZonotope& s, const Vec& d) {
  s.check();
  if (d.size() != s.dim()) throw DimensionError("support: dimension mismatch");
  const long ng = s.num_generators();
  if (s.is_zonotope()) {
    Vec proj = s.generators.transpose() * d;
    Vec xi(ng);
    for (long i = 0; i < ng; ++i) xi[i] = proj[i] >= 0.0 ? 1.0 : -1.0;
    return s.center + s.generators * xi;
  }
  lp::Problem p;
  p.c = -(s.generators.transpose() * d);
  p.A_eq = s.constraint_matrix;
  p.b_eq = s.constraint_offset;
  p.A_ub = Mat::Zero(0, ng);
  p.b_ub = Vec::Zero(0);
  p.lo = Vec::Constant(ng, -1.0);
  p.hi = Vec::Constant(ng, 1.0);
  auto r = lp::solve(p);
  if (!r.ok()) throw std::runtime_error("support: empty set");
  return s.center + s.generators * r.x;
}

Box bounding_box(const ConstrainedZonotope& s) {
  const long n = s.dim();
  if (s.is_zonotope()) return loose_bounding_box(s);
  Box b;
  b.lower = Vec(n);
  b.upper = Vec(n);
  for (long i = 0; i < n; ++i) {
    Vec d = Vec::Zero(n);
    d[i] = 1.0;
    b.upper[i] = support(s, d);
    d[i] = -1.0;
    b.lower[i] = -support(s, d);
  }
  return b;
}

Box loose_bounding_box(const ConstrainedZonotope& s) {
  s.check();
  const Vec reach = s.generators.cwiseAbs().rowwise().sum();
  return Box{s.center - reach, s.center + reach};
}

double g_norm(const Mat& G, const Vec& v) {
  require(G.cols() >= 1, "g_norm: need at least one generator");
  if (v.size() != G.rows()) throw DimensionError("g_norm: dimension mismatch");
  double best = 0.0;
  for (long k = 0; k < G.cols(); ++k) {
    const double len = G.col(k).norm();
    require(len > 0.0, "g_norm: zero generator column");
    best = std::max(best, std::fabs(v.dot(G.col(k))) / len);
  }
  return best;
}

double g_norm_distance(const Mat& G, const ConstrainedZonotope& s, const Vec& x) {
  s.check();
  require(G.cols() >= 1, "g_norm_distance: need generators");
  if (x.size() != s.dim() || G.rows() != s.dim())
    throw DimensionError("g_norm_distance: dimension mismatch");
  /* vars: xi (factors of s), t; minimize t s.t. |(c + G_s xi - x) . ghat_k| <= t */
  const long ng = s.num_generators();
  const long L = G.cols();
  const long nv = ng + 1;
  lp::Problem p;
  p.c = Vec::Zero(nv);
  p.c[ng] = 1.0;
  p.A_eq = Mat::Zero(s.num_constraints(), nv);
  p.A_eq.leftCols(ng) = s.constraint_matrix;
  p.b_eq = s.constraint_offset;
  p.A_ub = Mat::Zero(2 * L, nv);
  p.b_ub = Vec::Zero(2 * L);
  for (long k = 0; k < L; ++k) {
    const double len = G.col(k).norm();
    require(len > 0.0, "g_norm_distance: zero generator column");
    const Vec ghat = G.col(k) / len;
    const Vec row = s.generators.transpose() * ghat;
    const double off = ghat.dot(x - s.center);
    p.A_ub.row(2 * k).head(ng) = row.transpose();
    p.A_ub(2 * k, ng) = -1.0;
    p.b_ub(2 * k) = off;
    p.A_ub.row(2 * k + 1).head(ng) = -row.transpose();
    p.A_ub(2 * k + 1, ng) = -1.0;
    p.b_ub(2 * k + 1) = -off;
  }
  p.lo = Vec::Constant(nv, -1.0);
  p.hi = Vec::Constant(nv, 1.0);
  const double tmax = 2.0 * (1.0 + (x - s.center).norm() + s.generators.cwiseAbs().sum());
  p.lo[ng] = 0.0;
  p.hi[ng] = tmax;
  auto r = lp::solve(p);
  if (!r.ok()) throw std::runtime_error("g_norm_distance: empty set");
  return r.objective;
}

namespace {

/* zonotope boundary walk; generators grouped by direction */
VertexList zonotope_vertices_2d(const ConstrainedZonotope& s) {
  const double scale = coord_scale(s);
  std::vector<Eigen::Vector2d> gens;
  for (long k = 0; k < s.num_generators(); ++k) {
    Eigen::Vector2d g = s.generators.col(k);
    if (g.norm() <= tol::geo * scale) continue;
    if (g.y() < 0 || (g.y() == 0 && g.x() < 0)) g = -g;
    bool merged = false;
    for (auto& h : gens) {
      const double cross = h.x() * g.y() - h.y() * g.x();
      if (std::fabs(cross) <= tol::geo * scale * scale && h.dot(g) > 0) {
        h += g;
        merged = true;
        break;
      }
    }
    if (!merged) gens.push_back(g);
  }
  const Eigen::Vector2d c = s.center;
  if (gens.empty()) return {c};
  std::sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) {
    return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
  });
  Eigen::Vector2d v = c;
  for (const auto& g : gens) v -= g;
  VertexList out;
  out.push_back(v);
  for (const auto& g : gens) {
    v += 2.0 * g;
    out.push_back(v);
  }
  /* mirror the walked half through the center */
  const size_t half = out.size();
  for (size_t i = 1; i + 1 < half; ++i) out.push_back(2.0 * c - out[i]);
  if (gens.size() == 1) out.resize(2); /* segment */
  return out;
}

void refine_hull(const ConstrainedZonotope& s, const Eigen::Vector2d& da,
                 const Eigen::Vector2d& pa, const Eigen::Vector2d& db,
                 const Eigen::Vector2d& pb, double scale, int depth, VertexList& acc) {
  if (depth > 40) return;
  Eigen::Vector2d d = da + db;
  if (d.norm() < 1e-12) return;
  d.normalize();
  Vec pv = support_point(s, Vec(d));
  const Eigen::Vector2d p(pv[0], pv[1]);
  const double vtol = 10 * tol::geo * scale;
  /* coinciding with an endpoint: that endpoint stays optimal over this whole
   * half-cone, so only the other half can hide vertices */
  if ((p - pa).norm() <= vtol) {
    refine_hull(s, d, pa, db, pb, scale, depth + 1, acc);
    return;
  }
  if ((p - pb).norm() <= vtol) {
    refine_hull(s, da, pa, d, pb, scale, depth + 1, acc);
    return;
  }
  const Eigen::Vector2d e = pb - pa;
  const double cross = e.x() * (p.y() - pa.y()) - e.y() * (p.x() - pa.x());
  const double along = (p - pa).dot(e);
  if (std::fabs(cross) <= tol::geo * scale * scale && along >= -tol::geo * scale &&
      along <= e.squaredNorm() + tol::geo * scale) {
    return; /* flat: [pa, pb] is an edge */
  }
  acc.push_back(p);
  refine_hull(s, da, pa, d, p, scale, depth + 1, acc);
  refine_hull(s, d, p, db, pb, scale, depth + 1, acc);
}

}  // namespace

VertexList vertices_2d(const ConstrainedZonotope& s) {
  s.check();
  require(s.dim() == 2, "vertices_2d: planar sets only");
  if (is_empty(s)) throw std::runtime_error("vertices_2d: empty set");
  if (s.is_zonotope()) return zonotope_vertices_2d(s);

  const double scale = coord_scale(s);
  std::vector<Eigen::Vector2d> dirs = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  VertexList pts;
  for (const auto& d : dirs) {
    Vec p = support_point(s, Vec(d));
    pts.emplace_back(p[0], p[1]);
  }
  for (int i = 0; i < 4; ++i) {
    refine_hull(s, dirs[i], pts[i], dirs[(i + 1) % 4], pts[(i + 1) % 4], scale, 0, pts);
  }
  /* dedup */
  VertexList uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : uniq)
      if ((p - q).norm() <= 10 * tol::geo * scale) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() == 1) return uniq;
  if (uniq.size() == 2) return uniq;
  Eigen::Vector2d ctr = Eigen::Vector2d::Zero();
  for (const auto& p : uniq) ctr += p;
  ctr /= static_cast<double>(uniq.size());
  std::sort(uniq.begin(), uniq.end(), [&](const auto& a, const auto& b) {
    return std::atan2(a.y() - ctr.y(), a.x() - ctr.x()) <
           std::atan2(b.y() - ctr.y(), b.x() - ctr.x());
  });
  /* drop collinear mid-edge points */
  VertexList out;
  const size_t n = uniq.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& prev = uniq[(i + n - 1) % n];
    const auto& cur = uniq[i];
    const auto& next = uniq[(i + 1) % n];
    const Eigen::Vector2d a = cur - prev, b = next - prev;
    const double cross = b.x() * a.y() - b.y() * a.x();
    if (std::fabs(cross) > tol::geo * scale * scale) out.push_back(cur);
  }
  if (out.size() < 3) return uniq; /* degenerate: collinear set */
  return out;
}

ConstrainedZonotope polytope_to_cz(const VertexList& v) {
  require(!v.empty(), "polytope_to_cz: need at least one vertex");
  const long k = static_cast<long>(v.size());
  if (k == 1) return ConstrainedZonotope::point(Vec(v[0]));
  if (k == 2) {
    /* segment: one generator along the chord */
    ConstrainedZonotope s;
    s.center = 0.5 * (v[0] + v[1]);
    s.generators = Mat(2, 1);
    s.generators.col(0) = 0.5 * (v[1] - v[0]);
    s.constraint_matrix = Mat::Zero(0, 1);
    s.constraint_offset = Vec::Zero(0);
    return s;
  }

  /* bounding-box zonotope cut by one slack equality per non-redundant edge;
   * the nonzero generator columns stay axis-aligned and well conditioned */
  Eigen::Vector2d lo = v[0], hi = v[0];
  for (const auto& p : v) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector2d c0 = 0.5 * (lo + hi);
  Eigen::Vector2d w = 0.5 * (hi - lo);
  const double wmin = 1e-12 * (1.0 + w.maxCoeff());
  w = w.cwiseMax(wmin);

  struct Row {
    Eigen::Vector2d a;
    double slack;
    double rhs;
  };
  std::vector<Row> rows;
  const double scale = 1.0 + w.maxCoeff();
  for (long i = 0; i < k; ++i) {
    const Eigen::Vector2d& p = v[static_cast<size_t>(i)];
    const Eigen::Vector2d& q = v[static_cast<size_t>((i + 1) % k)];
    Eigen::Vector2d n(q.y() - p.y(), -(q.x() - p.x())); /* outward for CCW */
    const double nlen = n.norm();
    if (nlen < 1e-14 * scale) continue;
    n /= nlen;
    const double delta = n.dot(p - c0);
    const Eigen::Vector2d a(n.x() * w.x(), n.y() * w.y());
    const double r = a.cwiseAbs().sum();
    const double span = delta + r;
    if (span >= 2.0 * r - tol::geo * scale) continue; /* edge never cuts the box */
    require(span >= -tol::geo * scale, "polytope_to_cz: inconsistent edge");
    rows.push_back({a, 0.5 * std::max(span, 0.0), delta - 0.5 * std::max(span, 0.0)});
  }

  const long m = static_cast<long>(rows.size());
  ConstrainedZonotope s;
  s.center = c0;
  s.generators = Mat::Zero(2, 2 + m);
  s.generators(0, 0) = w.x();
  s.generators(1, 1) = w.y();
  s.constraint_matrix = Mat::Zero(m, 2 + m);
  s.constraint_offset = Vec::Zero(m);
  for (long i = 0; i < m; ++i) {
    s.constraint_matrix(i, 0) = rows[static_cast<size_t>(i)].a.x();
    s.constraint_matrix(i, 1) = rows[static_cast<size_t>(i)].a.y();
    s.constraint_matrix(i, 2 + i) = rows[static_cast<size_t>(i)].slack;
    s.constraint_offset[i] = rows[static_cast<size_t>(i)].rhs;
  }
  return s;
}

std::vector<Vec> rasterize(const ConstrainedZonotope& s, double resolution) {
  s.check();
  require(resolution > 0.0, "rasterize: resolution must be > 0");
  if (!s.is_zonotope() && is_empty(s)) return {};
  const Box bb = bounding_box(s);
  const long n = s.dim();
  std::vector<long> klo(n), khi(n);
  long total = 1;
  for (long i = 0; i < n; ++i) {
    klo[i] = static_cast<long>(std::ceil((bb.lower[i] - tol::geo) / resolution));
    khi[i] = static_cast<long>(std::floor((bb.upper[i] + tol::geo) / resolution));
    if (khi[i] < klo[i]) return {};
    total *= (khi[i] - klo[i] + 1);
  }
  std::vector<Vec> out;
  std::vector<long> idx(klo);
  for (long cnt = 0; cnt < total; ++cnt) {
    Vec x(n);
    for (long i = 0; i < n; ++i) x[i] = resolution * static_cast<double>(idx[i]);
    if (contains(s, x)) out.push_back(x);
    for (long i = 0; i < n; ++i) {
      if (++idx[i] <= khi[i]) break;
      idx[i] = klo[i];
    }
  }
  return out;
}

}  // namespace zonoctrl
