#ifndef ZONOCTRL_CZONO_HPP_
#define ZONOCTRL_CZONO_HPP_

#include <vector>

#include "zonoctrl/common.hpp"

namespace zonoctrl {

/* Z = {c + G xi : ||xi||_inf <= 1, A xi = b}.
 * n_c = 0 encodes a plain zonotope; every predicate treats that case
 * identically to a dedicated zonotope representation. */
struct ConstrainedZonotope {
  Vec center;            /* n */
  Mat generators;        /* n x n_g */
  Mat constraint_matrix; /* n_c x n_g */
  Vec constraint_offset; /* n_c */

  long dim() const { return center.size(); }
  long num_generators() const { return generators.cols(); }
  long num_constraints() const { return constraint_matrix.rows(); }
  bool is_zonotope() const { return num_constraints() == 0; }

  void check() const;

  static ConstrainedZonotope zonotope(Vec c, Mat G);
  static ConstrainedZonotope point(Vec p);
};

struct Box {
  Vec lower;
  Vec upper;

  long dim() const { return lower.size(); }
  Vec center() const { return 0.5 * (lower + upper); }
  Vec halfwidth() const { return 0.5 * (upper - lower); }
  bool contains(const Vec& x, double slack = 0.0) const;
  ConstrainedZonotope to_czono() const;
  void check() const;
};

/* counterclockwise for planar sets */
using VertexList = std::vector<Eigen::Vector2d>;

bool is_empty(const ConstrainedZonotope& s);
bool contains(const ConstrainedZonotope& s, const Vec& x);
ConstrainedZonotope expand(const ConstrainedZonotope& s, double eps);
ConstrainedZonotope intersect(const ConstrainedZonotope& a, const ConstrainedZonotope& b);
VertexList vertices_2d(const ConstrainedZonotope& s);
ConstrainedZonotope polytope_to_cz(const VertexList& v);

/* max_k |v . g_k| / |g_k| over the columns of G (absolute scalar projection) */
double g_norm(const Mat& G, const Vec& v);

std::vector<Vec> rasterize(const ConstrainedZonotope& s, double resolution);

/* support function max d'x over s and one maximizing point; s must be nonempty */
double support(const ConstrainedZonotope& s, const Vec& d);
Vec support_point(const ConstrainedZonotope& s, const Vec& d);

/* tight axis-aligned bounds via support calls; s must be nonempty */
Box bounding_box(const ConstrainedZonotope& s);

/* interval-arithmetic outer bound that ignores the constraints */
Box loose_bounding_box(const ConstrainedZonotope& s);

/* G-norm distance from x to s: min over y in s of g_norm(G, y - x).
 * s must be nonempty. */
double g_norm_distance(const Mat& G, const ConstrainedZonotope& s, const Vec& x);

}  // namespace zonoctrl

#endif
