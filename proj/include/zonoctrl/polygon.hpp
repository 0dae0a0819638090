#ifndef ZONOCTRL_POLYGON_HPP_
#define ZONOCTRL_POLYGON_HPP_

#include <optional>
#include <vector>

#include "zonoctrl/common.hpp"

namespace zonoctrl::poly {

using Pt = Eigen::Vector2d;
/* convex, counterclockwise, no repeated vertices */
using Polygon = std::vector<Pt>;

double area(const Polygon& p);
Pt centroid(const Polygon& p);
bool point_in(const Polygon& p, const Pt& x, double slack = 0.0);

/* keep {x : n.x <= off} */
Polygon clip_halfplane(const Polygon& p, const Pt& n, double off);

Polygon convex_hull(std::vector<Pt> pts);

/* r \ clip as pairwise interior-disjoint convex pieces (halfplane fan) */
std::vector<Polygon> subtract(const Polygon& r, const Polygon& clip);

/* union of two edge-adjacent pieces when that union is convex */
std::optional<Polygon> merge_if_convex(const Polygon& a, const Polygon& b);

/* drop duplicate and collinear vertices; empty result means degenerate */
Polygon simplify(const Polygon& p, double eps);

/* area-uniform sample from three unit uniforms (triangle-fan selection) */
Pt sample_point(const Polygon& p, double r1, double r2, double r3);

}  // namespace zonoctrl::poly

#endif
