#include "zonoctrl/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace zonoctrl::poly {

namespace {
double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}
}  // namespace

double area(const Polygon& p) {
  double s = 0.0;
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const Pt& a = p[i];
    const Pt& b = p[(i + 1) % n];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

Pt centroid(const Polygon& p) {
  require(!p.empty(), "centroid: empty polygon");
  if (p.size() == 1) return p[0];
  if (p.size() == 2) return 0.5 * (p[0] + p[1]);
  const double a = area(p);
  if (std::fabs(a) < 1e-14) {
    Pt m = Pt::Zero();
    for (const auto& q : p) m += q;
    return m / static_cast<double>(p.size());
  }
  Pt c = Pt::Zero();
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const Pt& u = p[i];
    const Pt& v = p[(i + 1) % n];
    const double w = u.x() * v.y() - v.x() * u.y();
    c += w * (u + v);
  }
  return c / (6.0 * a);
}

bool point_in(const Polygon& p, const Pt& x, double slack) {
  if (p.empty()) return false;
  if (p.size() == 1) return (x - p[0]).lpNorm<Eigen::Infinity>() <= slack;
  if (p.size() == 2) {
    const Pt d = p[1] - p[0];
    const double len2 = d.squaredNorm();
    if (len2 < 1e-28) return (x - p[0]).lpNorm<Eigen::Infinity>() <= slack;
    const double t = std::clamp((x - p[0]).dot(d) / len2, 0.0, 1.0);
    return (x - (p[0] + t * d)).norm() <= slack;
  }
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const Pt& a = p[i];
    const Pt& b = p[(i + 1) % n];
    const Pt e = b - a;
    const double elen = e.norm();
    if (elen < 1e-14) continue;
    if (cross(a, b, x) < -slack * elen) return false;
  }
  return true;
}

Polygon clip_halfplane(const Polygon& p, const Pt& nrm, double off) {
  Polygon out;
  const size_t n = p.size();
  if (n == 0) return out;
  for (size_t i = 0; i < n; ++i) {
    const Pt& a = p[i];
    const Pt& b = p[(i + 1) % n];
    const double da = nrm.dot(a) - off;
    const double db = nrm.dot(b) - off;
    if (da <= 0) out.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

Polygon convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Pt& a, const Pt& b) { return (a - b).norm() < 1e-12; }),
            pts.end());
  const size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Pt> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

std::vector<Polygon> subtract(const Polygon& r, const Polygon& clip) {
  std::vector<Polygon> out;
  if (r.size() < 3) return out;
  if (clip.size() < 3) {
    out.push_back(r);
    return out;
  }
  /* r \ clip = disjoint union over edges k of
   *   r (inside halfplanes 1..k-1) (outside halfplane k) */
  Polygon remainder = r;
  const size_t m = clip.size();
  for (size_t k = 0; k < m && remainder.size() >= 3; ++k) {
    const Pt& a = clip[k];
    const Pt& b = clip[(k + 1) % m];
    /* inward normal for CCW clip polygon is left of the edge */
    Pt nrm(b.y() - a.y(), -(b.x() - a.x())); /* outward */
    const double off = nrm.dot(a);
    Polygon piece = clip_halfplane(remainder, -nrm, -off); /* outside: nrm.x >= off */
    piece = simplify(piece, 1e-9);
    if (piece.size() >= 3 && std::fabs(area(piece)) > 1e-12) out.push_back(piece);
    remainder = clip_halfplane(remainder, nrm, off); /* inside, continue */
    remainder = simplify(remainder, 1e-9);
  }
  return out;
}

std::optional<Polygon> merge_if_convex(const Polygon& a, const Polygon& b) {
  if (a.size() < 3 || b.size() < 3) return std::nullopt;
  /* require a shared edge (two shared vertices) */
  int shared = 0;
  for (const auto& p : a)
    for (const auto& q : b)
      if ((p - q).norm() < 1e-9) {
        ++shared;
        break;
      }
  if (shared < 2) return std::nullopt;
  std::vector<Pt> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  Polygon hull = convex_hull(all);
  const double merged = std::fabs(area(hull));
  const double parts = std::fabs(area(a)) + std::fabs(area(b));
  const double scale = std::max(1.0, parts);
  if (std::fabs(merged - parts) <= 1e-9 * scale) return hull;
  return std::nullopt;
}

Pt sample_point(const Polygon& p, double r1, double r2, double r3) {
  require(!p.empty(), "sample_point: empty polygon");
  if (p.size() == 1) return p[0];
  if (p.size() == 2) return p[0] + r1 * (p[1] - p[0]);
  std::vector<double> cum;
  double total = 0.0;
  for (size_t i = 1; i + 1 < p.size(); ++i) {
    total += 0.5 * std::fabs(cross(p[0], p[i], p[i + 1]));
    cum.push_back(total);
  }
  if (total <= 0.0) return p[0];
  const double pick = r1 * total;
  size_t t = 0;
  while (t + 1 < cum.size() && cum[t] < pick) ++t;
  const Pt &a = p[0], &b = p[t + 1], &c = p[t + 2];
  double u = r2, v = r3;
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return a + u * (b - a) + v * (c - a);
}

Polygon simplify(const Polygon& p, double eps) {
  Polygon dedup;
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    if (dedup.empty() || (p[i] - dedup.back()).norm() > eps) dedup.push_back(p[i]);
  }
  while (dedup.size() > 1 && (dedup.front() - dedup.back()).norm() <= eps) dedup.pop_back();
  if (dedup.size() < 3) return dedup;
  Polygon out;
  const size_t m = dedup.size();
  for (size_t i = 0; i < m; ++i) {
    const Pt& prev = dedup[(i + m - 1) % m];
    const Pt& cur = dedup[i];
    const Pt& next = dedup[(i + 1) % m];
    const double c = cross(prev, cur, next);
    const double scale = (cur - prev).norm() * (next - cur).norm();
    if (std::fabs(c) > eps * std::max(1.0, scale)) out.push_back(cur);
  }
  return out.size() >= 3 ? out : dedup;
}

}  // namespace zonoctrl::poly
