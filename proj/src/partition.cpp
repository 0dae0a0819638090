#include "zonoctrl/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace zonoctrl {

bool Cell::body_contains(const Vec& x) const {
  if (body_polygon.size() >= 3 && x.size() == 2) {
    return poly::point_in(body_polygon, poly::Pt(x[0], x[1]), 1e-9);
  }
  return contains(body, x);
}

void Cell::finalize() {
  body_polygon.clear();
  if (body.dim() == 2) {
    auto vs = vertices_2d(body);
    body_polygon.assign(vs.begin(), vs.end());
  }
}

std::vector<Vec> generate_centers(const Box& X, int N, uint64_t seed) {
  X.check();
  const long n = X.dim();
  if (N <= n) throw ConfigError("generate_centers: need N > state dimension");
  std::mt19937_64 eng(seed);
  auto unit = [&eng]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  const double scale = (X.upper - X.lower).norm();
  std::vector<Vec> centers;
  centers.reserve(static_cast<size_t>(N));
  int guard = 0;
  while (static_cast<int>(centers.size()) < N) {
    if (++guard > 1000 * N) throw std::runtime_error("generate_centers: cannot place points");
    Vec c(n);
    for (long i = 0; i < n; ++i) {
      double u = unit();
      while (u <= 0.0) u = unit();
      c[i] = X.lower[i] + (X.upper[i] - X.lower[i]) * u;
    }
    bool distinct = true;
    for (const auto& p : centers)
      if ((p - c).norm() < 1e-9 * scale) {
        distinct = false;
        break;
      }
    if (distinct) centers.push_back(c);
  }
  return centers;
}

std::vector<Mat> connect_centers(const std::vector<Vec>& centers, int neighbor_count) {
  require(!centers.empty(), "connect_centers: no centers");
  const long n = centers.front().size();
  const int N = static_cast<int>(centers.size());
  require(neighbor_count >= n, "connect_centers: need neighbor_count >= n");
  require(neighbor_count <= N - 1, "connect_centers: not enough candidate neighbors");

  std::vector<Mat> out;
  out.reserve(centers.size());
  for (int i = 0; i < N; ++i) {
    std::vector<int> order;
    for (int k = 0; k < N; ++k)
      if (k != i) order.push_back(k);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = (centers[static_cast<size_t>(a)] - centers[static_cast<size_t>(i)]).norm();
      const double db = (centers[static_cast<size_t>(b)] - centers[static_cast<size_t>(i)]).norm();
      if (da != db) return da < db;
      return a < b;
    });

    /* nearest neighbors first; keep swapping further candidates in until the
     * difference matrix reaches full rank */
    std::vector<int> chosen;
    Mat G(n, 0);
    auto rank_of = [&](const Mat& M) {
      if (M.cols() == 0) return 0L;
      Eigen::ColPivHouseholderQR<Mat> qr(M);
      qr.setThreshold(1e-9);
      return static_cast<long>(qr.rank());
    };
    for (int k : order) {
      if (static_cast<long>(chosen.size()) >= neighbor_count && rank_of(G) >= n) break;
      Vec d = centers[static_cast<size_t>(k)] - centers[static_cast<size_t>(i)];
      Mat Gtry(n, G.cols() + 1);
      Gtry.leftCols(G.cols()) = G;
      Gtry.col(G.cols()) = d;
      const bool need_rank = rank_of(G) < n;
      if (need_rank && rank_of(Gtry) == rank_of(G)) continue; /* no rank gain, skip */
      if (!need_rank && static_cast<long>(chosen.size()) >= neighbor_count) break;
      G = Gtry;
      chosen.push_back(k);
    }
    /* fill up to neighbor_count with the nearest unused, preferring
     * directions at a healthy angle to the columns already chosen */
    auto min_angle_cos = [&](const Vec& d) {
      double worst = 0.0;
      for (long c2 = 0; c2 < G.cols(); ++c2) {
        const double cosang =
            std::fabs(d.normalized().dot(G.col(c2).normalized()));
        worst = std::max(worst, cosang);
      }
      return worst;
    };
    for (int pass = 0; pass < 2; ++pass) {
      for (int k : order) {
        if (static_cast<long>(chosen.size()) >= neighbor_count) break;
        if (std::find(chosen.begin(), chosen.end(), k) != chosen.end()) continue;
        Vec d = centers[static_cast<size_t>(k)] - centers[static_cast<size_t>(i)];
        if (pass == 0 && min_angle_cos(d) > std::cos(25.0 * M_PI / 180.0)) continue;
        Mat Gtry(n, G.cols() + 1);
        Gtry.leftCols(G.cols()) = G;
        Gtry.col(G.cols()) = d;
        G = Gtry;
        chosen.push_back(k);
      }
    }
    if (rank_of(G) < n)
      throw std::runtime_error("connect_centers: degenerate configuration, no full-rank matrix");
    out.push_back(G);
  }
  return out;
}

std::vector<ConstrainedZonotope> build_zonotopes(const std::vector<Vec>& centers,
                                                 const std::vector<Mat>& generator_matrices) {
  require(centers.size() == generator_matrices.size(), "build_zonotopes: length mismatch");
  std::vector<ConstrainedZonotope> out;
  out.reserve(centers.size());
  for (size_t i = 0; i < centers.size(); ++i) {
    out.push_back(
        ConstrainedZonotope::zonotope(centers[i], 0.5 * generator_matrices[i]));
  }
  return out;
}

std::vector<ConstrainedZonotope> cover_residual(const Box& X,
                                                const std::vector<ConstrainedZonotope>& zonotopes) {
  X.check();
  require(X.dim() == 2, "cover_residual: planar state spaces only");
  const double area_tol = 1e-9 * (X.upper - X.lower).prod();

  poly::Polygon domain = {{X.lower[0], X.lower[1]},
                          {X.upper[0], X.lower[1]},
                          {X.upper[0], X.upper[1]},
                          {X.lower[0], X.upper[1]}};
  std::vector<poly::Polygon> pieces = {domain};
  for (const auto& z : zonotopes) {
    auto vs = vertices_2d(z);
    poly::Polygon zp(vs.begin(), vs.end());
    if (zp.size() < 3) continue;
    std::vector<poly::Polygon> next;
    for (const auto& piece : pieces) {
      auto parts = poly::subtract(piece, zp);
      for (auto& p : parts)
        if (std::fabs(poly::area(p)) > area_tol) next.push_back(std::move(p));
    }
    pieces = std::move(next);
  }

  /* greedy convex merging of edge-adjacent pieces */
  bool merged_any = true;
  while (merged_any) {
    merged_any = false;
    for (size_t i = 0; i < pieces.size() && !merged_any; ++i) {
      for (size_t j = i + 1; j < pieces.size(); ++j) {
        auto m = poly::merge_if_convex(pieces[i], pieces[j]);
        if (m) {
          pieces[i] = std::move(*m);
          pieces.erase(pieces.begin() + static_cast<long>(j));
          merged_any = true;
          break;
        }
      }
    }
  }

  std::sort(pieces.begin(), pieces.end(), [](const poly::Polygon& a, const poly::Polygon& b) {
    const auto ca = poly::centroid(a), cb = poly::centroid(b);
    if (ca.x() != cb.x()) return ca.x() < cb.x();
    return ca.y() < cb.y();
  });

  std::vector<ConstrainedZonotope> out;
  for (const auto& p : pieces) {
    VertexList vs(p.begin(), p.end());
    out.push_back(polytope_to_cz(vs));
  }
  return out;
}

namespace {

Mat nonzero_columns(const Mat& G) {
  std::vector<long> keep;
  for (long j = 0; j < G.cols(); ++j)
    if (G.col(j).norm() > 1e-12) keep.push_back(j);
  Mat out(G.rows(), static_cast<long>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j) out.col(static_cast<long>(j)) = G.col(keep[j]);
  return out;
}

ConstrainedZonotope expanded_and_clipped(const ConstrainedZonotope& base, double eps,
                                         const Box& X) {
  ConstrainedZonotope body = expand(base, eps);
  Box limit{X.lower.array() - eps, X.upper.array() + eps};
  const Box bb = loose_bounding_box(body);
  const bool inside = (bb.lower.array() >= limit.lower.array() - 1e-12).all() &&
                      (bb.upper.array() <= limit.upper.array() + 1e-12).all();
  if (!inside) body = intersect(body, limit.to_czono());
  return body;
}

}  // namespace

std::vector<Cell> make_partition(const Box& X, const PartitionConfig& cfg) {
  X.check();
  const long n = X.dim();
  require(cfg.count > n, "partition: need N > n");
  require(cfg.epsilon >= 0.0, "partition: epsilon must be >= 0");
  const int k = cfg.neighbor_count > 0 ? cfg.neighbor_count : static_cast<int>(n) + 1;

  auto centers = generate_centers(X, cfg.count, cfg.seed);
  auto gens = connect_centers(centers, k);
  auto zonos = build_zonotopes(centers, gens);
  auto residual = cover_residual(X, zonos);

  std::vector<Cell> cells;
  cells.reserve(zonos.size() + residual.size());
  int symbol = 1;
  for (const auto& z : zonos) {
    Cell c;
    c.symbol_index = symbol++;
    c.kind = CellKind::Zonotope;
    c.base = z;
    c.body = expanded_and_clipped(z, cfg.epsilon, X);
    c.gnorm_generators = z.generators;
    c.finalize();
    cells.push_back(std::move(c));
  }
  for (const auto& z : residual) {
    Cell c;
    c.symbol_index = symbol++;
    c.kind = CellKind::Constrained;
    c.base = z;
    c.body = expanded_and_clipped(z, cfg.epsilon, X);
    c.gnorm_generators = nonzero_columns(z.generators);
    require(c.gnorm_generators.cols() >= 1, "partition: degenerate residual piece");
    c.finalize();
    cells.push_back(std::move(c));
  }
  return cells;
}

}  // namespace zonoctrl
