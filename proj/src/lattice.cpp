#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>
#include <unordered_set>

#include "zonoctrl/abstraction.hpp"

namespace zonoctrl {

namespace {

constexpr double kCoverSlack = 1e-9;

Mat normalized_columns(const Mat& G) {
  Mat out(G.rows(), G.cols());
  for (long k = 0; k < G.cols(); ++k) {
    const double len = G.col(k).norm();
    require(len > 0.0, "lattice: zero generator column");
    out.col(k) = G.col(k) / len;
  }
  return out;
}

double gnorm_fast(const Mat& ghat, const Vec& v) {
  return (ghat.transpose() * v).cwiseAbs().maxCoeff();
}

long long bucket_key(long ix, long iy) {
  return (static_cast<long long>(ix) << 32) ^ (static_cast<long long>(iy) & 0xffffffffLL);
}

}  // namespace

std::vector<BasicGenerator> basic_generator(const Mat& G, double spacing, double eps) {
  require(spacing > 0.0, "basic_generator: spacing must be > 0");
  require(spacing <= eps + 1e-12, "basic_generator: spacing exceeds the precision bound");
  require(G.cols() >= 1, "basic_generator: need at least one column");
  std::vector<BasicGenerator> out;
  for (long k = 0; k < G.cols(); ++k) {
    const double len = G.col(k).norm();
    require(len > 0.0, "basic_generator: zero column");
    const int N = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-12)));
    out.push_back({Vec(G.col(k) / N), N});
  }
  return out;
}

void StateLattice::build_index() {
  buckets_.clear();
  bucket_ = std::max(step_max, 1e-9);
  ghat_ = normalized_columns(gnorm);
  Eigen::JacobiSVD<Mat> svd(Mat(ghat_.transpose()));
  const double smin = svd.singularValues().minCoeff();
  const double L = static_cast<double>(gnorm.cols());
  euclid_factor_ = smin > 1e-12 ? std::sqrt(L) / smin : 1e12;
  for (size_t i = 0; i < points.size(); ++i) {
    const long ix = static_cast<long>(std::floor(points[i][0] / bucket_));
    const long iy = static_cast<long>(std::floor(points[i][1] / bucket_));
    buckets_[bucket_key(ix, iy)].push_back(static_cast<int>(i));
  }
}

std::vector<int> StateLattice::radius_query(const Vec& x, double radius) const {
  std::vector<int> out;
  const Mat& ghat = ghat_.size() ? ghat_ : gnorm;
  const double cutoff = radius + kCoverSlack;
  const double window = cutoff * euclid_factor_;
  if (buckets_.empty() || window > 1e6 * bucket_) {
    const Mat gh = normalized_columns(gnorm);
    for (size_t i = 0; i < points.size(); ++i)
      if (gnorm_fast(gh, points[i] - x) <= cutoff) out.push_back(static_cast<int>(i));
    return out;
  }
  const long ix0 = static_cast<long>(std::floor((x[0] - window) / bucket_));
  const long ix1 = static_cast<long>(std::floor((x[0] + window) / bucket_));
  const long iy0 = static_cast<long>(std::floor((x[1] - window) / bucket_));
  const long iy1 = static_cast<long>(std::floor((x[1] + window) / bucket_));
  for (long ix = ix0; ix <= ix1; ++ix) {
    for (long iy = iy0; iy <= iy1; ++iy) {
      auto it = buckets_.find(bucket_key(ix, iy));
      if (it == buckets_.end()) continue;
      for (int i : it->second)
        if (gnorm_fast(ghat, points[static_cast<size_t>(i)] - x) <= cutoff) out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

/* greedy covering-net completion state shared by the construction passes */
struct Builder {
  const Cell* cell;
  Mat ghat;
  Mat frame;      /* columns f0, f1 */
  Vec anchor;
  double rho;
  std::vector<Vec> points;
  std::vector<Eigen::VectorXi> coords;
  std::unordered_map<long long, std::vector<int>> index;
  double bucket;

  void insert(const Vec& p, int ci, int cj) {
    const long ix = static_cast<long>(std::floor(p[0] / bucket));
    const long iy = static_cast<long>(std::floor(p[1] / bucket));
    index[bucket_key(ix, iy)].push_back(static_cast<int>(points.size()));
    points.push_back(p);
    Eigen::VectorXi c(2);
    c << ci, cj;
    coords.push_back(c);
  }

  double min_dist(const Vec& x, double window) const {
    double best = std::numeric_limits<double>::infinity();
    const long ix0 = static_cast<long>(std::floor((x[0] - window) / bucket));
    const long ix1 = static_cast<long>(std::floor((x[0] + window) / bucket));
    const long iy0 = static_cast<long>(std::floor((x[1] - window) / bucket));
    const long iy1 = static_cast<long>(std::floor((x[1] + window) / bucket));
    for (long ix = ix0; ix <= ix1; ++ix)
      for (long iy = iy0; iy <= iy1; ++iy) {
        auto it = index.find(bucket_key(ix, iy));
        if (it == index.end()) continue;
        for (int i : it->second)
          best = std::min(best, gnorm_fast(ghat, points[static_cast<size_t>(i)] - x));
      }
    return best;
  }

  /* window large enough that any point within rho of x is found */
  double safe_window(double euclid_factor) const { return rho * euclid_factor * 1.5 + bucket; }
};

}  // namespace

StateLattice approx_state_set(const Cell& cell, const std::vector<BasicGenerator>& basics) {
  require(cell.body.dim() == 2, "approx_state_set: planar cells only");
  require(!basics.empty(), "approx_state_set: need basic generators");
  require(cell.body_polygon.size() >= 3, "approx_state_set: degenerate cell body");

  /* frame: the longest original column sets the budget step; the second
   * direction is the orthogonalized next independent column, refined until
   * the rounding bound over the fundamental cell meets rho */
  std::vector<long> order(basics.size());
  for (size_t i = 0; i < basics.size(); ++i) order[i] = static_cast<long>(i);
  auto olen = [&](long i) {
    return basics[static_cast<size_t>(i)].step.norm() * basics[static_cast<size_t>(i)].subdivisions;
  };
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    const double la = olen(a), lb = olen(b);
    if (la != lb) return la > lb;
    return a < b;
  });

  const long a = order[0];
  const Vec Oa = basics[static_cast<size_t>(a)].step * basics[static_cast<size_t>(a)].subdivisions;
  const Vec f0 = basics[static_cast<size_t>(a)].step;
  const double h1 = f0.norm();
  double s_budget = 0.0;
  for (const auto& b : basics) s_budget = std::max(s_budget, b.step.norm());

  Vec raw = Vec::Zero(2);
  bool found = false;
  const Vec d1 = Oa / Oa.norm();
  for (size_t oi = 1; oi < order.size() && !found; ++oi) {
    const Vec Ob = basics[static_cast<size_t>(order[oi])].step *
                   basics[static_cast<size_t>(order[oi])].subdivisions;
    Vec r = Ob - Ob.dot(d1) * d1;
    if (r.norm() > 1e-9 * Ob.norm()) {
      raw = r;
      found = true;
    }
  }
  if (!found) {
    /* all generators collinear: span the cell transversally instead */
    raw = Vec(2);
    raw << -d1[1], d1[0];
    const Box bb = loose_bounding_box(cell.body);
    raw *= 0.5 * (bb.upper - bb.lower).norm();
  }

  const Mat ghat = normalized_columns(cell.gnorm_generators);
  const double rho = 0.5 * h1;
  int N2 = std::max(1, static_cast<int>(std::ceil(raw.norm() / std::min(s_budget, h1) - 1e-12)));
  Vec f1 = raw / N2;

  /* rounding bound over the fundamental cell: coarse grid plus recursive
   * zoom on the worst spots, so between-sample bumps are caught while exact
   * equality geometries (deep holes at rho on grid nodes) still pass */
  auto fundamental_worst = [&](const Vec& e0, const Vec& e1) {
    const Vec corners[4] = {Vec::Zero(2), e0, e1, e0 + e1};
    auto dist = [&](double s, double t) {
      const Vec x = s * e0 + t * e1;
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : corners) d = std::min(d, gnorm_fast(ghat, x - c));
      return d;
    };
    struct Spot {
      double d, s, t;
    };
    std::vector<Spot> spots;
    double worst = 0.0;
    const int n0 = 64;
    for (int i = 0; i <= n0; ++i) {
      for (int j = 0; j <= n0; ++j) {
        const double s = i / static_cast<double>(n0), t = j / static_cast<double>(n0);
        const double d = dist(s, t);
        worst = std::max(worst, d);
        spots.push_back({d, s, t});
      }
    }
    std::sort(spots.begin(), spots.end(),
              [](const Spot& a, const Spot& b) { return a.d > b.d; });
    spots.resize(std::min<size_t>(spots.size(), 48));
    double half = 1.0 / n0;
    for (int level = 0; level < 3; ++level) {
      std::vector<Spot> next;
      for (const auto& sp : spots) {
        for (int i = -4; i <= 4; ++i) {
          for (int j = -4; j <= 4; ++j) {
            const double s = sp.s + i * half / 4.0, t = sp.t + j * half / 4.0;
            if (s < 0 || s > 1 || t < 0 || t > 1) continue;
            const double d = dist(s, t);
            worst = std::max(worst, d);
            next.push_back({d, s, t});
          }
        }
      }
      std::sort(next.begin(), next.end(),
                [](const Spot& a, const Spot& b) { return a.d > b.d; });
      next.resize(std::min<size_t>(next.size(), 48));
      spots = std::move(next);
      half /= 4.0;
    }
    return worst;
  };
  int guard = 0;
  while (fundamental_worst(f0, f1) > rho * (1.0 + kCoverSlack)) {
    require(++guard < 512, "approx_state_set: lattice refinement failed to converge");
    ++N2;
    f1 = raw / N2;
  }

  Builder b;
  b.cell = &cell;
  b.ghat = ghat;
  b.frame = Mat(2, 2);
  b.frame.col(0) = f0;
  b.frame.col(1) = f1;
  b.anchor = poly::centroid(cell.body_polygon);
  b.rho = rho;
  b.bucket = std::max(h1, 1e-9);

  const Box bb = loose_bounding_box(cell.body);
  const double diam = (bb.upper - bb.lower).norm();
  const long cap0 = static_cast<long>(std::ceil(diam / f0.norm())) + 2;
  const long cap1 = static_cast<long>(std::ceil(diam / f1.norm())) + 2;

  /* breadth-first fill of the in-body integer lattice around the anchor */
  std::unordered_set<long long> visited;
  std::unordered_set<long long> kept;
  std::deque<std::pair<long, long>> queue;
  auto try_visit = [&](long i, long j) {
    if (std::labs(i) > cap0 || std::labs(j) > cap1) return;
    const long long key = bucket_key(i, j);
    if (visited.count(key)) return;
    visited.insert(key);
    const Vec p = b.anchor + static_cast<double>(i) * f0 + static_cast<double>(j) * f1;
    if (!cell.body_contains(p)) return;
    b.insert(p, static_cast<int>(i), static_cast<int>(j));
    kept.insert(key);
    queue.push_back({i, j});
  };
  try_visit(0, 0);
  require(!b.points.empty(), "approx_state_set: anchor escaped the cell body");
  while (!queue.empty()) {
    auto [i, j] = queue.front();
    queue.pop_front();
    try_visit(i + 1, j);
    try_visit(i - 1, j);
    try_visit(i, j + 1);
    try_visit(i, j - 1);
  }

  Eigen::JacobiSVD<Mat> svd(ghat.transpose());
  const double smin = svd.singularValues().minCoeff();
  const double euclid_factor =
      smin > 1e-12 ? std::sqrt(static_cast<double>(ghat.cols())) / smin : 1e12;
  const double window = b.safe_window(euclid_factor);
  auto covered = [&](const Vec& x) { return b.min_dist(x, window) <= rho * (1.0 + kCoverSlack); };
  auto coeff_of = [&](const Vec& x) {
    Eigen::Matrix2d F = b.frame;
    Eigen::Vector2d c = F.colPivHouseholderQr().solve(Eigen::Vector2d(x - b.anchor));
    return c;
  };
  auto repair = [&](const Vec& x) {
    if (covered(x)) return;
    const auto c = coeff_of(x);
    b.insert(x, static_cast<int>(std::lround(c[0])), static_cast<int>(std::lround(c[1])));
  };

  /* boundary completion: sub-sampled coefficient cells that lost a corner to
   * the body boundary, plus the boundary polyline itself */
  const int sub = 8;
  for (long i = -cap0; i <= cap0; ++i) {
    for (long j = -cap1; j <= cap1; ++j) {
      /* coefficient cells whose four corners all made it into the lattice are
       * covered by the verified rounding bound */
      const bool full = kept.count(bucket_key(i, j)) && kept.count(bucket_key(i + 1, j)) &&
                        kept.count(bucket_key(i, j + 1)) && kept.count(bucket_key(i + 1, j + 1));
      if (full) continue;
      bool touches = false;
      for (int si = 0; si <= sub && !touches; ++si)
        for (int sj = 0; sj <= sub && !touches; ++sj) {
          const Vec p = b.anchor + (static_cast<double>(i) + si / static_cast<double>(sub)) * f0 +
                        (static_cast<double>(j) + sj / static_cast<double>(sub)) * f1;
          if (cell.body_contains(p)) touches = true;
        }
      if (!touches) continue;
      for (int si = 0; si <= sub; ++si) {
        for (int sj = 0; sj <= sub; ++sj) {
          const Vec p = b.anchor + (static_cast<double>(i) + si / static_cast<double>(sub)) * f0 +
                        (static_cast<double>(j) + sj / static_cast<double>(sub)) * f1;
          if (cell.body_contains(p)) repair(p);
        }
      }
    }
  }
  {
    const auto& poly = cell.body_polygon;
    const double step = std::min(f0.norm(), f1.norm()) / sub;
    for (size_t e = 0; e < poly.size(); ++e) {
      const poly::Pt& p0 = poly[e];
      const poly::Pt& p1 = poly[(e + 1) % poly.size()];
      const double len = (p1 - p0).norm();
      const int m = std::max(1, static_cast<int>(std::ceil(len / step)));
      for (int k = 0; k <= m; ++k) {
        const poly::Pt p = p0 + (static_cast<double>(k) / m) * (p1 - p0);
        Vec x(2);
        x << p.x(), p.y();
        if (cell.body_contains(x)) repair(x);
      }
    }
  }

  /* randomized self-check rounds pin the sampled covering property; round
   * sizes escalate until a round finds no gap */
  std::mt19937_64 eng(0x5eedULL + static_cast<uint64_t>(cell.symbol_index));
  auto unit = [&eng]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  const int round_sizes[] = {4000, 20000, 100000, 300000};
  bool clean = false;
  for (int round = 0; round < 12 && !clean; ++round) {
    const int budget = round_sizes[std::min(round, 3)];
    clean = true;
    for (int t = 0; t < budget; ++t) {
      const poly::Pt p = poly::sample_point(cell.body_polygon, unit(), unit(), unit());
      Vec x(2);
      x << p.x(), p.y();
      if (!covered(x)) {
        repair(x);
        clean = false;
      }
    }
  }
  require(clean, "approx_state_set: covering completion did not converge");

  StateLattice out;
  out.cell_ref = cell.symbol_index;
  out.anchor = b.anchor;
  out.frame = b.frame;
  out.subdivisions = {basics[static_cast<size_t>(a)].subdivisions, N2};
  out.gnorm = cell.gnorm_generators;
  out.step_max = h1;
  out.points = std::move(b.points);
  out.coords = std::move(b.coords);
  out.extents = {0, 0};
  for (const auto& c : out.coords) {
    out.extents[0] = std::max(out.extents[0], std::abs(c[0]));
    out.extents[1] = std::max(out.extents[1], std::abs(c[1]));
  }
  out.build_index();
  return out;
}

StateLattice approx_state_set(const Cell& cell, double spacing, double eps) {
  return approx_state_set(cell, basic_generator(cell.gnorm_generators, spacing, eps));
}

InputGrid approx_input_set(const Box& U, double spacing) {
  require(spacing > 0.0, "approx_input_set: spacing must be > 0");
  U.check();
  const long m = U.dim();
  const Vec c = U.center();
  std::vector<std::vector<double>> axis(static_cast<size_t>(m));
  for (long d = 0; d < m; ++d) {
    const long klo = static_cast<long>(std::ceil((U.lower[d] - c[d]) / spacing - 1e-12));
    const long khi = static_cast<long>(std::floor((U.upper[d] - c[d]) / spacing + 1e-12));
    for (long k = klo; k <= khi; ++k)
      axis[static_cast<size_t>(d)].push_back(c[d] + spacing * static_cast<double>(k));
  }
  InputGrid g;
  g.spacing = spacing;
  std::vector<size_t> idx(static_cast<size_t>(m), 0);
  while (true) {
    Vec u(m);
    for (long d = 0; d < m; ++d) u[d] = axis[static_cast<size_t>(d)][idx[static_cast<size_t>(d)]];
    g.inputs.push_back(u);
    long d = m - 1;
    for (; d >= 0; --d) {
      if (++idx[static_cast<size_t>(d)] < axis[static_cast<size_t>(d)].size()) break;
      idx[static_cast<size_t>(d)] = 0;
    }
    if (d < 0) break;
  }
  return g;
}

}  // namespace zonoctrl
