#ifndef ZONOCTRL_TESTS_HELPERS_HPP_
#define ZONOCTRL_TESTS_HELPERS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <unordered_set>
#include <vector>

#include "zonoctrl/czono.hpp"
#include "zonoctrl/polygon.hpp"

namespace testutil {

using zonoctrl::ConstrainedZonotope;
using zonoctrl::Mat;
using zonoctrl::Vec;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
  }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(eng() % static_cast<uint64_t>(hi - lo + 1));
  }
};

/* orthonormal kernel basis of A (columns), and the min-norm solution of
 * A xi = b; empty kernel handled */
struct AffineParam {
  Vec xi0;
  Mat N;
  bool consistent;
};

inline AffineParam affine_param(const Mat& A, const Vec& b, long ng) {
  AffineParam out;
  if (A.rows() == 0) {
    out.xi0 = Vec::Zero(ng);
    out.N = Mat::Identity(ng, ng);
    out.consistent = true;
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
  out.xi0 = cod.solve(b);
  out.consistent = (A * out.xi0 - b).lpNorm<Eigen::Infinity>() < 1e-8;
  Eigen::FullPivLU<Mat> lu(A);
  Mat K = lu.kernel();
  if (K.cols() == 1 && K.norm() < 1e-12) {
    out.N = Mat::Zero(ng, 0);
  } else {
    Eigen::HouseholderQR<Mat> qr(K);
    Mat Q = qr.householderQ() * Mat::Identity(ng, K.cols());
    out.N = Q;
  }
  return out;
}

inline ConstrainedZonotope random_czono(Rng& rng, int max_gens = 6, int max_cons = 2) {
  const int n = 2;
  const int ng = rng.uniform_int(2, max_gens);
  Mat G(n, ng);
  for (int j = 0; j < ng; ++j) {
    Eigen::Vector2d g;
    do {
      g = Eigen::Vector2d(rng.uniform(-2, 2), rng.uniform(-2, 2));
    } while (g.norm() < 0.3);
    G.col(j) = g;
  }
  Vec c(2);
  c << rng.uniform(-5, 5), rng.uniform(-5, 5);
  const int nc = rng.uniform_int(0, max_cons);
  Mat A(nc, ng);
  Vec b(nc);
  if (nc > 0) {
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < ng; ++j) A(i, j) = rng.uniform(-1, 1);
    if (rng.uniform(0, 1) < 0.9) {
      Vec xi(ng);
      for (int j = 0; j < ng; ++j) xi[j] = rng.uniform(-0.9, 0.9);
      b = A * xi;
    } else {
      for (int i = 0; i < nc; ++i) b[i] = rng.uniform(-3, 3);
    }
  }
  ConstrainedZonotope s;
  s.center = c;
  s.generators = G;
  s.constraint_matrix = A;
  s.constraint_offset = b;
  return s;
}

/* exact vertices of the factor polytope {||xi||_inf <= 1, A xi = b}:
 * every vertex fixes at least ng - nc coordinates at +-1 */
inline std::vector<Vec> factor_polytope_vertices(const Mat& A, const Vec& b, long ng) {
  std::vector<Vec> out;
  const long nc = A.rows();
  if (nc == 0) {
    for (long mask = 0; mask < (1L << ng); ++mask) {
      Vec xi(ng);
      for (long j = 0; j < ng; ++j) xi[j] = (mask >> j) & 1 ? 1.0 : -1.0;
      out.push_back(xi);
    }
    return out;
  }
  const long nf = ng - nc;
  if (nf < 0) return out;
  std::vector<long> comb(nc);
  for (long i = 0; i < nc; ++i) comb[i] = i;
  auto next_comb = [&]() {
    long i = nc - 1;
    while (i >= 0 && comb[static_cast<size_t>(i)] == ng - nc + i) --i;
    if (i < 0) return false;
    ++comb[static_cast<size_t>(i)];
    for (long j = i + 1; j < nc; ++j)
      comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
    return true;
  };
  do {
    std::vector<char> solved(ng, 0);
    for (long i = 0; i < nc; ++i) solved[static_cast<size_t>(comb[static_cast<size_t>(i)])] = 1;
    Mat As(nc, nc);
    for (long i = 0; i < nc; ++i) As.col(i) = A.col(comb[static_cast<size_t>(i)]);
    Eigen::FullPivLU<Mat> lu(As);
    if (!lu.isInvertible()) continue;
    for (long mask = 0; mask < (1L << nf); ++mask) {
      Vec xi = Vec::Zero(ng);
      Vec rhs = b;
      long fi = 0;
      for (long j = 0; j < ng; ++j) {
        if (solved[static_cast<size_t>(j)]) continue;
        xi[j] = (mask >> fi) & 1 ? 1.0 : -1.0;
        rhs -= A.col(j) * xi[j];
        ++fi;
      }
      Vec xs = lu.solve(rhs);
      if (xs.lpNorm<Eigen::Infinity>() > 1.0 + 1e-9) continue;
      for (long i = 0; i < nc; ++i) xi[comb[static_cast<size_t>(i)]] = xs[i];
      out.push_back(xi);
    }
  } while (next_comb());
  return out;
}

/* independent membership oracle: exact image polygon from factor-polytope
 * vertex enumeration, self-checked against a dense factor-sampling cloud */
struct MembershipOracle {
  zonoctrl::poly::Polygon hull;
  std::vector<Eigen::Vector2d> cloud; /* sampled points, exactly inside */
  bool usable = false;
};

inline MembershipOracle build_oracle(const ConstrainedZonotope& s, int grid_budget = 60000) {
  MembershipOracle mo;
  const long ng = s.num_generators();
  auto fverts = factor_polytope_vertices(s.constraint_matrix, s.constraint_offset, ng);
  if (fverts.empty()) return mo;
  std::vector<Eigen::Vector2d> img;
  for (const auto& xi : fverts) img.push_back(Eigen::Vector2d(s.center + s.generators * xi));
  mo.hull = zonoctrl::poly::convex_hull(img);

  const auto par = affine_param(s.constraint_matrix, s.constraint_offset, ng);
  if (!par.consistent) return mo;
  const long dz = par.N.cols();
  if (dz > 0) {
    const double B = 2.0 * std::sqrt(static_cast<double>(ng)) + 0.01;
    long steps = std::max<long>(5, static_cast<long>(std::pow(static_cast<double>(grid_budget),
                                                              1.0 / static_cast<double>(dz))));
    std::vector<long> idx(dz, 0);
    long total = 1;
    for (long i = 0; i < dz; ++i) total *= steps;
    for (long cnt = 0; cnt < total; ++cnt) {
      Vec z(dz);
      for (long i = 0; i < dz; ++i)
        z[i] = -B + 2.0 * B * static_cast<double>(idx[i]) / static_cast<double>(steps - 1);
      Vec xi = par.xi0 + par.N * z;
      if (xi.lpNorm<Eigen::Infinity>() <= 1.0)
        mo.cloud.push_back(Eigen::Vector2d(s.center + s.generators * xi));
      for (long i = 0; i < dz; ++i) {
        if (++idx[i] < steps) break;
        idx[i] = 0;
      }
    }
  } else if (par.xi0.lpNorm<Eigen::Infinity>() <= 1.0) {
    mo.cloud.push_back(Eigen::Vector2d(s.center + s.generators * par.xi0));
  }
  /* self-check: every sampled member lies in the enumerated hull */
  for (const auto& p : mo.cloud) {
    if (!zonoctrl::poly::point_in(mo.hull, p, 1e-7)) return mo;
  }
  mo.usable = true;
  return mo;
}

/* +1 inside by margin, -1 outside by margin, 0 unclassified */
inline int oracle_classify(const MembershipOracle& mo, const Eigen::Vector2d& x, double margin) {
  if (mo.hull.size() >= 3 && zonoctrl::poly::point_in(mo.hull, x, -margin)) return 1;
  if (!zonoctrl::poly::point_in(mo.hull, x, margin)) return -1;
  return 0;
}

inline std::vector<Eigen::Vector2d> sign_corner_hull(const ConstrainedZonotope& z) {
  const long ng = z.num_generators();
  std::vector<Eigen::Vector2d> pts;
  for (long mask = 0; mask < (1L << ng); ++mask) {
    Vec xi(ng);
    for (long j = 0; j < ng; ++j) xi[j] = (mask >> j) & 1 ? 1.0 : -1.0;
    pts.push_back(Eigen::Vector2d(z.center + z.generators * xi));
  }
  return zonoctrl::poly::convex_hull(pts);
}

inline std::optional<Vec> sample_in_czono(const ConstrainedZonotope& s, Rng& rng,
                                          int tries = 4000) {
  const long ng = s.num_generators();
  const auto par = affine_param(s.constraint_matrix, s.constraint_offset, ng);
  if (!par.consistent) return std::nullopt;
  const long dz = par.N.cols();
  if (dz == 0) {
    if (par.xi0.lpNorm<Eigen::Infinity>() <= 1.0) return Vec(s.center + s.generators * par.xi0);
    return std::nullopt;
  }
  const double B = 2.0 * std::sqrt(static_cast<double>(ng)) + 0.01;
  for (int t = 0; t < tries; ++t) {
    Vec z(dz);
    for (long i = 0; i < dz; ++i) z[i] = rng.uniform(-B, B);
    Vec xi = par.xi0 + par.N * z;
    if (xi.lpNorm<Eigen::Infinity>() <= 1.0) return Vec(s.center + s.generators * xi);
  }
  return std::nullopt;
}

inline bool same_vertex_set(const std::vector<Eigen::Vector2d>& a,
                            const std::vector<Eigen::Vector2d>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    bool hit = false;
    for (const auto& q : b)
      if ((p - q).norm() <= tol) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

}  // namespace testutil

#endif
