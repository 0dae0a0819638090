#include "zonoctrl/linprog.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace zonoctrl::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;

/* one simplex pass on the tableau: rows 0..m-1 are constraints, row m is the
 * reduced-cost row, column N holds the rhs / negative objective.
 * `allowed` masks columns that may enter the basis. */
bool run_simplex(Mat& T, std::vector<int>& basis, const std::vector<char>& allowed,
                 long max_iter) {
  const long m = T.rows() - 1;
  const long N = T.cols() - 1;
  for (long iter = 0; iter < max_iter; ++iter) {
    /* Bland: smallest-index column with negative reduced cost */
    long enter = -1;
    for (long j = 0; j < N; ++j) {
      if (allowed[static_cast<size_t>(j)] && T(m, j) < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    long leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (long i = 0; i < m; ++i) {
      if (T(i, enter) > kPivotTol) {
        const double ratio = T(i, N) / T(i, enter);
        if (ratio < best - kPivotTol ||
            (ratio < best + kPivotTol && (leave < 0 || basis[static_cast<size_t>(i)] <
                                                           basis[static_cast<size_t>(leave)]))) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      /* unbounded column; cannot happen with finite variable boxes */
      throw std::runtime_error("linprog: unbounded direction in bounded problem");
    }

    const double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (long i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    basis[static_cast<size_t>(leave)] = static_cast<int>(enter);
  }
  throw std::runtime_error("linprog: iteration limit exceeded");
}

}  // namespace

Result solve(const Problem& p) {
  const long n = p.c.size();
  require(p.lo.size() == n && p.hi.size() == n, "linprog: bound size mismatch");
  require(p.A_eq.size() == 0 || p.A_eq.cols() == n, "linprog: A_eq column mismatch");
  require(p.A_ub.size() == 0 || p.A_ub.cols() == n, "linprog: A_ub column mismatch");
  require(p.A_eq.rows() == p.b_eq.size(), "linprog: A_eq/b_eq mismatch");
  require(p.A_ub.rows() == p.b_ub.size(), "linprog: A_ub/b_ub mismatch");
  for (long j = 0; j < n; ++j)
    require(std::isfinite(p.lo[j]) && std::isfinite(p.hi[j]) && p.lo[j] <= p.hi[j] + 1e-15,
            "linprog: bounds must be finite with lo <= hi");

  const long m_eq = p.A_eq.rows();
  const long m_ub = p.A_ub.rows();

  /* shift x = lo + y, y >= 0; upper bounds become rows y_j + s_j = hi_j - lo_j.
   * ub rows gain slacks with a finite box derived from the variable box. */
  const long n_sl_ub = m_ub;
  const long n_bound_rows = n;
  const long m = m_eq + m_ub + n_bound_rows;
  const long nv = n + n_sl_ub + n_bound_rows; /* y, ub slacks, bound slacks */

  Mat A = Mat::Zero(m, nv);
  Vec b = Vec::Zero(m);

  for (long i = 0; i < m_eq; ++i) {
    A.row(i).head(n) = p.A_eq.row(i);
    b[i] = p.b_eq[i] - p.A_eq.row(i).dot(p.lo);
  }
  for (long i = 0; i < m_ub; ++i) {
    A.row(m_eq + i).head(n) = p.A_ub.row(i);
    A(m_eq + i, n + i) = 1.0;
    b[m_eq + i] = p.b_ub[i] - p.A_ub.row(i).dot(p.lo);
  }
  for (long j = 0; j < n; ++j) {
    A(m_eq + m_ub + j, j) = 1.0;
    A(m_eq + m_ub + j, n + n_sl_ub + j) = 1.0;
    b[m_eq + m_ub + j] = p.hi[j] - p.lo[j];
  }

  for (long i = 0; i < m; ++i) {
    if (b[i] < 0) {
      A.row(i) *= -1.0;
      b[i] = -b[i];
    }
  }

  /* phase 1 tableau with one artificial per row */
  const long N1 = nv + m;
  Mat T = Mat::Zero(m + 1, N1 + 1);
  T.block(0, 0, m, nv) = A;
  T.block(0, nv, m, m) = Mat::Identity(m, m);
  T.col(N1).head(m) = b;
  std::vector<int> basis(static_cast<size_t>(m));
  for (long i = 0; i < m; ++i) basis[static_cast<size_t>(i)] = static_cast<int>(nv + i);
  /* phase-1 reduced costs: minimize sum of artificials */
  for (long j = 0; j < nv; ++j) T(m, j) = -T.block(0, j, m, 1).sum();
  T(m, N1) = -b.sum();

  std::vector<char> allowed(static_cast<size_t>(N1), 1);
  const long max_iter = 2000 + 50 * (m + N1);
  run_simplex(T, basis, allowed, max_iter);

  const double p1_obj = -T(m, N1);
  const double feas_scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  if (p1_obj > 1e-8 * feas_scale) return {Status::Infeasible, Vec(), 0.0};

  /* drive artificials out of the basis; redundant rows are zeroed */
  for (long i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] < nv) continue;
    long piv_col = -1;
    for (long j = 0; j < nv; ++j) {
      if (std::fabs(T(i, j)) > 1e-9) {
        piv_col = j;
        break;
      }
    }
    if (piv_col < 0) {
      T.row(i).setZero(); /* redundant constraint */
      continue;
    }
    const double piv = T(i, piv_col);
    T.row(i) /= piv;
    for (long r = 0; r <= m; ++r) {
      if (r == i) continue;
      const double f = T(r, piv_col);
      if (f != 0.0) T.row(r) -= f * T.row(i);
    }
    basis[static_cast<size_t>(i)] = static_cast<int>(piv_col);
  }

  /* phase 2: real costs, artificial columns barred from entering */
  for (long j = nv; j < N1; ++j) allowed[static_cast<size_t>(j)] = 0;
  Vec cost = Vec::Zero(N1);
  cost.head(n) = p.c;
  T.row(m).setZero();
  for (long j = 0; j < N1; ++j) T(m, j) = cost[j];
  T(m, N1) = 0.0;
  for (long i = 0; i < m; ++i) {
    const int bi = basis[static_cast<size_t>(i)];
    const double cb = cost[bi];
    if (cb != 0.0) T.row(m) -= cb * T.row(i);
  }
  run_simplex(T, basis, allowed, max_iter);

  Vec y = Vec::Zero(nv);
  for (long i = 0; i < m; ++i) {
    const int bi = basis[static_cast<size_t>(i)];
    if (bi < nv) y[bi] = T(i, N1);
  }
  Result r;
  r.status = Status::Optimal;
  r.x = p.lo + y.head(n);
  r.objective = p.c.dot(r.x);
  return r;
}

}  // namespace zonoctrl::lp
