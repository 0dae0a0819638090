#ifndef ZONOCTRL_LINPROG_HPP_
#define ZONOCTRL_LINPROG_HPP_

#include "zonoctrl/common.hpp"

namespace zonoctrl::lp {

enum class Status { Optimal, Infeasible };

struct Result {
  Status status = Status::Infeasible;
  Vec x;
  double objective = 0.0;

  bool ok() const { return status == Status::Optimal; }
};

/* minimize c'x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lo <= x <= hi.
 *
 * All variable bounds must be finite; the caller picks a box large enough
 * that it never binds at a meaningful optimum. Dense two-phase simplex with
 * Bland's rule, sized for the small programs produced by the set predicates
 * (tens of variables). Throws on malformed dimensions. */
struct Problem {
  Vec c;
  Mat A_eq;
  Vec b_eq;
  Mat A_ub;
  Vec b_ub;
  Vec lo;
  Vec hi;
};

Result solve(const Problem& p);

}  // namespace zonoctrl::lp

#endif
