#ifndef ZONOCTRL_COMMON_HPP_
#define ZONOCTRL_COMMON_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace zonoctrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/* global numeric tolerances */
namespace tol {
/* absolute tolerance on LP constraint residuals; all set predicates are
 * qualified by it */
inline constexpr double feas = 1e-9;
/* vertex dedup and boundary classification in planar geometry */
inline constexpr double geo = 1e-7;
/* fixed-step RK4 accuracy target for affine benchmark dynamics */
inline constexpr double integrator = 1e-8;
}  // namespace tol

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace zonoctrl

#endif
