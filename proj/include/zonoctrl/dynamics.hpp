#ifndef ZONOCTRL_DYNAMICS_HPP_
#define ZONOCTRL_DYNAMICS_HPP_

#include <functional>
#include <string>

#include "zonoctrl/czono.hpp"

namespace zonoctrl {

/* sampled-data control system: piecewise-constant inputs held over tau */
struct SampledSystem {
  std::string dynamics; /* registered vector-field name */
  Vec params;
  double tau = 0.0;
  double lipschitz = 0.0;
  Box state_box;
  Box input_box;
  int rk4_substeps = 16;

  void check() const;
  long state_dim() const { return state_box.dim(); }
  long input_dim() const { return input_box.dim(); }
};

using VectorField =
    std::function<Vec(const SampledSystem& sys, const Vec& x, const Vec& u)>;

/* extension point for user vector fields with a declared Lipschitz constant */
void register_dynamics(const std::string& name, VectorField f);
bool dynamics_known(const std::string& name);

/* flow approximation x(tau, x, u) by fixed-step RK4 */
Vec integrate(const SampledSystem& sys, const Vec& x, const Vec& u);

}  // namespace zonoctrl

#endif
