#include "zonoctrl/dynamics.hpp"

#include <map>

namespace zonoctrl {

namespace {

std::map<std::string, VectorField>& registry() {
  static std::map<std::string, VectorField> reg = [] {
    std::map<std::string, VectorField> r;
    r["single_integrator"] = [](const SampledSystem& sys, const Vec& x, const Vec& u) -> Vec {
      require(x.size() == u.size(), "single_integrator: state/input dimension mismatch");
      (void)sys;
      return u;
    };
    r["affine"] = [](const SampledSystem& sys, const Vec& x, const Vec& u) -> Vec {
      const long n = x.size(), m = u.size();
      require(sys.params.size() == n * n + n * m, "affine: params must pack A then B row-major");
      Vec dx = Vec::Zero(n);
      for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) dx[i] += sys.params[i * n + j] * x[j];
        for (long j = 0; j < m; ++j) dx[i] += sys.params[n * n + i * m + j] * u[j];
      }
      return dx;
    };
    return r;
  }();
  return reg;
}

}  // namespace

void register_dynamics(const std::string& name, VectorField f) {
  registry()[name] = std::move(f);
}

bool dynamics_known(const std::string& name) { return registry().count(name) > 0; }

void SampledSystem::check() const {
  require(tau > 0.0, "system: tau must be > 0");
  require(lipschitz >= 0.0, "system: lipschitz must be >= 0");
  state_box.check();
  input_box.check();
  require(dynamics_known(dynamics), "system: unknown dynamics '" + dynamics + "'");
  require(rk4_substeps >= 1, "system: need at least one substep");
}

Vec integrate(const SampledSystem& sys, const Vec& x, const Vec& u) {
  auto it = registry().find(sys.dynamics);
  require(it != registry().end(), "integrate: unknown dynamics '" + sys.dynamics + "'");
  require(sys.input_box.contains(u, 1e-9), "integrate: input outside the input set");
  const auto& f = it->second;
  const double h = sys.tau / sys.rk4_substeps;
  Vec y = x;
  for (int s = 0; s < sys.rk4_substeps; ++s) {
    Vec k1 = f(sys, y, u);
    Vec k2 = f(sys, y + 0.5 * h * k1, u);
    Vec k3 = f(sys, y + 0.5 * h * k2, u);
    Vec k4 = f(sys, y + h * k3, u);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace zonoctrl
