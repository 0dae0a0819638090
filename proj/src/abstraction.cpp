#include "zonoctrl/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace zonoctrl {

uint64_t Abstraction::transition_count() const {
  uint64_t total = 0;
  for (const auto& t : transitions) total += t.size();
  return total;
}

void build_transitions_serial(Abstraction& abs, const SampledSystem& sys, const Cell& cell) {
  const long Q = static_cast<long>(abs.num_states());
  const long M = static_cast<long>(abs.num_inputs());
  for (long q = 0; q < Q; ++q) {
    for (long v = 0; v < M; ++v) {
      const Vec post = integrate(sys, abs.lattice.points[static_cast<size_t>(q)],
                                 abs.grid.inputs[static_cast<size_t>(v)]);
      if (!cell.body_contains(post)) continue; /* (q, v) disabled */
      auto succ = abs.lattice.radius_query(post, abs.radius);
      auto& slot = abs.transitions[static_cast<size_t>(q * M + v)];
      slot.assign(succ.begin(), succ.end());
    }
  }
}

void build_transitions_parallel(Abstraction& abs, const SampledSystem& sys, const Cell& cell) {
  const long Q = static_cast<long>(abs.num_states());
  const long M = static_cast<long>(abs.num_inputs());
#pragma omp parallel for schedule(dynamic, 8)
  for (long q = 0; q < Q; ++q) {
    for (long v = 0; v < M; ++v) {
      const Vec post = integrate(sys, abs.lattice.points[static_cast<size_t>(q)],
                                 abs.grid.inputs[static_cast<size_t>(v)]);
      if (!cell.body_contains(post)) continue;
      auto succ = abs.lattice.radius_query(post, abs.radius);
      auto& slot = abs.transitions[static_cast<size_t>(q * M + v)];
      slot.assign(succ.begin(), succ.end());
    }
  }
}

Abstraction build_abstraction(const SampledSystem& sys, const Cell& cell,
                              const StateLattice& lattice, const InputGrid& grid, double eps,
                              bool parallel, double radius_scale) {
  sys.check();
  require(eps > 0.0, "build_abstraction: eps must be > 0");
  require(eps >= 0.5 * lattice.step_max - 1e-12,
          "build_abstraction: eps below the quantizer nonemptiness bound");
  require(!grid.inputs.empty(), "build_abstraction: empty input grid");
  Abstraction abs;
  abs.lattice = lattice;
  abs.grid = grid;
  abs.epsilon = eps;
  abs.radius = (0.5 + std::exp(sys.lipschitz * sys.tau)) * eps * radius_scale;
  abs.transitions.assign(abs.num_states() * abs.num_inputs(), {});
  if (parallel)
    build_transitions_parallel(abs, sys, cell);
  else
    build_transitions_serial(abs, sys, cell);
  return abs;
}

std::vector<int> quantize(const Quantizer& q, const Vec& x) {
  require(q.lattice != nullptr, "quantize: no lattice");
  return q.lattice->radius_query(x, q.epsilon);
}

FrrReport check_frr(const SampledSystem& sys, const Cell& cell, const Abstraction& abs,
                    const Quantizer& q, int sample_count, uint64_t seed) {
  FrrReport rep;
  std::mt19937_64 eng(seed);
  auto unit = [&eng]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  require(cell.body_polygon.size() >= 3, "check_frr: degenerate cell body");

  for (int t = 0; t < sample_count; ++t) {
    const poly::Pt p = poly::sample_point(cell.body_polygon, unit(), unit(), unit());
    Vec x(2);
    x << p.x(), p.y();
    ++rep.samples;

    auto F = quantize(q, x);
    if (F.empty()) {
      ++rep.quantizer_misses;
      continue;
    }
    const int qs = F[eng() % F.size()];

    std::vector<int> enabled;
    for (int v = 0; v < static_cast<int>(abs.num_inputs()); ++v)
      if (abs.enabled(qs, v)) enabled.push_back(v);
    if (enabled.empty()) continue;
    const int v = enabled[eng() % enabled.size()];

    /* (a): abstract inputs must be applicable at x; the sampled semantics has
     * total dynamics, so applicability means the flow is defined */
    const Vec post = integrate(sys, x, abs.grid.inputs[static_cast<size_t>(v)]);
    if (!post.allFinite()) {
      ++rep.violations_a;
      continue;
    }
    if (!cell.body_contains(post)) continue; /* successor left the cell */

    ++rep.checked_b;
    auto Fpost = quantize(q, post);
    const auto& succ = abs.successors(qs, v);
    const bool subset =
        std::includes(succ.begin(), succ.end(), Fpost.begin(), Fpost.end());
    if (!subset) {
      ++rep.violations_b;
      if (rep.witnesses.size() < 5) {
        std::ostringstream os;
        os << "x=(" << x[0] << "," << x[1] << ") q=" << qs << " v=" << v;
        rep.witnesses.push_back(os.str());
      }
    }
  }
  return rep;
}

}  // namespace zonoctrl
