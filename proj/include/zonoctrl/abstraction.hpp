#ifndef ZONOCTRL_ABSTRACTION_HPP_
#define ZONOCTRL_ABSTRACTION_HPP_

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "zonoctrl/dynamics.hpp"
#include "zonoctrl/partition.hpp"

namespace zonoctrl {

/* subdivided generator column: g = original / subdivisions */
struct BasicGenerator {
  Vec step;         /* g_l */
  int subdivisions; /* N_l */
};

/* N_l = ceil(|col| / spacing), g_l = col / N_l; spacing must not exceed the
 * precision bound eps */
std::vector<BasicGenerator> basic_generator(const Mat& G, double spacing, double eps);

/* finite state approximation A(Z) of one cell */
struct StateLattice {
  int cell_ref = 0;
  Vec anchor;
  Mat frame;                     /* n x n step vectors, |col_1| = max step */
  std::vector<int> subdivisions; /* N_l per frame column */
  std::vector<int> extents;      /* largest |integer coordinate| reached per axis */
  Mat gnorm;                     /* generator columns backing ||.||_G */
  double step_max = 0.0;         /* max_l |g_l| over the frame */
  std::vector<Vec> points;
  std::vector<Eigen::VectorXi> coords;

  /* indices of lattice points with ||p - x||_G <= radius, ascending */
  std::vector<int> radius_query(const Vec& x, double radius) const;

  size_t size() const { return points.size(); }
  void build_index();

 private:
  double bucket_ = 0.0;
  double euclid_factor_ = 0.0; /* |v| <= euclid_factor * ||v||_G */
  Mat ghat_;                   /* normalized gnorm columns */
  std::unordered_map<long long, std::vector<int>> buckets_;
};

StateLattice approx_state_set(const Cell& cell, const std::vector<BasicGenerator>& basics);
StateLattice approx_state_set(const Cell& cell, double spacing, double eps);

struct InputGrid {
  std::vector<Vec> inputs;
  double spacing = 0.0;
};

/* uniform grid over U including the box center */
InputGrid approx_input_set(const Box& U, double spacing);

/* nondeterministic symbolic abstraction of one cell */
struct Abstraction {
  StateLattice lattice;
  InputGrid grid;
  double epsilon = 0.0; /* per-cell precision */
  double radius = 0.0;  /* (0.5 + e^{L tau}) epsilon */
  std::vector<std::vector<int32_t>> transitions; /* indexed q * M + v, sorted */
  std::vector<int> init_states;

  size_t num_states() const { return lattice.size(); }
  size_t num_inputs() const { return grid.inputs.size(); }
  const std::vector<int32_t>& successors(int q, int v) const {
    return transitions[static_cast<size_t>(q) * num_inputs() + static_cast<size_t>(v)];
  }
  bool enabled(int q, int v) const { return !successors(q, v).empty(); }
  uint64_t transition_count() const;
};

/* radius_scale != 1 supports mutation experiments on the transition radius */
Abstraction build_abstraction(const SampledSystem& sys, const Cell& cell,
                              const StateLattice& lattice, const InputGrid& grid, double eps,
                              bool parallel = true, double radius_scale = 1.0);

/* reference kernel kept serial for testing the OpenMP path */
void build_transitions_serial(Abstraction& abs, const SampledSystem& sys, const Cell& cell);
void build_transitions_parallel(Abstraction& abs, const SampledSystem& sys, const Cell& cell);

struct Quantizer {
  const StateLattice* lattice = nullptr;
  double epsilon = 0.0;
};

/* F(x): lattice points within G-norm epsilon of x */
std::vector<int> quantize(const Quantizer& q, const Vec& x);

struct FrrReport {
  long samples = 0;
  long checked_b = 0;
  long violations_a = 0;
  long violations_b = 0;
  long quantizer_misses = 0;
  std::vector<std::string> witnesses;
};

/* Monte-Carlo feedback-refinement check of conditions (a) and (b) */
FrrReport check_frr(const SampledSystem& sys, const Cell& cell, const Abstraction& abs,
                    const Quantizer& q, int sample_count, uint64_t seed);

}  // namespace zonoctrl

#endif
