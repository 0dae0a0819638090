#ifndef ZONOCTRL_PARTITION_HPP_
#define ZONOCTRL_PARTITION_HPP_

#include <cstdint>
#include <vector>

#include "zonoctrl/czono.hpp"
#include "zonoctrl/polygon.hpp"

namespace zonoctrl {

enum class CellKind { Zonotope, Constrained };

/* one symbol of the partition: an expanded zonotope or constrained zonotope */
struct Cell {
  int symbol_index = 0; /* 1-based, symbol pi_k */
  CellKind kind = CellKind::Zonotope;
  ConstrainedZonotope base; /* pre-expansion */
  ConstrainedZonotope body; /* E_eps(base), clipped to E_eps(X) */
  Mat gnorm_generators;     /* generator columns backing ||.||_G in this cell */

  /* cached planar hull of body; empty when dim != 2 */
  poly::Polygon body_polygon;

  bool body_contains(const Vec& x) const;
  void finalize(); /* recompute cached polygon */
};

struct PartitionConfig {
  int count = 0;          /* N */
  double epsilon = 1.0;   /* expansion precision */
  uint64_t seed = 0;
  int neighbor_count = 0; /* >= n */
};

std::vector<Vec> generate_centers(const Box& X, int N, uint64_t seed);

/* full-rank difference matrices G_i from nearest-neighbor connections */
std::vector<Mat> connect_centers(const std::vector<Vec>& centers, int neighbor_count);

std::vector<ConstrainedZonotope> build_zonotopes(const std::vector<Vec>& centers,
                                                 const std::vector<Mat>& generator_matrices);

/* constrained zonotopes covering X minus the zonotope union; planar only */
std::vector<ConstrainedZonotope> cover_residual(const Box& X,
                                                const std::vector<ConstrainedZonotope>& zonotopes);

std::vector<Cell> make_partition(const Box& X, const PartitionConfig& cfg);

}  // namespace zonoctrl

#endif
