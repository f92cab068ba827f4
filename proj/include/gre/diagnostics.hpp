#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace gre {

struct BoxFill {
  double value;
  bool approximate;  ///< lattice search in d >= 2 gives a lower bound
  std::size_t anchors;
};

struct BoxFillOptions {
  std::size_t lattice_per_axis = 64;
  /// Upper bound on the number of lattice anchors; the per-axis resolution is
  /// reduced in high dimension to respect it.
  std::size_t max_lattice_anchors = std::size_t{64} * 64 * 64;
  /// Extra uniformly random anchors (seeded, reproducible).
  std::size_t random_anchors = 0;
  std::uint64_t seed = 0;
};

/// Largest nu such that some box [x, x + nu 1] inside [0,1]^d contains no
/// point. Exact in d = 1 (largest gap between consecutive points, including
/// the boundary segments).
BoxFill box_fill_distance(const std::vector<std::vector<double>>& points, std::size_t dim,
                          const BoxFillOptions& opts = {});
/// Single-threaded version of the lattice search, kept for testing.
BoxFill box_fill_distance_serial(const std::vector<std::vector<double>>& points, std::size_t dim,
                                 const BoxFillOptions& opts = {});

/// gamma_1 = 2, gamma_d = 2d (1 + gamma_{d-1}).
std::int64_t gamma_constant(int d);

/// Fill-distance threshold 1 / (gamma_d (r + 2s)) below which the
/// convergence guarantee applies.
double fill_threshold(int d, double r, int s);

}  // namespace gre
