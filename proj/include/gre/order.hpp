#pragma once

#include "gre/bound.hpp"
#include "gre/dataset.hpp"
#include "gre/kernels.hpp"

#include <string>
#include <vector>

namespace gre {

/// Search space for (r, s, ell). r values are per-axis for the additive and
/// product families (the grid is the cartesian product r_values^d).
struct OrderGrid {
  std::vector<double> r_values{0.5, 1.0, 2.0};
  std::vector<int> s_values{0, 1, 2};
  std::vector<double> ell_values;

  /// Defaults with ell log-spaced over [0.1 range, 10 range], `points` values.
  static OrderGrid defaults(double range, std::size_t points = 9);
  /// An empty ell list is allowed when `require_ell` is false; estimation
  /// then fills it from the data as `defaults` would.
  void validate(bool require_ell = true) const;
  OrderGrid resolved(const Dataset& data) const;
};

/// Data extent used to place the default length-scale grid: the largest
/// coordinate spread over all axes, or the largest coordinate if every axis
/// holds a single value.
double fidelity_range(const Dataset& data);

enum class BoundFamily { Monomial, Additive, Product };

std::string to_string(BoundFamily family);
BoundFamily bound_family_from_string(const std::string& name);

struct SurfaceRow {
  std::vector<double> r;
  int s;
  double ell;
  double log_ql;  ///< NaN when the candidate was infeasible
  bool feasible;
};

struct OrderEstimate {
  std::vector<double> r_hat;
  int s_hat = 0;
  double ell_hat = 0.0;
  double log_ql = 0.0;
  double sigma2 = 0.0;  ///< scale estimate under the winning model
  std::vector<SurfaceRow> surface;
  std::vector<std::string> warnings;

  ErrorBound bound(BoundFamily family) const;
  Kernel kernel(KernelFamily family, std::size_t dim) const;
};

struct EstimateOptions {
  KernelFamily kernel_family = KernelFamily::Matern;
  double nugget_relative = 0.0;
};

/// -f'K_b^{-1}f + (1'K_b^{-1}f)^2 / 1'K_b^{-1}1 - log det K_b.
double log_quasi_likelihood(const Dataset& data, const ErrorBound& bound, const Kernel& kernel,
                            double nugget_relative = 0.0);

/// Exhaustive grid search; candidates are evaluated concurrently and reduced
/// with a lexicographic (r, s, ell) tie-break.
OrderEstimate estimate_order(const Dataset& data, const OrderGrid& grid, BoundFamily family,
                             const EstimateOptions& opts = {});
/// Single-threaded reference for estimate_order.
OrderEstimate estimate_order_serial(const Dataset& data, const OrderGrid& grid, BoundFamily family,
                                    const EstimateOptions& opts = {});

struct AxisEstimate {
  std::size_t axis;
  double r;
  int s;
  double ell;
  double sigma_hat;  ///< sqrt of the scale estimate, floored on flat axes
  OrderEstimate estimate;
};

struct AxiswiseEstimate {
  std::vector<AxisEstimate> axes;
  std::vector<std::string> warnings;

  /// sigma_1 x_1^{r_1} + ... + sigma_d x_d^{r_d}.
  ErrorBound additive_bound() const;
  /// Product of one-dimensional kernels with the per-axis (s_i, ell_i).
  ProductKernel product_kernel(KernelFamily family = KernelFamily::Matern) const;
};

/// One dataset per axis; dataset i varies only coordinate i (1-d datasets
/// are accepted as is). An empty `grids` uses per-axis defaults, otherwise
/// one grid per axis or a single shared grid.
AxiswiseEstimate estimate_axiswise(const std::vector<Dataset>& datasets, const std::vector<OrderGrid>& grids = {},
                                   const EstimateOptions& opts = {});

}  // namespace gre
