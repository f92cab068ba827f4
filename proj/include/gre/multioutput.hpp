#pragma once

#include "gre/csv.hpp"
#include "gre/factor.hpp"
#include "gre/gre.hpp"

#include <span>
#include <string>
#include <vector>

namespace gre {

/// Values f(x_i, t_j) on a full Cartesian grid of n1 fidelities and n2
/// output indices. Index points t_j are real vectors compared exactly.
class GridDataset {
 public:
  GridDataset(std::vector<std::vector<double>> x_points, std::vector<std::vector<double>> t_points,
              MatrixXd values);

  std::size_t n1() const { return x_.size(); }
  std::size_t n2() const { return t_.size(); }
  std::size_t dim() const { return x_.front().size(); }
  const std::vector<std::vector<double>>& x_points() const { return x_; }
  const std::vector<std::vector<double>>& t_points() const { return t_; }
  /// n1 x n2, rows indexed by fidelity.
  const MatrixXd& values() const { return values_; }
  /// Scalar dataset of column j.
  Dataset column(std::size_t j) const;
  /// Index of t among the training indices, or n2 when absent.
  std::size_t find_t(std::span<const double> t) const;

 private:
  std::vector<std::vector<double>> x_;
  std::vector<std::vector<double>> t_;
  MatrixXd values_;
};

/// Long-format grid CSV `x1,...,xd,t,f`; every (x, t) pair must appear once.
GridDataset parse_grid(const csv::Table& table);
GridDataset read_grid(const std::string& path);

/// Gaussian kernel on scalar indices with length-scale equal to their range
/// (1 when all indices coincide).
KernelSpec default_index_kernel(const std::vector<std::vector<double>>& t_points);

struct GridPrediction {
  double mean;
  double variance;
};

/// Flat-limit posterior for k = sigma2 [k0^2 + b b' k_e] k_T, using one
/// factorisation of K_e (n1 x n1) and one of K_T (n2 x n2).
class MultiPosterior {
 public:
  MultiPosterior(GridDataset grid, GreModel model, Kernel kernel_t);

  const GridDataset& grid() const { return grid_; }
  const GreModel& model() const { return model_; }
  const Kernel& kernel_t() const { return kernel_t_; }
  /// Extrapolation weights over the fidelities (shared by every column).
  const VectorXd& weights() const { return weights_; }
  /// Extrapolated values at (0, t_j).
  const VectorXd& mean_at_zero() const { return mean_at_zero_; }
  VectorXd var_at_zero() const;
  double sigma2() const { return sigma2_; }
  double objective() const { return objective_; }

  /// Mean and variance at (x, t_j) for a training index j.
  GridPrediction predict(std::span<const double> x, std::size_t j) const;
  /// As above for an index value; values outside the training set are rejected.
  GridPrediction predict_at(std::span<const double> x, std::span<const double> t) const;
  double covariance(std::span<const double> x, std::size_t j, std::span<const double> y, std::size_t k) const;

 private:
  struct Cross {
    double b;
    VectorXd g;
    std::vector<double> point;
  };
  Cross cross(std::span<const double> x) const;
  double x_part(const Cross& a, const Cross& c) const;

  GridDataset grid_;
  GreModel model_;
  Kernel kernel_t_;
  SpdFactor<double> fx_;
  SpdFactor<double> ft_;
  MatrixXd kt_;
  VectorXd ones_white_;
  MatrixXd resid_white_;  ///< L_e^{-1} B^{-1} (F - 1 m'), n1 x n2
  VectorXd weights_;
  VectorXd mean_at_zero_;
  double objective_ = 0.0;
  double sigma2_ = 0.0;
};

MultiPosterior fit_grid(const GridDataset& grid, const ErrorBound& bound, const Kernel& kernel_x,
                        const Kernel& kernel_t, double nugget_relative = 0.0);

}  // namespace gre
