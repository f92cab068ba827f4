#include "gre/multioutput.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace gre {

GridDataset::GridDataset(std::vector<std::vector<double>> x_points, std::vector<std::vector<double>> t_points,
                         MatrixXd values)
    : x_(std::move(x_points)), t_(std::move(t_points)), values_(std::move(values)) {
  if (x_.empty() || t_.empty()) throw InvalidArgument("grid needs at least one fidelity and one index");
  if (values_.rows() != static_cast<Eigen::Index>(x_.size()) || values_.cols() != static_cast<Eigen::Index>(t_.size())) {
    throw DimensionError("grid values must be an n1 x n2 table; for ragged data fit each output with scalar GRE");
  }
  const std::size_t d = x_.front().size(), dt = t_.front().size();
  if (d == 0 || dt == 0) throw InvalidArgument("grid points must have positive dimension");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (x_[i].size() != d) throw DimensionError("grid fidelities differ in dimension");
    for (double v : x_[i]) {
      if (!(v > 0.0)) throw InvalidArgument("grid fidelities must have every component strictly positive");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (x_[k] == x_[i]) throw InvalidArgument("grid fidelities must be distinct");
    }
  }
  for (std::size_t j = 0; j < t_.size(); ++j) {
    if (t_[j].size() != dt) throw DimensionError("grid indices differ in dimension");
    for (std::size_t k = 0; k < j; ++k) {
      if (t_[k] == t_[j]) throw InvalidArgument("grid indices must be distinct");
    }
  }
  if (!values_.allFinite()) throw InvalidArgument("grid values must be finite");
}

Dataset GridDataset::column(std::size_t j) const {
  std::vector<double> v(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) v[i] = values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return Dataset::from_rows(x_, v);
}

std::size_t GridDataset::find_t(std::span<const double> t) const {
  for (std::size_t j = 0; j < t_.size(); ++j) {
    if (std::equal(t.begin(), t.end(), t_[j].begin(), t_[j].end())) return j;
  }
  return t_.size();
}

GridDataset parse_grid(const csv::Table& table) {
  const std::size_t d = csv::fidelity_columns(table);
  const std::size_t tc = table.column("t"), fc = table.column("f");
  if (d == 0 || tc != d || fc != d + 1 || table.header.size() != d + 2) {
    throw ParseError("grid CSV header must be x1,...,xd,t,f");
  }
  std::map<std::vector<double>, std::size_t> xi;
  std::map<double, std::size_t> ti;
  std::vector<std::vector<double>> xs;
  std::vector<double> ts;
  for (const auto& row : table.rows) {
    std::vector<double> x(row.begin(), row.begin() + static_cast<long>(d));
    if (xi.emplace(x, xs.size()).second) xs.push_back(x);
    if (ti.emplace(row[tc], ts.size()).second) ts.push_back(row[tc]);
  }
  MatrixXd F(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ts.size()));
  std::vector<std::vector<bool>> seen(xs.size(), std::vector<bool>(ts.size(), false));
  for (const auto& row : table.rows) {
    const std::size_t i = xi.at(std::vector<double>(row.begin(), row.begin() + static_cast<long>(d)));
    const std::size_t j = ti.at(row[tc]);
    if (seen[i][j]) throw ParseError("grid CSV repeats the cell (x row " + std::to_string(i + 1) + ", t = " + csv::format(row[tc]) + ")");
    seen[i][j] = true;
    F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[fc];
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (!seen[i][j]) {
        throw InvalidArgument("grid is incomplete: no value at fidelity " + std::to_string(i + 1) + ", t = " +
                              csv::format(ts[j]) + "; fit each output with scalar GRE instead");
      }
    }
  }
  std::vector<std::vector<double>> tp;
  for (double t : ts) tp.push_back({t});
  return GridDataset(std::move(xs), std::move(tp), std::move(F));
}

GridDataset read_grid(const std::string& path) { return parse_grid(csv::read(path)); }

KernelSpec default_index_kernel(const std::vector<std::vector<double>>& t_points) {
  if (t_points.empty()) throw InvalidArgument("index kernel needs at least one index");
  const std::size_t dt = t_points.front().size();
  std::vector<double> ell(dt, 1.0);
  for (std::size_t k = 0; k < dt; ++k) {
    double lo = t_points.front()[k], hi = lo;
    for (const auto& t : t_points) {
      lo = std::min(lo, t[k]);
      hi = std::max(hi, t[k]);
    }
    if (hi > lo) ell[k] = hi - lo;
  }
  return KernelSpec::gaussian(LengthScales(ell));
}

MultiPosterior::MultiPosterior(GridDataset grid, GreModel model, Kernel kernel_t)
    : grid_(std::move(grid)), model_(std::move(model)), kernel_t_(std::move(kernel_t)) {
  model_.check_dim(grid_.dim());
  if (kernel_dim(kernel_t_) != grid_.t_points().front().size()) {
    throw DimensionError("index kernel dimension disagrees with the grid indices");
  }
  const auto n1 = static_cast<Eigen::Index>(grid_.n1()), n2 = static_cast<Eigen::Index>(grid_.n2());
  MatrixXd ke(n1, n1);
  VectorXd binv(n1);
  for (Eigen::Index i = 0; i < n1; ++i) {
    const auto& xi = grid_.x_points()[static_cast<std::size_t>(i)];
    binv(i) = 1.0 / bound_eval(model_.bound, xi);
    for (Eigen::Index k = 0; k <= i; ++k) {
      ke(i, k) = kernel_eval(model_.kernel, xi, grid_.x_points()[static_cast<std::size_t>(k)]);
      ke(k, i) = ke(i, k);
    }
  }
  kt_.resize(n2, n2);
  for (Eigen::Index j = 0; j < n2; ++j) {
    for (Eigen::Index k = 0; k <= j; ++k) {
      kt_(j, k) = kernel_eval(kernel_t_, grid_.t_points()[static_cast<std::size_t>(j)],
                              grid_.t_points()[static_cast<std::size_t>(k)]);
      kt_(k, j) = kt_(j, k);
    }
  }
  fx_ = SpdFactor<double>::factorize(ke, model_.nugget_relative);
  ft_ = SpdFactor<double>::factorize(kt_, model_.nugget_relative);

  ones_white_ = fx_.whiten(binv);
  objective_ = ones_white_.squaredNorm();
  weights_ = binv.cwiseProduct(fx_.unwhiten(ones_white_)) / objective_;
  mean_at_zero_ = grid_.values().transpose() * weights_;
  MatrixXd resid = grid_.values();
  resid.rowwise() -= mean_at_zero_.transpose();
  resid = binv.asDiagonal() * resid;
  resid_white_ = fx_.llt().matrixL().solve(resid);
  // Kronecker quadratic form tr(R' K_b^{-1} R K_T^{-1}) = |L_T^{-1} C'|_F^2.
  const MatrixXd ct = ft_.llt().matrixL().solve(MatrixXd(resid_white_.transpose()));
  sigma2_ = ct.squaredNorm() / static_cast<double>(n1 * n2);
}

VectorXd MultiPosterior::var_at_zero() const { return kt_.diagonal() * (sigma2_ / objective_); }

MultiPosterior::Cross MultiPosterior::cross(std::span<const double> x) const {
  if (x.size() != grid_.dim()) throw DimensionError("predict_grid: point dimension disagrees with the grid");
  for (double v : x) {
    if (v < 0.0) throw InvalidArgument("predict_grid: fidelity components must be nonnegative");
  }
  Cross c;
  c.point.assign(x.begin(), x.end());
  c.b = bound_eval(model_.bound, x);
  VectorXd k(static_cast<Eigen::Index>(grid_.n1()));
  for (std::size_t i = 0; i < grid_.n1(); ++i) k(static_cast<Eigen::Index>(i)) = kernel_eval(model_.kernel, grid_.x_points()[i], c.point);
  c.g = fx_.whiten(k);
  return c;
}

double MultiPosterior::x_part(const Cross& a, const Cross& c) const {
  const double kb = a.b * c.b * kernel_eval(model_.kernel, a.point, c.point);
  const double quad = a.b * c.b * a.g.dot(c.g);
  const double ua = a.b * a.g.dot(ones_white_) - 1.0;
  const double uc = c.b * c.g.dot(ones_white_) - 1.0;
  return kb - quad + ua * uc / objective_;
}

GridPrediction MultiPosterior::predict(std::span<const double> x, std::size_t j) const {
  if (j >= grid_.n2()) {
    throw OffGridError("index is not a training index: the flat-limit covariance has no finite limit off the "
                       "training indices; use a proper prior for off-grid prediction");
  }
  const Cross c = cross(x);
  const auto jj = static_cast<Eigen::Index>(j);
  const double mean = mean_at_zero_(jj) + c.b * c.g.dot(resid_white_.col(jj));
  const double var = std::max(0.0, sigma2_ * kt_(jj, jj) * x_part(c, c));
  return {mean, var};
}

GridPrediction MultiPosterior::predict_at(std::span<const double> x, std::span<const double> t) const {
  const std::size_t j = grid_.find_t(t);
  if (j == grid_.n2()) {
    throw OffGridError("index is not a training index: the flat-limit covariance has no finite limit off the "
                       "training indices; use a proper prior for off-grid prediction");
  }
  return predict(x, j);
}

double MultiPosterior::covariance(std::span<const double> x, std::size_t j, std::span<const double> y,
                                  std::size_t k) const {
  if (j >= grid_.n2() || k >= grid_.n2()) throw OffGridError("covariance requested off the training indices");
  return sigma2_ * kt_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * x_part(cross(x), cross(y));
}

MultiPosterior fit_grid(const GridDataset& grid, const ErrorBound& bound, const Kernel& kernel_x,
                        const Kernel& kernel_t, double nugget_relative) {
  return MultiPosterior(grid, GreModel(bound, kernel_x, nugget_relative), kernel_t);
}

}  // namespace gre
