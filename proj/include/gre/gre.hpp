#pragma once

#include "gre/bound.hpp"
#include "gre/dataset.hpp"
#include "gre/factor.hpp"
#include "gre/kernels.hpp"
#include "gre/scalar.hpp"

#include <span>
#include <vector>

namespace gre {

/// Prior model k(x,x') = sigma^2 [k0^2 + b(x) b(x') k_e(x,x')], used in the
/// flat limit k0^2 -> infinity.
struct GreModel {
  ErrorBound bound = ErrorBound::monomial(1.0);
  Kernel kernel;
  double nugget_relative = 0.0;

  GreModel() = default;
  GreModel(ErrorBound b, Kernel k, double nugget = 0.0);

  void check_dim(std::size_t d) const;
};

/// Gram matrix of the normalised-error kernel on the dataset points.
template <typename T>
Mat<T> gram_matrix(const Kernel& kernel, const BasicDataset<T>& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Mat<T> K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = kernel_eval<T>(kernel, data.point(static_cast<std::size_t>(i)),
                               data.point(static_cast<std::size_t>(j)));
      K(j, i) = K(i, j);
    }
  }
  return K;
}

template <typename T>
Vec<T> bound_vector(const ErrorBound& bound, const BasicDataset<T>& data) {
  Vec<T> b(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) b(static_cast<Eigen::Index>(i)) = bound(data.point(i));
  return b;
}

/// K_b together with its factors K_b = B K_e B, B = diag(b(x_i)).
template <typename T>
struct KbMatrix {
  Mat<T> kb;
  Mat<T> ke;
  Vec<T> b;
};

template <typename T>
KbMatrix<T> build_kb(const BasicDataset<T>& data, const GreModel& model) {
  model.check_dim(data.dim());
  KbMatrix<T> out;
  out.ke = gram_matrix(model.kernel, data);
  out.b = bound_vector(model.bound, data);
  out.kb = out.b.asDiagonal() * out.ke * out.b.asDiagonal();
  return out;
}

struct Prediction {
  double mean;
  double variance;
};

template <typename T>
struct BasicPrediction {
  T mean;
  T variance;
};

/// Flat-limit posterior. All solves go through the Cholesky factor of K_e:
/// K_b^{-1} v = B^{-1} K_e^{-1} B^{-1} v.
template <typename T>
class BasicPosterior {
 public:
  BasicPosterior(BasicDataset<T> data, GreModel model)
      : data_(std::move(data)), model_(std::move(model)) {
    model_.check_dim(data_.dim());
    const auto n = static_cast<Eigen::Index>(data_.size());
    const Mat<T> ke = gram_matrix(model_.kernel, data_);
    b_ = bound_vector(model_.bound, data_);
    factor_ = SpdFactor<T>::factorize(ke, model_.nugget_relative);

    const Vec<T> binv = b_.cwiseInverse();
    ones_white_ = factor_.whiten(binv);
    objective_ = ones_white_.squaredNorm();
    weights_ = binv.cwiseProduct(factor_.unwhiten(ones_white_)) / objective_;

    Vec<T> f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = data_.values()[static_cast<std::size_t>(i)];
    mean_at_zero_ = weights_.dot(f);
    // The residual form of the quadratic avoids cancellation between
    // f'K_b^{-1}f and (1'K_b^{-1}f)^2 / 1'K_b^{-1}1.
    const Vec<T> resid = f - Vec<T>::Constant(n, mean_at_zero_);
    resid_white_ = factor_.whiten(resid.cwiseProduct(binv));
    sigma2_ = resid_white_.squaredNorm() / T(static_cast<double>(n));
    var_at_zero_ = sigma2_ / objective_;
  }

  const BasicDataset<T>& dataset() const { return data_; }
  const GreModel& model() const { return model_; }
  const Vec<T>& weights() const { return weights_; }
  const T& mean_at_zero() const { return mean_at_zero_; }
  const T& var_at_zero() const { return var_at_zero_; }
  const T& sigma2() const { return sigma2_; }
  /// 1' K_b^{-1} 1.
  const T& objective() const { return objective_; }
  double nugget_used() const { return factor_.nugget(); }
  bool single_point() const { return data_.size() == 1; }
  const SpdFactor<T>& factor() const { return factor_; }
  const Vec<T>& bound_values() const { return b_; }

  /// log det K_b = 2 sum log b(x_i) + log det K_e.
  T logdet_kb() const {
    using std::log;
    T acc = factor_.logdet();
    for (Eigen::Index i = 0; i < b_.size(); ++i) acc += 2 * log(b_(i));
    return acc;
  }

  BasicPrediction<T> predict(std::span<const T> x) const {
    const Cross c = cross(x);
    const T mean = mean_at_zero_ + c.bx * c.g.dot(resid_white_);
    return {mean, covariance(c, c)};
  }

  /// Posterior covariance k_n(x, x'), scaled by sigma2.
  T covariance(std::span<const T> x, std::span<const T> y) const { return covariance(cross(x), cross(y)); }

 private:
  struct Cross {
    T bx;
    T kee;                // k_e(x, x)
    Vec<T> g;             // L^{-1} k_e(X, x)
    std::vector<T> point;
  };

  Cross cross(std::span<const T> x) const {
    if (x.size() != data_.dim()) throw DimensionError("predict: point dimension disagrees with the dataset");
    for (const auto& v : x) {
      if (v < T(0)) throw InvalidArgument("predict: fidelity components must be nonnegative");
    }
    Cross c;
    c.point.assign(x.begin(), x.end());
    c.bx = model_.bound(x);
    c.kee = kernel_eval<T>(model_.kernel, x, x);
    Vec<T> k(static_cast<Eigen::Index>(data_.size()));
    for (std::size_t i = 0; i < data_.size(); ++i) {
      k(static_cast<Eigen::Index>(i)) = kernel_eval<T>(model_.kernel, data_.point(i), x);
    }
    c.g = factor_.whiten(k);
    return c;
  }

  T covariance(const Cross& a, const Cross& c) const {
    const T kbxy = a.bx * c.bx * kernel_eval<T>(model_.kernel, std::span<const T>(a.point), std::span<const T>(c.point));
    const T quad = a.bx * c.bx * a.g.dot(c.g);
    const T ua = a.bx * a.g.dot(ones_white_) - T(1);
    const T uc = c.bx * c.g.dot(ones_white_) - T(1);
    T v = sigma2_ * (kbxy - quad + ua * uc / objective_);
    if (&a == &c && v < T(0)) v = T(0);
    return v;
  }

  BasicDataset<T> data_;
  GreModel model_;
  SpdFactor<T> factor_;
  Vec<T> b_;
  Vec<T> ones_white_;
  Vec<T> resid_white_;
  Vec<T> weights_;
  T objective_{};
  T mean_at_zero_{};
  T sigma2_{};
  T var_at_zero_{};
};

using GrePosterior = BasicPosterior<double>;

template <typename T>
BasicPosterior<T> fit(const BasicDataset<T>& data, const GreModel& model) {
  return BasicPosterior<T>(data, model);
}

inline Prediction predict(const GrePosterior& post, std::span<const double> x) {
  const auto p = post.predict(x);
  return {p.mean, p.variance};
}

struct CredibleInterval {
  double alpha;
  double lo;
  double hi;
  bool degenerate;  ///< var_at_zero == 0: the interval collapses to {mean}
};

/// 100(1 - alpha)% credible interval for f(0).
CredibleInterval credible_interval(double mean, double variance, double alpha);
CredibleInterval credible_interval(const GrePosterior& post, double alpha);

}  // namespace gre
