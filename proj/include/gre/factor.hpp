#pragma once

#include "gre/error.hpp"
#include "gre/instrumentation.hpp"
#include "gre/scalar.hpp"

#include <optional>
#include <string>

namespace gre {

/// Relative jitter schedule applied to kernel matrices: the requested nugget
/// is tried first, then escalated by `factor` from `start` up to `cap`.
struct NuggetPolicy {
  double start = 1e-12;
  double factor = 10.0;
  double cap = 1e-8;
};

/// Cholesky factor of K + lambda * mean(diag K) * I for the smallest lambda
/// in the nugget schedule that yields a numerically nonsingular factor.
template <typename T>
class SpdFactor {
 public:
  SpdFactor() = default;

  /// Returns nullopt when every nugget in the schedule fails.
  static std::optional<SpdFactor> try_factorize(const Mat<T>& K, double requested_nugget,
                                                const NuggetPolicy& policy = {}) {
    const Eigen::Index n = K.rows();
    const T mean_diag = n > 0 ? T(K.diagonal().sum() / T(static_cast<double>(n))) : T(1);
    std::optional<SpdFactor> out;
    const auto attempt = [&](double lambda) {
      Mat<T> A = K;
      if (lambda > 0.0) A.diagonal().array() += T(lambda) * mean_diag;
      instrumentation::record_factorization(static_cast<std::size_t>(n));
      Eigen::LLT<Mat<T>> llt(A);
      if (llt.info() != Eigen::Success) return false;
      const auto diag = llt.matrixLLT().diagonal();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!(diag(i) > T(0))) return false;
      }
      if (!(reciprocal_condition(llt) > machine_epsilon<T>())) return false;
      SpdFactor f;
      f.llt_ = std::move(llt);
      f.nugget_ = lambda;
      out = std::move(f);
      return true;
    };
    if (attempt(requested_nugget)) return out;
    if (requested_nugget > policy.cap) return std::nullopt;
    for (double lambda = std::max(requested_nugget * policy.factor, policy.start); lambda <= policy.cap * (1 + 1e-9);
         lambda *= policy.factor) {
      if (attempt(lambda)) return out;
    }
    return std::nullopt;
  }

  /// As `try_factorize`, but raises IllConditionedError naming the most
  /// strongly correlated pair of rows when the schedule is exhausted.
  static SpdFactor factorize(const Mat<T>& K, double requested_nugget, const NuggetPolicy& policy = {}) {
    if (auto f = try_factorize(K, requested_nugget, policy)) return std::move(*f);
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < K.cols(); ++j) {
        const double denom = std::sqrt(std::abs(to_double(K(i, i))) * std::abs(to_double(K(j, j))));
        const double corr = denom > 0 ? std::abs(to_double(K(i, j))) / denom : 1.0;
        if (corr > best) {
          best = corr;
          bi = static_cast<std::size_t>(i);
          bj = static_cast<std::size_t>(j);
        }
      }
    }
    throw IllConditionedError("kernel matrix is numerically singular even with nugget " +
                                  std::to_string(policy.cap) + "; most correlated points are " +
                                  std::to_string(bi) + " and " + std::to_string(bj),
                              bi, bj);
  }

  Eigen::Index size() const { return llt_.matrixLLT().rows(); }
  double nugget() const { return nugget_; }
  const Eigen::LLT<Mat<T>>& llt() const { return llt_; }

  /// L^{-1} v.
  Vec<T> whiten(const Vec<T>& v) const { return llt_.matrixL().solve(v); }
  /// L^{-T} v.
  Vec<T> unwhiten(const Vec<T>& v) const { return llt_.matrixU().solve(v); }
  Vec<T> solve(const Vec<T>& v) const { return llt_.solve(v); }
  Mat<T> solve(const Mat<T>& v) const { return llt_.solve(v); }

  T logdet() const {
    using std::log;
    T acc(0);
    const auto diag = llt_.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) acc += log(diag(i));
    return 2 * acc;
  }

 private:
  static T reciprocal_condition(const Eigen::LLT<Mat<T>>& llt) {
    if constexpr (std::is_same_v<T, double>) {
      return llt.rcond();
    } else {
      // Eigen's estimator needs NumTraits<T>::infinity(), which the
      // multiprecision bindings lack; fall back to the pivot ratio.
      const auto diag = llt.matrixLLT().diagonal();
      const T lo = diag.minCoeff(), hi = diag.maxCoeff();
      return (lo / hi) * (lo / hi);
    }
  }

  Eigen::LLT<Mat<T>> llt_;
  double nugget_ = 0.0;
};

}  // namespace gre
