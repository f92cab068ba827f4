#pragma once

#include "gre/error.hpp"
#include "gre/piecewise_polynomial.hpp"

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gre {

enum class KernelFamily { Matern, Wendland, Gaussian };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Per-axis length-scales, all strictly positive.
class LengthScales {
 public:
  LengthScales() = default;
  explicit LengthScales(std::vector<double> ell);
  static LengthScales uniform(std::size_t dim, double ell);

  std::size_t size() const { return ell_.size(); }
  double operator[](std::size_t i) const { return ell_[i]; }
  const std::vector<double>& values() const { return ell_; }

 private:
  std::vector<double> ell_;
};

template <typename T>
T scaled_distance(std::span<const T> x, std::span<const T> y, const LengthScales& ell) {
  if (x.size() != y.size() || x.size() != ell.size()) {
    throw DimensionError("scaled_distance: point and length-scale dimensions disagree");
  }
  T acc(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T u = (x[i] - y[i]) / T(ell[i]);
    acc += u * u;
  }
  using std::sqrt;
  return sqrt(acc);
}

/// Matérn radial function with half-integer order nu = s + 1/2, phi(0) = 1.
template <typename T>
T matern_radial(const T& z, int s) {
  using std::exp;
  using std::pow;
  using std::sqrt;
  const T root = sqrt(T(2 * s + 1));
  // s!/(2s)! * (s+i)!/(i!(s-i)!) accumulated as a ratio to stay in range.
  T sum(0);
  const T u = 2 * root * z;
  for (int i = 0; i <= s; ++i) {
    T coef(1);
    for (int k = 1; k <= s; ++k) coef *= T(k);             // s!
    for (int k = s + 1; k <= s + i; ++k) coef *= T(k);     // (s+i)!/s!
    for (int k = 1; k <= s; ++k) coef *= T(k);             // s! again -> (s+i)! s!
    for (int k = 1; k <= 2 * s; ++k) coef /= T(k);         // /(2s)!
    for (int k = 1; k <= i; ++k) coef /= T(k);             // /i!
    for (int k = 1; k <= s - i; ++k) coef /= T(k);         // /(s-i)!
    T power(1);
    for (int k = 0; k < s - i; ++k) power *= u;
    sum += coef * power;
  }
  return exp(-root * z) * sum;
}

/// Exact Wendland piecewise polynomial I^s (1 - z)_+^{floor(d/2)+s+1}.
/// Results are cached; the returned reference stays valid for the program.
const PiecewisePolynomial& wendland_polynomial(int d, int s);

/// Wendland radial function, unnormalised (phi(0) != 1 in general).
template <typename T>
T wendland_radial(const T& z, int d, int s) {
  return wendland_polynomial(d, s)(z);
}

template <typename T>
T gaussian_radial(const T& z) {
  using std::exp;
  return exp(-z * z);
}

/// Radial kernel phi(d_ell(x, y)) over all `dim` axes.
class KernelSpec {
 public:
  KernelSpec() = default;
  KernelSpec(KernelFamily family, int smoothness, LengthScales lengthscales);

  static KernelSpec matern(int s, LengthScales ell) { return {KernelFamily::Matern, s, std::move(ell)}; }
  static KernelSpec wendland(int s, LengthScales ell) { return {KernelFamily::Wendland, s, std::move(ell)}; }
  static KernelSpec gaussian(LengthScales ell) { return {KernelFamily::Gaussian, 0, std::move(ell)}; }

  KernelFamily family() const { return family_; }
  int smoothness() const { return smoothness_; }
  const LengthScales& lengthscales() const { return ell_; }
  std::size_t dim() const { return ell_.size(); }

  template <typename T>
  T radial(const T& z) const {
    switch (family_) {
      case KernelFamily::Matern: return matern_radial(z, smoothness_);
      case KernelFamily::Wendland: return (*wendland_)(z);
      case KernelFamily::Gaussian: return gaussian_radial(z);
    }
    return T(0);
  }

  template <typename T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    return radial(scaled_distance(x, y, ell_));
  }

 private:
  KernelFamily family_ = KernelFamily::Gaussian;
  int smoothness_ = 0;
  LengthScales ell_;
  const PiecewisePolynomial* wendland_ = nullptr;
};

/// Tensor product of one-dimensional kernels, factor i acting on axis i.
class ProductKernel {
 public:
  ProductKernel() = default;
  explicit ProductKernel(std::vector<KernelSpec> factors);

  const std::vector<KernelSpec>& factors() const { return factors_; }
  std::size_t dim() const { return factors_.size(); }

  template <typename T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    if (x.size() != factors_.size() || y.size() != factors_.size()) {
      throw DimensionError("product kernel: point dimension disagrees with factor count");
    }
    T acc(1);
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      acc *= factors_[i](x.subspan(i, 1), y.subspan(i, 1));
    }
    return acc;
  }

 private:
  std::vector<KernelSpec> factors_;
};

using Kernel = std::variant<KernelSpec, ProductKernel>;

inline std::size_t kernel_dim(const Kernel& k) {
  return std::visit([](const auto& kk) { return kk.dim(); }, k);
}

template <typename T>
T kernel_eval(const Kernel& k, std::span<const T> x, std::span<const T> y) {
  return std::visit([&](const auto& kk) { return kk(x, y); }, k);
}

inline double kernel_eval(const Kernel& k, std::span<const double> x, std::span<const double> y) {
  return kernel_eval<double>(k, x, y);
}

/// Lowest smoothness across factors; Gaussian counts as arbitrarily smooth.
int kernel_smoothness(const Kernel& k);

}  // namespace gre
