#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace gre {

/// Runtime-precision binary float used by the extended-precision study path.
/// Expression templates are disabled so the type composes with Eigen.
using Extended = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vec<double>;
using MatrixXd = Mat<double>;

/// Sets the working precision (decimal digits) of `Extended` for the lifetime
/// of the guard and restores the previous value afterwards.
class ScopedDigits {
 public:
  explicit ScopedDigits(unsigned digits) : previous_(Extended::default_precision()) {
    Extended::default_precision(digits);
  }
  ~ScopedDigits() { Extended::default_precision(previous_); }
  ScopedDigits(const ScopedDigits&) = delete;
  ScopedDigits& operator=(const ScopedDigits&) = delete;

 private:
  unsigned previous_;
};

template <typename T>
T machine_epsilon() {
  return std::numeric_limits<T>::epsilon();
}

template <typename T>
double to_double(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    return static_cast<double>(v);
  }
}

}  // namespace gre
