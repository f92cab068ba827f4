#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <vector>

namespace gre {

using Rational = boost::rational<std::int64_t>;

/// Piecewise polynomial on [b_0, b_K) with exact rational coefficients in the
/// monomial basis. Segment k covers [b_k, b_{k+1}); the function is zero at and
/// beyond the last breakpoint. Arguments below b_0 use the first segment.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial(std::vector<Rational> breakpoints,
                      std::vector<std::vector<Rational>> segments);

  /// (1 - z)_+^m on [0, 1).
  static PiecewisePolynomial truncated_power(int m);

  /// (I p)(z) = \int_z^\infty t p(t) dt, computed exactly.
  PiecewisePolynomial integrate_tail() const;

  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<Rational>>& segments() const { return segments_; }

  /// Exact value at a rational argument.
  Rational exact(const Rational& z) const;

  template <typename T>
  T operator()(const T& z) const {
    const std::size_t k = segment_index(z);
    if (k == segments_.size()) return T(0);
    // Horner in w = b_{k+1} - z keeps the relative accuracy near the right
    // breakpoint, where the value has a high-order zero.
    const auto& c = shifted_[k];
    const Rational& b = breakpoints_[k + 1];
    const T w = T(b.numerator()) / T(b.denominator()) - z;
    T acc(0);
    for (std::size_t j = c.size(); j-- > 0;) {
      acc = acc * w + T(c[j].numerator()) / T(c[j].denominator());
    }
    return acc;
  }

 private:
  template <typename T>
  std::size_t segment_index(const T& z) const {
    const auto at = [](const Rational& r) { return T(r.numerator()) / T(r.denominator()); };
    if (!(z < at(breakpoints_.back()))) return segments_.size();
    for (std::size_t k = 1; k + 1 < breakpoints_.size(); ++k) {
      if (z < at(breakpoints_[k])) return k - 1;
    }
    return segments_.size() - 1;
  }

  std::vector<Rational> breakpoints_;
  std::vector<std::vector<Rational>> segments_;
  std::vector<std::vector<Rational>> shifted_;
};

}  // namespace gre
