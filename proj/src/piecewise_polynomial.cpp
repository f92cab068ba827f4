#include "gre/piecewise_polynomial.hpp"

#include "gre/error.hpp"

namespace gre {

namespace {

Rational horner(const std::vector<Rational>& c, const Rational& z) {
  Rational acc(0);
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * z + c[j];
  return acc;
}

Rational binomial(int n, int k) {
  Rational r(1);
  for (int i = 1; i <= k; ++i) r = r * Rational(n - k + i, i);
  return r;
}

}  // namespace

PiecewisePolynomial::PiecewisePolynomial(std::vector<Rational> breakpoints,
                                         std::vector<std::vector<Rational>> segments)
    : breakpoints_(std::move(breakpoints)), segments_(std::move(segments)) {
  if (breakpoints_.size() < 2 || segments_.size() + 1 != breakpoints_.size()) {
    throw InvalidArgument("piecewise polynomial needs one segment per breakpoint interval");
  }
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k - 1] < breakpoints_[k])) {
      throw InvalidArgument("piecewise polynomial breakpoints must be strictly ascending");
    }
  }
  // p(z) = sum_j c_j (b - w)^j = sum_i [sum_{j>=i} c_j C(j,i) b^{j-i} (-1)^i] w^i
  shifted_.resize(segments_.size());
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& c = segments_[k];
    const Rational& b = breakpoints_[k + 1];
    std::vector<Rational> q(c.size(), Rational(0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      Rational bp(1);
      for (std::size_t i = j + 1; i-- > 0;) {
        const int ji = static_cast<int>(j);
        const int ii = static_cast<int>(i);
        q[i] += c[j] * binomial(ji, ii) * bp * ((i % 2 == 0) ? 1 : -1);
        bp *= b;
      }
    }
    shifted_[k] = std::move(q);
  }
}

PiecewisePolynomial PiecewisePolynomial::truncated_power(int m) {
  if (m < 0) throw InvalidArgument("truncated power exponent must be nonnegative");
  std::vector<Rational> c(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    c[static_cast<std::size_t>(j)] = binomial(m, j) * ((j % 2 == 0) ? 1 : -1);
  }
  return PiecewisePolynomial({Rational(0), Rational(1)}, {std::move(c)});
}

PiecewisePolynomial PiecewisePolynomial::integrate_tail() const {
  // On segment k the result is P_k(b_{k+1}) - P_k(z) + tail_{k+1}, with P_k an
  // antiderivative of t p_k(t).
  const std::size_t K = segments_.size();
  std::vector<std::vector<Rational>> antider(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& c = segments_[k];
    std::vector<Rational> a(c.size() + 2, Rational(0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      a[j + 2] = c[j] / Rational(static_cast<std::int64_t>(j) + 2);
    }
    antider[k] = std::move(a);
  }
  std::vector<std::vector<Rational>> out(K);
  Rational tail(0);
  for (std::size_t k = K; k-- > 0;) {
    const auto& a = antider[k];
    const Rational top = horner(a, breakpoints_[k + 1]);
    std::vector<Rational> seg(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) seg[j] = -a[j];
    seg[0] += top + tail;
    tail += top - horner(a, breakpoints_[k]);
    out[k] = std::move(seg);
  }
  return PiecewisePolynomial(breakpoints_, std::move(out));
}

Rational PiecewisePolynomial::exact(const Rational& z) const {
  if (!(z < breakpoints_.back())) return Rational(0);
  std::size_t k = segments_.size() - 1;
  for (std::size_t i = 1; i + 1 < breakpoints_.size(); ++i) {
    if (z < breakpoints_[i]) {
      k = i - 1;
      break;
    }
  }
  return horner(segments_[k], z);
}

}  // namespace gre
