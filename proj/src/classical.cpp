#include "gre/classical.hpp"

#include "gre/error.hpp"
#include "gre/scalar.hpp"

#include <Eigen/QR>

#include <cmath>

namespace gre {

void Sequence::validate(bool need_x) const {
  if (y.empty()) throw InvalidArgument("sequence is empty");
  if (need_x && x.empty()) throw InvalidArgument("this transform needs the discretisation parameters x");
  if (!x.empty()) {
    if (x.size() != y.size()) throw DimensionError("sequence x and y differ in length");
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (x[i] == x[i - 1]) throw InvalidArgument("sequence has repeated x values");
      if (!(x[i] < x[i - 1])) throw InvalidArgument("sequence x must be strictly decreasing");
    }
  }
}

BasisSpec BasisSpec::richardson_powers(std::size_t count, double start) {
  if (!(start > 0.0)) throw InvalidArgument("Richardson powers must start at a positive exponent");
  BasisSpec b;
  b.kind_ = Kind::RichardsonPowers;
  b.count_ = count;
  b.start_ = start;
  return b;
}

BasisSpec BasisSpec::shanks(std::size_t count) {
  BasisSpec b;
  b.kind_ = Kind::Shanks;
  b.count_ = count;
  return b;
}

BasisSpec BasisSpec::germain_bonne(std::size_t count) {
  BasisSpec b;
  b.kind_ = Kind::GermainBonne;
  b.count_ = count;
  return b;
}

BasisSpec BasisSpec::thiele(std::size_t p) {
  BasisSpec b;
  b.kind_ = Kind::Thiele;
  b.count_ = p;
  return b;
}

BasisSpec BasisSpec::custom(std::vector<Function> functions) {
  BasisSpec b;
  b.kind_ = Kind::Custom;
  b.count_ = functions.size();
  b.custom_ = std::move(functions);
  return b;
}

std::size_t BasisSpec::count() const { return kind_ == Kind::Thiele ? 2 * count_ : count_; }

std::size_t BasisSpec::lookahead() const {
  switch (kind_) {
    case Kind::Shanks: return count_ > 0 ? 1 : 0;
    case Kind::GermainBonne: return count_ > 0 ? 1 : 0;
    default: return 0;
  }
}

double BasisSpec::operator()(std::size_t i, const Sequence& seq, std::size_t m) const {
  switch (kind_) {
    case Kind::RichardsonPowers: return std::pow(seq.x[m], start_ + static_cast<double>(i) - 1.0);
    case Kind::Shanks: return seq.y[m + i] - seq.y[m + i - 1];
    case Kind::GermainBonne: return std::pow(seq.y[m + 1] - seq.y[m], static_cast<double>(i));
    case Kind::Thiele: {
      if (i <= count_) return std::pow(seq.x[m], static_cast<double>(i));
      return seq.y[m] * std::pow(seq.x[m], static_cast<double>(i - count_));
    }
    case Kind::Custom: return custom_[i - 1](seq, m);
  }
  return 0.0;
}

double e_algorithm(const Sequence& seq, const BasisSpec& basis, std::size_t m) {
  seq.validate(basis.needs_x());
  const std::size_t k = basis.count();
  const std::size_t need = m + k + 1 + basis.lookahead();
  if (seq.size() < need) {
    throw InvalidArgument("sequence too short: the basis needs " + std::to_string(need) + " terms, got " +
                          std::to_string(seq.size()));
  }
  if (k == 0) return seq.y[m];
  const auto n = static_cast<Eigen::Index>(k + 1);
  MatrixXd A(n, n);
  VectorXd rhs(n);
  for (Eigen::Index row = 0; row < n; ++row) {
    const std::size_t j = m + static_cast<std::size_t>(row);
    A(row, 0) = 1.0;
    for (std::size_t i = 1; i <= k; ++i) A(row, static_cast<Eigen::Index>(i)) = basis(i, seq, j);
    rhs(row) = seq.y[j];
  }
  // Column equilibration so the rank test sees the basis geometry, not its scale.
  VectorXd scale(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    scale(c) = A.col(c).cwiseAbs().maxCoeff();
    if (!(scale(c) > 0.0) || !std::isfinite(scale(c))) {
      throw DegenerateBasisError("basis function " + std::to_string(c) + " vanishes on the window");
    }
    A.col(c) /= scale(c);
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
  qr.setThreshold(1e-13);
  if (qr.rank() < n) throw DegenerateBasisError("extrapolation system is singular for this basis and window");
  const VectorXd sol = qr.solve(rhs);
  return sol(0) / scale(0);
}

Transformed richardson(const Sequence& seq, double r, std::size_t depth) {
  seq.validate(true);
  if (seq.size() < 2) throw InvalidArgument("Richardson extrapolation needs at least two terms");
  if (depth == 0 || depth >= seq.size()) throw InvalidArgument("Richardson depth must lie in [1, length - 1]");
  if (!(r > 0.0)) throw InvalidArgument("Richardson order must be positive");
  // E-algorithm recursion: E_k(m) eliminates g_k using rows m and m + 1;
  // g[i][m] holds the basis function i after k eliminations.
  const std::size_t N = seq.size();
  std::vector<double> E(seq.y);
  std::vector<std::vector<double>> g(depth, std::vector<double>(N));
  for (std::size_t i = 0; i < depth; ++i) {
    for (std::size_t m = 0; m < N; ++m) g[i][m] = std::pow(seq.x[m], r + static_cast<double>(i));
  }
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t len = N - k - 1;
    std::vector<double> En(len);
    std::vector<std::vector<double>> gn(depth, std::vector<double>(len));
    for (std::size_t m = 0; m < len; ++m) {
      const double a = g[k][m], b = g[k][m + 1];
      const double den = b - a;
      if (den == 0.0) throw DegenerateBasisError("Richardson tableau hit a zero denominator");
      En[m] = (E[m] * b - E[m + 1] * a) / den;
      for (std::size_t i = k + 1; i < depth; ++i) gn[i][m] = (g[i][m] * b - g[i][m + 1] * a) / den;
    }
    E = std::move(En);
    g = std::move(gn);
  }
  Transformed out;
  for (std::size_t m = 0; m < E.size(); ++m) {
    out.x.push_back(seq.x[m + depth]);
    out.y.push_back(E[m]);
    out.start.push_back(m);
  }
  return out;
}

Transformed shanks(const Sequence& seq) {
  seq.validate(false);
  if (seq.size() < 3) throw InvalidArgument("the Shanks transformation needs at least three terms");
  Transformed out;
  for (std::size_t m = 0; m + 2 < seq.size(); ++m) {
    const double a = seq.y[m], b = seq.y[m + 1], c = seq.y[m + 2];
    const double d2 = a - 2.0 * b + c;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (!(std::abs(d2) >= 1e-14 * scale) || d2 == 0.0) {
      out.undefined.push_back(m);
      continue;
    }
    const double d1 = c - b;
    out.y.push_back(c - d1 * d1 / d2);
    if (seq.has_x()) out.x.push_back(seq.x[m + 2]);
    out.start.push_back(m);
  }
  return out;
}

double germain_bonne(const Sequence& seq, std::size_t n, std::size_t m) {
  if (n == 0) throw InvalidArgument("Germain-Bonne order must be at least 1");
  return e_algorithm(seq, BasisSpec::germain_bonne(n - 1), m);
}

double thiele(const Sequence& seq, std::size_t p, std::size_t m) {
  return e_algorithm(seq, BasisSpec::thiele(p), m);
}

Transformed sliding(const Sequence& seq, std::size_t window, const std::function<double(std::size_t)>& transform) {
  Transformed out;
  for (std::size_t m = 0; m + window <= seq.size(); ++m) {
    try {
      const double v = transform(m);
      out.y.push_back(v);
      if (seq.has_x()) out.x.push_back(seq.x[m + window - 1]);
      out.start.push_back(m);
    } catch (const DegenerateBasisError&) {
      out.undefined.push_back(m);
    }
  }
  return out;
}

}  // namespace gre
