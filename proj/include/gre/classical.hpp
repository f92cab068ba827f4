#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace gre {

/// Values y_m = f(x_m); x is optional for value-based transforms and, when
/// present, strictly decreasing.
struct Sequence {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  bool has_x() const { return !x.empty(); }
  void validate(bool need_x = false) const;
};

/// Basis g_1..g_k of the ansatz y_m = f(0) + a_1 g_1(m) + ... + a_k g_k(m).
class BasisSpec {
 public:
  enum class Kind { RichardsonPowers, Shanks, GermainBonne, Thiele, Custom };
  using Function = std::function<double(const Sequence&, std::size_t)>;

  /// g_i(m) = x_m^{start + i - 1}, i = 1..count.
  static BasisSpec richardson_powers(std::size_t count, double start = 1.0);
  /// g_i(m) = y_{m+i} - y_{m+i-1}, i = 1..count.
  static BasisSpec shanks(std::size_t count = 1);
  /// g_i(m) = (y_{m+1} - y_m)^i, i = 1..count.
  static BasisSpec germain_bonne(std::size_t count);
  /// g_i(m) = x_m^i and g_{i+p}(m) = y_m x_m^i, i = 1..p.
  static BasisSpec thiele(std::size_t p);
  static BasisSpec custom(std::vector<Function> functions);

  Kind kind() const { return kind_; }
  /// Number of basis functions k; the linear system has k + 1 unknowns.
  std::size_t count() const;
  /// Terms beyond the window m..m+k that the basis reads.
  std::size_t lookahead() const;
  bool needs_x() const { return kind_ == Kind::RichardsonPowers || kind_ == Kind::Thiele; }
  double operator()(std::size_t i, const Sequence& seq, std::size_t m) const;

 private:
  Kind kind_ = Kind::RichardsonPowers;
  std::size_t count_ = 0;
  double start_ = 1.0;
  std::vector<Function> custom_;
};

/// Solves the ansatz at m, ..., m + k for f(0) with a column-pivoted QR
/// factorisation.
double e_algorithm(const Sequence& seq, const BasisSpec& basis, std::size_t m = 0);

/// Transformed sequence; entries whose transform is undefined are dropped
/// and their window start indices listed.
struct Transformed {
  std::vector<double> x;  ///< finest x used by each entry (empty for value-only input)
  std::vector<double> y;
  std::vector<std::size_t> start;
  std::vector<std::size_t> undefined;
};

/// Recursive elimination of x^r, x^{r+1}, ..., x^{r+depth-1}; entry m uses
/// the window m..m+depth.
Transformed richardson(const Sequence& seq, double r, std::size_t depth);
/// (y_m y_{m+2} - y_{m+1}^2) / (y_m - 2 y_{m+1} + y_{m+2}) in a cancellation
/// safe form; entries with |denominator| < 1e-14 scale are undefined.
Transformed shanks(const Sequence& seq);
/// n unknowns: f(0) and the coefficients of (y_{m+1} - y_m)^i, i < n.
double germain_bonne(const Sequence& seq, std::size_t n, std::size_t m = 0);
/// Rational extrapolation with 2p + 1 unknowns.
double thiele(const Sequence& seq, std::size_t p, std::size_t m = 0);

/// Applies `transform(seq, m)` at every admissible window start.
Transformed sliding(const Sequence& seq, std::size_t window, const std::function<double(std::size_t)>& transform);

}  // namespace gre
