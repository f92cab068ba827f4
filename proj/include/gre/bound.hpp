#pragma once

#include "gre/error.hpp"

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gre {

/// Error bound b with b(0) = 0 and b(x) > 0 whenever every component of x is
/// positive. All orders are strictly positive.
class ErrorBound {
 public:
  struct Monomial {
    double order;
    std::size_t axis;
  };
  struct AdditiveMonomials {
    std::vector<double> weights;
    std::vector<double> orders;
  };
  struct ProductMonomials {
    std::vector<double> orders;
  };
  struct Term {
    double coefficient;
    std::vector<int> powers;
  };
  struct CustomPolynomial {
    std::vector<Term> terms;
  };
  using Form = std::variant<Monomial, AdditiveMonomials, ProductMonomials, CustomPolynomial>;

  static ErrorBound monomial(double order, std::size_t axis = 0);
  static ErrorBound additive(std::vector<double> weights, std::vector<double> orders);
  static ErrorBound product(std::vector<double> orders);
  static ErrorBound polynomial(std::vector<Term> terms);

  const Form& form() const { return form_; }

  /// Dimension the bound is defined on; a monomial accepts any d > axis.
  std::size_t required_dim() const;
  bool accepts_dim(std::size_t d) const;
  /// Largest convergence order appearing in the bound (total degree for polynomials).
  double max_order() const;

  template <typename T>
  T operator()(std::span<const T> x) const {
    using std::pow;
    return std::visit(
        [&](const auto& f) -> T {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Monomial>) {
            check(x.size() > f.axis);
            return pow(x[f.axis], T(f.order));
          } else if constexpr (std::is_same_v<F, AdditiveMonomials>) {
            check(x.size() == f.orders.size());
            T acc(0);
            for (std::size_t i = 0; i < x.size(); ++i) acc += T(f.weights[i]) * pow(x[i], T(f.orders[i]));
            return acc;
          } else if constexpr (std::is_same_v<F, ProductMonomials>) {
            check(x.size() == f.orders.size());
            T acc(1);
            for (std::size_t i = 0; i < x.size(); ++i) acc *= pow(x[i], T(f.orders[i]));
            return acc;
          } else {
            T acc(0);
            for (const auto& term : f.terms) {
              check(x.size() == term.powers.size());
              T t(term.coefficient);
              for (std::size_t i = 0; i < x.size(); ++i) {
                for (int k = 0; k < term.powers[i]; ++k) t *= x[i];
              }
              acc += t;
            }
            return acc;
          }
        },
        form_);
  }

  double operator()(std::span<const double> x) const { return operator()<double>(x); }

 private:
  explicit ErrorBound(Form f) : form_(std::move(f)) {}
  static void check(bool ok) {
    if (!ok) throw DimensionError("error bound: point dimension disagrees with the bound");
  }
  Form form_;
};

inline double bound_eval(const ErrorBound& b, std::span<const double> x) { return b(x); }

}  // namespace gre
