#include "gre/bound.hpp"

#include <algorithm>

namespace gre {

namespace {

void require_orders(const std::vector<double>& orders) {
  if (orders.empty()) throw InvalidArgument("error bound needs at least one order");
  for (double r : orders) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("convergence orders must be positive");
  }
}

}  // namespace

ErrorBound ErrorBound::monomial(double order, std::size_t axis) {
  require_orders({order});
  return ErrorBound(Monomial{order, axis});
}

ErrorBound ErrorBound::additive(std::vector<double> weights, std::vector<double> orders) {
  require_orders(orders);
  if (weights.size() != orders.size()) {
    throw DimensionError("additive bound: weights and orders differ in length");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("additive bound weights must be positive");
  }
  return ErrorBound(AdditiveMonomials{std::move(weights), std::move(orders)});
}

ErrorBound ErrorBound::product(std::vector<double> orders) {
  require_orders(orders);
  return ErrorBound(ProductMonomials{std::move(orders)});
}

ErrorBound ErrorBound::polynomial(std::vector<Term> terms) {
  if (terms.empty()) throw InvalidArgument("polynomial bound needs at least one term");
  const std::size_t d = terms.front().powers.size();
  for (const auto& t : terms) {
    if (t.powers.size() != d || d == 0) throw DimensionError("polynomial bound terms differ in dimension");
    if (!(t.coefficient > 0.0)) throw InvalidArgument("polynomial bound coefficients must be positive");
    int degree = 0;
    for (int p : t.powers) {
      if (p < 0) throw InvalidArgument("polynomial bound powers must be nonnegative");
      degree += p;
    }
    if (degree == 0) throw InvalidArgument("polynomial bound must vanish at the origin (no constant term)");
  }
  return ErrorBound(CustomPolynomial{std::move(terms)});
}

std::size_t ErrorBound::required_dim() const {
  return std::visit(
      [](const auto& f) -> std::size_t {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Monomial>) return f.axis + 1;
        else if constexpr (std::is_same_v<F, CustomPolynomial>) return f.terms.front().powers.size();
        else return f.orders.size();
      },
      form_);
}

bool ErrorBound::accepts_dim(std::size_t d) const {
  if (std::holds_alternative<Monomial>(form_)) return d >= required_dim();
  return d == required_dim();
}

double ErrorBound::max_order() const {
  return std::visit(
      [](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Monomial>) {
          return f.order;
        } else if constexpr (std::is_same_v<F, CustomPolynomial>) {
          int best = 0;
          for (const auto& t : f.terms) {
            int deg = 0;
            for (int p : t.powers) deg += p;
            best = std::max(best, deg);
          }
          return best;
        } else {
          return *std::max_element(f.orders.begin(), f.orders.end());
        }
      },
      form_);
}

}  // namespace gre
