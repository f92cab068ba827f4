#pragma once

#include <memory>
#include <span>
#include <string>

namespace gre {

/// Arithmetic expression in the fidelity variables x1..xd: numbers, + - * /,
/// ^ (right associative), unary minus, parentheses and the functions exp,
/// log, sqrt, abs.
class Expression {
 public:
  explicit Expression(const std::string& text);
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);

  double operator()(std::span<const double> x) const;
  /// Largest variable index referenced (0 when the expression is constant).
  std::size_t max_variable() const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace gre
