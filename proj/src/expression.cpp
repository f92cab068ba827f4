#include "gre/expression.hpp"

#include "gre/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace gre {

struct Expression::Node {
  enum class Op { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sqrt, Abs };
  Op op = Op::Number;
  double value = 0.0;
  std::size_t variable = 0;
  std::shared_ptr<const Node> a, b;

  double eval(std::span<const double> x) const {
    switch (op) {
      case Op::Number: return value;
      case Op::Variable:
        if (variable == 0 || variable > x.size()) {
          throw DimensionError("expression refers to x" + std::to_string(variable) + " but the point has " +
                               std::to_string(x.size()) + " components");
        }
        return x[variable - 1];
      case Op::Neg: return -a->eval(x);
      case Op::Add: return a->eval(x) + b->eval(x);
      case Op::Sub: return a->eval(x) - b->eval(x);
      case Op::Mul: return a->eval(x) * b->eval(x);
      case Op::Div: return a->eval(x) / b->eval(x);
      case Op::Pow: return std::pow(a->eval(x), b->eval(x));
      case Op::Exp: return std::exp(a->eval(x));
      case Op::Log: return std::log(a->eval(x));
      case Op::Sqrt: return std::sqrt(a->eval(x));
      case Op::Abs: return std::abs(a->eval(x));
    }
    return 0.0;
  }

  std::size_t max_variable() const {
    std::size_t m = op == Op::Variable ? variable : 0;
    if (a) m = std::max(m, a->max_variable());
    if (b) m = std::max(m, b->max_variable());
    return m;
  }
};

namespace {

using Node = Expression::Node;
using Ptr = std::shared_ptr<const Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Ptr parse() {
    Ptr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + s_ + "' at offset " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static Ptr make(Node::Op op, Ptr a, Ptr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  Ptr sum() {
    Ptr lhs = product();
    for (;;) {
      if (eat('+')) {
        lhs = make(Node::Op::Add, lhs, product());
      } else if (eat('-')) {
        lhs = make(Node::Op::Sub, lhs, product());
      } else {
        return lhs;
      }
    }
  }

  Ptr product() {
    Ptr lhs = unary();
    for (;;) {
      if (eat('*')) {
        lhs = make(Node::Op::Mul, lhs, unary());
      } else if (eat('/')) {
        lhs = make(Node::Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Ptr unary() {
    if (eat('-')) return make(Node::Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  Ptr power() {
    Ptr base = atom();
    if (eat('^')) return make(Node::Op::Pow, base, unary());
    return base;
  }

  Ptr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      Ptr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) name += s_[pos_++];
      if (name.size() > 1 && name[0] == 'x' && name.find_first_not_of("0123456789", 1) == std::string::npos) {
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Variable;
        n->variable = std::stoul(name.substr(1));
        if (n->variable == 0) fail("variables are numbered from x1");
        return n;
      }
      Node::Op op;
      if (name == "exp") {
        op = Node::Op::Exp;
      } else if (name == "log") {
        op = Node::Op::Log;
      } else if (name == "sqrt") {
        op = Node::Op::Sqrt;
      } else if (name == "abs") {
        op = Node::Op::Abs;
      } else {
        fail("unknown name '" + name + "'");
      }
      if (!eat('(')) fail("expected '(' after " + name);
      Ptr arg = sum();
      if (!eat(')')) fail("expected ')'");
      return make(op, arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text_).parse()) {}
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;

double Expression::operator()(std::span<const double> x) const { return root_->eval(x); }

std::size_t Expression::max_variable() const { return root_->max_variable(); }

}  // namespace gre
