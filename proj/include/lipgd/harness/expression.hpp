#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace lipgd::harness {

class ExpressionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Scalar expression in one variable `x`.
///
/// Grammar: numbers, x, pi, e, + - * / ^ (right associative), unary minus,
/// parentheses and the functions sin cos tan exp log sqrt abs tanh.
class Expression {
public:
  static Expression parse(const std::string& text);

  double operator()(double x) const;
  const std::string& text() const { return text_; }

  struct Node;

private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace lipgd::harness
