#pragma once

// Closed-form scalar expressions in the variables `lambda` (alias `l`) and
// `t`, used by spec files. Grammar:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' unary)?            right associative
//   atom   := number | 'pi' | variable | func '(' expr ')' | '(' expr ')'
//   func   := sin cos tan exp log sqrt atan abs

#include <memory>
#include <string>

namespace sflow {

class Expr {
 public:
  enum class Var { lambda, t };

  /// Throws InvalidInput on a syntax error or unknown identifier.
  static Expr parse(const std::string& text);
  static Expr constant(double c);

  double eval(double lambda, double t = 0.0) const;
  Expr derivative(Var v) const;
  bool depends_on(Var v) const;
  std::string to_string() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace sflow
