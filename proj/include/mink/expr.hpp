#ifndef MINK_EXPR_HPP
#define MINK_EXPR_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mink {

// Value, gradient and Hessian of a scalar field at one point. The Hessian
// is stored dense row-major and is symmetric bit-exactly (each mixed entry
// is computed once and mirrored).
struct Jet {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> hessian;  // n*n, row-major

  int dim() const { return static_cast<int>(gradient.size()); }
  double hess(int i, int j) const { return hessian[static_cast<std::size_t>(i) * gradient.size() + j]; }
  double laplacian() const;
  double gradient_norm_sq() const;
  double gradient_norm() const;
};

// A parsed closed-form scalar field psi(u1,...,un). Immutable after parse;
// evaluation is pure and reentrant.
//
// Grammar (closed, no user functions):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('-'|'+') unary | power
//   power  := atom ['^' unary]          exponent must fold to a constant
//   atom   := number | var | func '(' expr ')' | '(' expr ')'
//   var    := 'u' integer in [1, n]
//   func   := sqrt | exp | log | sin | cos | sinh | cosh | asinh
class Expression {
 public:
  enum class Kind : unsigned char {
    Constant, Variable, Add, Sub, Mul, Div, Neg, Pow,
    Sqrt, Exp, Log, Sin, Cos, Sinh, Cosh, Asinh
  };

  struct Node {
    Kind kind;
    double constant = 0.0;  // Constant value or Pow exponent
    int var = -1;           // Variable index, 0-based
    int a = -1;             // left / only child
    int b = -1;             // right child
  };

  int arity() const { return arity_; }

  // Canonical fully parenthesized text; parse(render()) reproduces an ast
  // that evaluates bit-identically.
  std::string render() const;
  std::string render_subterm(int node) const;

  double value(std::span<const double> point) const;
  Jet jet(std::span<const double> point) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

  friend Expression parse(std::string_view text, int arity);

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
  int arity_ = 0;
};

// Parses infix text over the grammar above. Throws ParseError with the
// offending position; rejects unknown identifiers and variable indices
// outside [1, arity].
Expression parse(std::string_view text, int arity);

// Exact value/gradient/Hessian by second-order forward AD (hyper-dual
// pairs, n(n+1)/2 passes). Throws EvalDomainError naming the subterm on
// domain violations.
Jet evaluate_jet(const Expression& expr, std::span<const double> point);

}  // namespace mink

#endif  // MINK_EXPR_HPP
