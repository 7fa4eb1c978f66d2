#pragma once

#include <complex>
#include <map>
#include <memory>
#include <set>
#include <string>

#include "riemann/errors.hpp"

namespace riemann {

// Immutable arithmetic expression over complex scalars.
//
// Grammar: literals, named variables, + - * / unary-minus, ^ (right-assoc,
// binds tighter than unary minus), and the functions
//   sin cos tan arctan exp ln sqrt abs re im conj.
// The identifiers `i` (imaginary unit) and `pi` are built-in constants.
//
// Evaluation is complex throughout; division by an exact zero, ln(0) and
// non-finite results are eval_errors rather than silent Inf/NaN.
class Expression {
 public:
  using Env = std::map<std::string, std::complex<double>>;

  Expression();  // the constant 0

  std::complex<double> eval(const Env& env) const;

  // Fully parenthesized text form; parse(print(e)) evaluates identically to e.
  std::string print() const;

  // Free variable names (excludes the built-in constants).
  std::set<std::string> variables() const;

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> root);
  std::shared_ptr<const Node> root_;

  friend Expression parse_expression(const std::string&);
  friend Expression differentiate(const Expression&, const std::string&);
};

// Parse; throws syntax_error with a 0-based byte offset on malformed input and
// on unknown function names. Variable names are resolved at evaluation time.
Expression parse_expression(const std::string& text);

// Structural derivative d/d`var`. Defined on the holomorphic fragment of the
// grammar; abs/re/im/conj subtrees are admitted only when they do not depend
// on `var` (they differentiate to zero), otherwise eval_error.
Expression differentiate(const Expression& e, const std::string& var);

// Parse and additionally reject free variables outside `allowed` (the built-in
// constants are always allowed); the error names the offending identifier.
Expression parse_expression(const std::string& text, const std::set<std::string>& allowed);

}  // namespace riemann
