#include "riemann/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

namespace riemann {

namespace {
using cplx = std::complex<double>;

constexpr std::array<const char*, 11> kFunctions = {
    "sin", "cos", "tan", "arctan", "exp", "ln", "sqrt", "abs", "re", "im", "conj"};

bool is_function(const std::string& name) {
  for (const char* f : kFunctions)
    if (name == f) return true;
  return false;
}

bool finite_c(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}
}  // namespace

struct Expression::Node {
  enum class Kind { Literal, Variable, Add, Sub, Mul, Div, Neg, Pow, Call };
  Kind kind;
  cplx value{};       // Literal
  std::string name;   // Variable / Call target
  std::shared_ptr<const Node> a, b;
};

namespace {
using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr literal(cplx v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Literal;
  n->value = v;
  return n;
}

NodePtr variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Variable;
  n->name = std::move(name);
  return n;
}

NodePtr binary(Node::Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr unary(Node::Kind k, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

NodePtr call(std::string fn, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Call;
  n->name = std::move(fn);
  n->a = std::move(a);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Node::Kind::Literal && n->value == cplx(v, 0.0);
}

// Constructors that fold additive/multiplicative identities so derivative
// trees stay small enough to evaluate cheaply.
NodePtr mk_add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return binary(Node::Kind::Add, std::move(a), std::move(b));
}
NodePtr mk_sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return unary(Node::Kind::Neg, std::move(b));
  return binary(Node::Kind::Sub, std::move(a), std::move(b));
}
NodePtr mk_mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return literal(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return binary(Node::Kind::Mul, std::move(a), std::move(b));
}
NodePtr mk_div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return literal(0.0);
  if (is_const(b, 1.0)) return a;
  return binary(Node::Kind::Div, std::move(a), std::move(b));
}
NodePtr mk_pow(NodePtr a, NodePtr b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return literal(1.0);
  return binary(Node::Kind::Pow, std::move(a), std::move(b));
}

cplx int_pow(cplx base, long long e) {
  if (e < 0) return 1.0 / int_pow(base, -e);
  cplx acc(1.0, 0.0), p = base;
  while (e > 0) {
    if (e & 1) acc *= p;
    p *= p;
    e >>= 1;
  }
  return acc;
}

cplx eval_node(const Node& n, const Expression::Env& env) {
  switch (n.kind) {
    case Node::Kind::Literal:
      return n.value;
    case Node::Kind::Variable: {
      if (n.name == "i") return cplx(0.0, 1.0);
      if (n.name == "pi") return cplx(3.14159265358979323846, 0.0);
      auto it = env.find(n.name);
      if (it == env.end()) throw eval_error("unbound variable '" + n.name + "'");
      return it->second;
    }
    default:
      break;
  }
  const cplx a = eval_node(*n.a, env);
  cplx r;
  switch (n.kind) {
    case Node::Kind::Neg:
      r = -a;
      break;
    case Node::Kind::Add:
      r = a + eval_node(*n.b, env);
      break;
    case Node::Kind::Sub:
      r = a - eval_node(*n.b, env);
      break;
    case Node::Kind::Mul:
      r = a * eval_node(*n.b, env);
      break;
    case Node::Kind::Div: {
      const cplx b = eval_node(*n.b, env);
      if (b == cplx(0.0, 0.0)) throw eval_error("division by zero");
      r = a / b;
      break;
    }
    case Node::Kind::Pow: {
      const cplx b = eval_node(*n.b, env);
      const double br = b.real();
      if (b.imag() == 0.0 && br == std::floor(br) && std::abs(br) <= 64.0) {
        if (a == cplx(0.0, 0.0)) {
          if (br > 0.0) {
            r = 0.0;
            break;
          }
          throw eval_error("zero raised to a non-positive power");
        }
        r = int_pow(a, static_cast<long long>(br));
      } else {
        if (a == cplx(0.0, 0.0)) throw eval_error("zero raised to a non-real-integer power");
        r = std::pow(a, b);
      }
      break;
    }
    case Node::Kind::Call: {
      const std::string& f = n.name;
      if (f == "sin") r = std::sin(a);
      else if (f == "cos") r = std::cos(a);
      else if (f == "tan") r = std::tan(a);
      else if (f == "arctan") r = std::atan(a);
      else if (f == "exp") r = std::exp(a);
      else if (f == "ln") {
        if (a == cplx(0.0, 0.0)) throw eval_error("ln(0)");
        r = std::log(a);
      } else if (f == "sqrt") r = std::sqrt(a);
      else if (f == "abs") r = cplx(std::abs(a), 0.0);
      else if (f == "re") r = cplx(a.real(), 0.0);
      else if (f == "im") r = cplx(a.imag(), 0.0);
      else if (f == "conj") r = std::conj(a);
      else throw eval_error("unknown function '" + f + "'");
      break;
    }
    default:
      throw eval_error("corrupt expression node");
  }
  if (!finite_c(r)) throw eval_error("non-finite result");
  return r;
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Literal:
      if (n.value.imag() == 0.0) {
        if (n.value.real() < 0.0) {
          out += "(" + fmt(n.value.real()) + ")";
        } else {
          out += fmt(n.value.real());
        }
      } else {
        out += "((" + fmt(n.value.real()) + ") + (" + fmt(n.value.imag()) + ") * i)";
      }
      return;
    case Node::Kind::Variable:
      out += n.name;
      return;
    case Node::Kind::Neg:
      out += "(-";
      print_node(*n.a, out);
      out += ")";
      return;
    case Node::Kind::Call:
      out += n.name + "(";
      print_node(*n.a, out);
      out += ")";
      return;
    default:
      break;
  }
  const char* op = nullptr;
  switch (n.kind) {
    case Node::Kind::Add: op = " + "; break;
    case Node::Kind::Sub: op = " - "; break;
    case Node::Kind::Mul: op = " * "; break;
    case Node::Kind::Div: op = " / "; break;
    case Node::Kind::Pow: op = " ^ "; break;
    default: op = " ? "; break;
  }
  out += "(";
  print_node(*n.a, out);
  out += op;
  print_node(*n.b, out);
  out += ")";
}

void collect_vars(const Node& n, std::set<std::string>& out) {
  if (n.kind == Node::Kind::Variable) {
    if (n.name != "i" && n.name != "pi") out.insert(n.name);
    return;
  }
  if (n.a) collect_vars(*n.a, out);
  if (n.b) collect_vars(*n.b, out);
}

bool depends_on(const Node& n, const std::string& var) {
  if (n.kind == Node::Kind::Variable) return n.name == var;
  return (n.a && depends_on(*n.a, var)) || (n.b && depends_on(*n.b, var));
}

NodePtr diff_node(const NodePtr& n, const std::string& var) {
  switch (n->kind) {
    case Node::Kind::Literal:
      return literal(0.0);
    case Node::Kind::Variable:
      return literal(n->name == var ? 1.0 : 0.0);
    case Node::Kind::Neg:
      return unary(Node::Kind::Neg, diff_node(n->a, var));
    case Node::Kind::Add:
      return mk_add(diff_node(n->a, var), diff_node(n->b, var));
    case Node::Kind::Sub:
      return mk_sub(diff_node(n->a, var), diff_node(n->b, var));
    case Node::Kind::Mul:
      return mk_add(mk_mul(diff_node(n->a, var), n->b), mk_mul(n->a, diff_node(n->b, var)));
    case Node::Kind::Div:
      return mk_sub(mk_div(diff_node(n->a, var), n->b),
                    mk_div(mk_mul(n->a, diff_node(n->b, var)), mk_pow(n->b, literal(2.0))));
    case Node::Kind::Pow: {
      const NodePtr da = diff_node(n->a, var);
      if (!depends_on(*n->b, var)) {
        // d a^c = c a^{c-1} da
        NodePtr cm1 = (n->b->kind == Node::Kind::Literal)
                          ? literal(n->b->value - cplx(1.0, 0.0))
                          : mk_sub(n->b, literal(1.0));
        return mk_mul(mk_mul(n->b, mk_pow(n->a, std::move(cm1))), da);
      }
      // d a^b = a^b (db ln a + b da / a)
      const NodePtr db = diff_node(n->b, var);
      return mk_mul(n, mk_add(mk_mul(db, call("ln", n->a)), mk_div(mk_mul(n->b, da), n->a)));
    }
    case Node::Kind::Call: {
      const std::string& f = n->name;
      if (f == "abs" || f == "re" || f == "im" || f == "conj") {
        if (!depends_on(*n->a, var)) return literal(0.0);
        throw eval_error("cannot differentiate through non-holomorphic '" + f + "'");
      }
      const NodePtr da = diff_node(n->a, var);
      NodePtr outer;
      if (f == "sin") outer = call("cos", n->a);
      else if (f == "cos") outer = unary(Node::Kind::Neg, call("sin", n->a));
      else if (f == "tan") outer = mk_div(literal(1.0), mk_pow(call("cos", n->a), literal(2.0)));
      else if (f == "arctan")
        outer = mk_div(literal(1.0), mk_add(literal(1.0), mk_pow(n->a, literal(2.0))));
      else if (f == "exp") outer = call("exp", n->a);
      else if (f == "ln") outer = mk_div(literal(1.0), n->a);
      else if (f == "sqrt") outer = mk_div(literal(0.5), call("sqrt", n->a));
      else throw eval_error("unknown function '" + f + "'");
      return mk_mul(std::move(outer), da);
    }
    default:
      throw eval_error("corrupt expression node");
  }
}

// --- recursive-descent parser -------------------------------------------

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw syntax_error("unexpected trailing input", pos_);
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek_is(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      if (consume('+')) left = binary(Node::Kind::Add, std::move(left), term());
      else if (consume('-')) left = binary(Node::Kind::Sub, std::move(left), term());
      else return left;
    }
  }

  NodePtr term() {
    NodePtr left = unaryp();
    for (;;) {
      if (consume('*')) left = binary(Node::Kind::Mul, std::move(left), unaryp());
      else if (consume('/')) left = binary(Node::Kind::Div, std::move(left), unaryp());
      else return left;
    }
  }

  NodePtr unaryp() {
    if (consume('-')) return unary(Node::Kind::Neg, unaryp());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (consume('^')) return binary(Node::Kind::Pow, std::move(base), unaryp());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw syntax_error("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!consume(')')) throw syntax_error("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw syntax_error(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    bool any_digit = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
      any_digit = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        any_digit = true;
      }
    }
    if (!any_digit) throw syntax_error("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        pos_ = mark;  // 'e' belongs to a following identifier, not this number
      } else {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    return literal(cplx(std::stod(s_.substr(start, pos_ - start)), 0.0));
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (peek_is('(')) {
      if (!is_function(name)) throw syntax_error("unknown function '" + name + "'", start);
      ++pos_;  // '('
      NodePtr arg = expr();
      if (!consume(')')) throw syntax_error("expected ')'", pos_);
      return call(std::move(name), std::move(arg));
    }
    return variable(std::move(name));
  }
};

}  // namespace

Expression::Expression() : root_(literal(0.0)) {}
Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

std::complex<double> Expression::eval(const Env& env) const { return eval_node(*root_, env); }

std::string Expression::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

std::set<std::string> Expression::variables() const {
  std::set<std::string> out;
  collect_vars(*root_, out);
  return out;
}

Expression parse_expression(const std::string& text) { return Expression(Parser(text).run()); }

Expression parse_expression(const std::string& text, const std::set<std::string>& allowed) {
  Expression e = parse_expression(text);
  for (const std::string& v : e.variables()) {
    if (!allowed.count(v))
      throw syntax_error("unknown identifier '" + v + "'", text.find(v));
  }
  return e;
}

Expression differentiate(const Expression& e, const std::string& var) {
  return Expression(diff_node(e.root_, var));
}

}  // namespace riemann
