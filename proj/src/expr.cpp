#include "sflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sflow/errors.hpp"

namespace sflow {

enum class Op { num, var_l, var_t, add, sub, mul, div, pow, neg, sin, cos, tan, exp, log, sqrt, atan, abs };

struct Expr::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;

NodeP make(Op op, NodeP a = nullptr, NodeP b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodeP num(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::num;
  n->value = v;
  return n;
}

bool is_num(const NodeP& n, double v) { return n->op == Op::num && n->value == v; }

// Constructors with light constant folding so derivatives stay readable.
NodeP add(NodeP a, NodeP b) {
  if (is_num(a, 0)) return b;
  if (is_num(b, 0)) return a;
  if (a->op == Op::num && b->op == Op::num) return num(a->value + b->value);
  return make(Op::add, a, b);
}
NodeP sub(NodeP a, NodeP b) {
  if (is_num(b, 0)) return a;
  if (a->op == Op::num && b->op == Op::num) return num(a->value - b->value);
  if (is_num(a, 0)) return make(Op::neg, b);
  return make(Op::sub, a, b);
}
NodeP mul(NodeP a, NodeP b) {
  if (is_num(a, 0) || is_num(b, 0)) return num(0);
  if (is_num(a, 1)) return b;
  if (is_num(b, 1)) return a;
  if (a->op == Op::num && b->op == Op::num) return num(a->value * b->value);
  return make(Op::mul, a, b);
}
NodeP divide(NodeP a, NodeP b) {
  if (is_num(a, 0)) return num(0);
  if (is_num(b, 1)) return a;
  return make(Op::div, a, b);
}
NodeP neg(NodeP a) {
  if (a->op == Op::num) return num(-a->value);
  if (a->op == Op::neg) return a->a;
  return make(Op::neg, a);
}
NodeP power(NodeP a, NodeP b) {
  if (is_num(b, 0)) return num(1);
  if (is_num(b, 1)) return a;
  return make(Op::pow, a, b);
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodeP run() {
    NodeP e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput("expression \"" + s_ + "\": " + msg + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodeP expr() {
    NodeP e = term();
    for (;;) {
      if (accept('+')) e = make(Op::add, e, term());
      else if (accept('-')) e = make(Op::sub, e, term());
      else return e;
    }
  }
  NodeP term() {
    NodeP e = unary();
    for (;;) {
      if (accept('*')) e = make(Op::mul, e, unary());
      else if (accept('/')) e = make(Op::div, e, unary());
      else return e;
    }
  }
  NodeP unary() {
    if (accept('-')) return make(Op::neg, unary());
    if (accept('+')) return unary();
    return pow();
  }
  NodeP pow() {
    NodeP base = atom();
    if (accept('^')) return make(Op::pow, base, unary());
    return base;
  }
  NodeP atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodeP e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return num(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "pi") return num(std::numbers::pi);
      if (id == "lambda" || id == "l") return make(Op::var_l);
      if (id == "t") return make(Op::var_t);
      static const std::pair<const char*, Op> funcs[] = {{"sin", Op::sin},   {"cos", Op::cos},   {"tan", Op::tan},
                                                         {"exp", Op::exp},   {"log", Op::log},   {"sqrt", Op::sqrt},
                                                         {"atan", Op::atan}, {"abs", Op::abs}};
      for (const auto& [name, op] : funcs) {
        if (id == name) {
          if (!accept('(')) fail("expected '(' after " + id);
          NodeP arg = expr();
          if (!accept(')')) fail("expected ')'");
          return make(op, arg);
        }
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node& n, double l, double t) {
  switch (n.op) {
    case Op::num: return n.value;
    case Op::var_l: return l;
    case Op::var_t: return t;
    case Op::add: return eval_node(*n.a, l, t) + eval_node(*n.b, l, t);
    case Op::sub: return eval_node(*n.a, l, t) - eval_node(*n.b, l, t);
    case Op::mul: return eval_node(*n.a, l, t) * eval_node(*n.b, l, t);
    case Op::div: return eval_node(*n.a, l, t) / eval_node(*n.b, l, t);
    case Op::pow: return std::pow(eval_node(*n.a, l, t), eval_node(*n.b, l, t));
    case Op::neg: return -eval_node(*n.a, l, t);
    case Op::sin: return std::sin(eval_node(*n.a, l, t));
    case Op::cos: return std::cos(eval_node(*n.a, l, t));
    case Op::tan: return std::tan(eval_node(*n.a, l, t));
    case Op::exp: return std::exp(eval_node(*n.a, l, t));
    case Op::log: return std::log(eval_node(*n.a, l, t));
    case Op::sqrt: return std::sqrt(eval_node(*n.a, l, t));
    case Op::atan: return std::atan(eval_node(*n.a, l, t));
    case Op::abs: return std::abs(eval_node(*n.a, l, t));
  }
  return 0.0;
}

bool depends(const NodeP& n, Op var) {
  if (!n) return false;
  if (n->op == var) return true;
  return depends(n->a, var) || depends(n->b, var);
}

NodeP diff(const NodeP& n, Op var) {
  if (!depends(n, var)) return num(0);
  const NodeP& a = n->a;
  const NodeP& b = n->b;
  switch (n->op) {
    case Op::num: return num(0);
    case Op::var_l:
    case Op::var_t: return num(n->op == var ? 1 : 0);
    case Op::add: return add(diff(a, var), diff(b, var));
    case Op::sub: return sub(diff(a, var), diff(b, var));
    case Op::mul: return add(mul(diff(a, var), b), mul(a, diff(b, var)));
    case Op::div: return divide(sub(mul(diff(a, var), b), mul(a, diff(b, var))), mul(b, b));
    case Op::pow:
      if (!depends(b, var))  // a^c: c a^(c-1) a'
        return mul(mul(b, power(a, sub(b, num(1)))), diff(a, var));
      // a^b = exp(b log a)
      return mul(n, add(mul(diff(b, var), make(Op::log, a)), divide(mul(b, diff(a, var)), a)));
    case Op::neg: return neg(diff(a, var));
    case Op::sin: return mul(make(Op::cos, a), diff(a, var));
    case Op::cos: return neg(mul(make(Op::sin, a), diff(a, var)));
    case Op::tan: return divide(diff(a, var), power(make(Op::cos, a), num(2)));
    case Op::exp: return mul(n, diff(a, var));
    case Op::log: return divide(diff(a, var), a);
    case Op::sqrt: return divide(diff(a, var), mul(num(2), n));
    case Op::atan: return divide(diff(a, var), add(num(1), mul(a, a)));
    case Op::abs: return mul(divide(a, n), diff(a, var));
  }
  return num(0);
}

int precedence(Op op) {
  switch (op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    default: return 5;
  }
}

void print(std::ostream& os, const NodeP& n) {
  auto child = [&](const NodeP& c, int min_prec) {
    if (precedence(c->op) < min_prec) {
      os << '(';
      print(os, c);
      os << ')';
    } else {
      print(os, c);
    }
  };
  switch (n->op) {
    case Op::num:
      if (n->value == std::numbers::pi) {
        os << "pi";
      } else {
        std::ostringstream s;
        s.precision(17);
        s << n->value;
        if (n->value < 0) os << '(' << s.str() << ')';
        else os << s.str();
      }
      return;
    case Op::var_l: os << "lambda"; return;
    case Op::var_t: os << "t"; return;
    case Op::add: child(n->a, 1); os << " + "; child(n->b, 2); return;
    case Op::sub: child(n->a, 1); os << " - "; child(n->b, 2); return;
    case Op::mul: child(n->a, 2); os << "*"; child(n->b, 3); return;
    case Op::div: child(n->a, 2); os << "/"; child(n->b, 3); return;
    case Op::pow: child(n->a, 5); os << "^"; child(n->b, 4); return;
    case Op::neg: os << "-"; child(n->a, 3); return;
    default: break;
  }
  static const char* names[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "atan", "abs"};
  os << names[static_cast<int>(n->op) - static_cast<int>(Op::sin)] << '(';
  print(os, n->a);
  os << ')';
}

}  // namespace

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).run()); }

Expr Expr::constant(double c) { return Expr(num(c)); }

double Expr::eval(double lambda, double t) const { return eval_node(*node_, lambda, t); }

Expr Expr::derivative(Var v) const { return Expr(diff(node_, v == Var::lambda ? Op::var_l : Op::var_t)); }

bool Expr::depends_on(Var v) const { return depends(node_, v == Var::lambda ? Op::var_l : Op::var_t); }

std::string Expr::to_string() const {
  std::ostringstream os;
  print(os, node_);
  return os.str();
}

}  // namespace sflow
