#include "qcforge/scalar_function.hpp"

#include <cctype>
#include <sstream>

#include "qcforge/errors.hpp"

namespace qcforge {

struct ScalarFunction::Node {
  Kind kind;
  Rational value;  // Const payload, or the exponent of Pow
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ScalarFunction::Node>;
using K = ScalarFunction::Kind;

NodePtr make(K k, NodePtr a = nullptr, NodePtr b = nullptr, Rational v = Rational(0)) {
  return std::make_shared<const ScalarFunction::Node>(ScalarFunction::Node{k, std::move(v), std::move(a), std::move(b)});
}

Jet eval_node(const ScalarFunction::Node& n, const Jet& u) {
  switch (n.kind) {
    case K::Const: return Jet(n.value.to_double());
    case K::Var: return u;
    case K::Neg: return -eval_node(*n.a, u);
    case K::Add: return eval_node(*n.a, u) + eval_node(*n.b, u);
    case K::Sub: return eval_node(*n.a, u) - eval_node(*n.b, u);
    case K::Mul: return eval_node(*n.a, u) * eval_node(*n.b, u);
    case K::Div: return eval_node(*n.a, u) / eval_node(*n.b, u);
    case K::Pow: {
      const auto num = n.value.numerator().get_si();
      const auto den = n.value.denominator().get_si();
      return pow_rational(eval_node(*n.a, u), num, den);
    }
    case K::Exp: return exp(eval_node(*n.a, u));
    case K::Sinh: return sinh(eval_node(*n.a, u));
    case K::Cosh: return cosh(eval_node(*n.a, u));
    case K::Log: return log(eval_node(*n.a, u));
    case K::Sqrt: return sqrt(eval_node(*n.a, u));
  }
  return Jet();
}

// Binding strength used by the printer.
int precedence(const ScalarFunction::Node& n) {
  switch (n.kind) {
    case K::Add:
    case K::Sub: return 1;
    case K::Mul:
    case K::Div: return 2;
    case K::Neg: return 3;
    case K::Pow: return 4;
    case K::Const:
      if (n.value.sign() < 0) return 3;
      return n.value.is_integer() ? 5 : 2;
    default: return 5;
  }
}

void print(std::ostream& os, const ScalarFunction::Node& n);

void print_child(std::ostream& os, const ScalarFunction::Node& c, int min_prec) {
  if (precedence(c) < min_prec) {
    os << "(";
    print(os, c);
    os << ")";
  } else {
    print(os, c);
  }
}

const char* fn_name(K k) {
  switch (k) {
    case K::Exp: return "exp";
    case K::Sinh: return "sinh";
    case K::Cosh: return "cosh";
    case K::Log: return "ln";
    case K::Sqrt: return "sqrt";
    default: return "?";
  }
}

void print(std::ostream& os, const ScalarFunction::Node& n) {
  switch (n.kind) {
    case K::Const: os << n.value; return;
    case K::Var: os << "u"; return;
    case K::Neg: os << "-"; print_child(os, *n.a, 4); return;
    case K::Add: print_child(os, *n.a, 1); os << " + "; print_child(os, *n.b, 1); return;
    case K::Sub: print_child(os, *n.a, 1); os << " - "; print_child(os, *n.b, 2); return;
    case K::Mul: print_child(os, *n.a, 2); os << "*"; print_child(os, *n.b, 3); return;
    case K::Div: print_child(os, *n.a, 2); os << "/"; print_child(os, *n.b, 3); return;
    case K::Pow:
      print_child(os, *n.a, 5);
      if (n.value.is_integer() && n.value.sign() >= 0)
        os << "^" << n.value;
      else
        os << "^(" << n.value << ")";
      return;
    default:
      os << fn_name(n.kind) << "(";
      print(os, *n.a);
      os << ")";
      return;
  }
}

class Parser {
 public:
  Parser(std::string_view src, const ScalarFunction::Bindings& params) : s_(src), params_(params) {}

  NodePtr parse_all() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + " in '" + std::string(s_) + "'", 1, static_cast<int>(pos_) + 1);
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
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+'))
        n = make(K::Add, n, term());
      else if (accept('-'))
        n = make(K::Sub, n, term());
      else
        return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make(K::Mul, n, unary());
      else if (accept('/'))
        n = make(K::Div, n, unary());
      else
        return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(K::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    return make(K::Pow, base, nullptr, exponent());
  }
  Rational exponent() {
    skip();
    if (accept('(')) {
      bool neg = accept('-');
      Rational e = integer();
      if (accept('/')) e /= integer();
      expect(')');
      return neg ? -e : e;
    }
    bool neg = accept('-');
    Rational e = integer();
    return neg ? -e : e;
  }
  Rational integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return Rational::parse(s_.substr(start, pos_ - start));
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      try {
        return make(K::Const, nullptr, nullptr, Rational::parse(s_.substr(start, pos_ - start)));
      } catch (const ParseError&) {
        pos_ = start;
        fail("malformed number");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string_view id = s_.substr(start, pos_ - start);
      static const std::map<std::string_view, K> fns{
          {"exp", K::Exp}, {"sinh", K::Sinh}, {"cosh", K::Cosh}, {"ln", K::Log}, {"sqrt", K::Sqrt}};
      if (auto it = fns.find(id); it != fns.end()) {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(it->second, arg);
      }
      if (id == "u") return make(K::Var);
      if (auto it = params_.find(id); it != params_.end())
        return make(K::Const, nullptr, nullptr, it->second);
      pos_ = start;
      fail("unknown identifier '" + std::string(id) + "'");
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view s_;
  const ScalarFunction::Bindings& params_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarFunction::ScalarFunction() : node_(make(K::Const)) {}
ScalarFunction::ScalarFunction(const Rational& c) : node_(make(K::Const, nullptr, nullptr, c)) {}

ScalarFunction ScalarFunction::var() { return ScalarFunction(make(K::Var)); }

ScalarFunction ScalarFunction::parse(std::string_view text, const Bindings& params) {
  return ScalarFunction(Parser(text, params).parse_all());
}

Jet ScalarFunction::eval(double u) const { return eval_node(*node_, Jet::variable(u)); }

std::string ScalarFunction::str() const {
  std::ostringstream os;
  print(os, *node_);
  return os.str();
}

ScalarFunction::Kind ScalarFunction::kind() const { return node_->kind; }

ScalarFunction operator-(const ScalarFunction& a) { return ScalarFunction(make(K::Neg, a.node_)); }
ScalarFunction operator+(const ScalarFunction& a, const ScalarFunction& b) {
  return ScalarFunction(make(K::Add, a.node_, b.node_));
}
ScalarFunction operator-(const ScalarFunction& a, const ScalarFunction& b) {
  return ScalarFunction(make(K::Sub, a.node_, b.node_));
}
ScalarFunction operator*(const ScalarFunction& a, const ScalarFunction& b) {
  return ScalarFunction(make(K::Mul, a.node_, b.node_));
}
ScalarFunction operator/(const ScalarFunction& a, const ScalarFunction& b) {
  return ScalarFunction(make(K::Div, a.node_, b.node_));
}
ScalarFunction pow(const ScalarFunction& a, const Rational& e) {
  return ScalarFunction(make(K::Pow, a.node_, nullptr, e));
}
ScalarFunction exp(const ScalarFunction& a) { return ScalarFunction(make(K::Exp, a.node_)); }
ScalarFunction sinh(const ScalarFunction& a) { return ScalarFunction(make(K::Sinh, a.node_)); }
ScalarFunction cosh(const ScalarFunction& a) { return ScalarFunction(make(K::Cosh, a.node_)); }
ScalarFunction log(const ScalarFunction& a) { return ScalarFunction(make(K::Log, a.node_)); }
ScalarFunction sqrt(const ScalarFunction& a) { return ScalarFunction(make(K::Sqrt, a.node_)); }

}  // namespace qcforge
