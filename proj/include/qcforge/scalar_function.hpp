#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "qcforge/jet.hpp"
#include "qcforge/rational.hpp"

namespace qcforge {

// Closed expression tree in the single variable u. Immutable; copies share nodes.
class ScalarFunction {
 public:
  enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Sinh, Cosh, Log, Sqrt };
  struct Node;

  using Bindings = std::map<std::string, Rational, std::less<>>;

  ScalarFunction();  // the constant 0
  ScalarFunction(const Rational& c);  // NOLINT
  ScalarFunction(long c) : ScalarFunction(Rational(c)) {}  // NOLINT

  static ScalarFunction var();
  // Grammar: + - * / ^ with rational exponents, exp sinh cosh ln sqrt, parentheses, decimal
  // or integer literals, the variable u, and identifiers resolved through `params`.
  static ScalarFunction parse(std::string_view text, const Bindings& params = {});

  Jet eval(double u) const;
  double value(double u) const { return eval(u).value(); }
  std::string str() const;

  Kind kind() const;

  friend ScalarFunction operator-(const ScalarFunction& a);
  friend ScalarFunction operator+(const ScalarFunction& a, const ScalarFunction& b);
  friend ScalarFunction operator-(const ScalarFunction& a, const ScalarFunction& b);
  friend ScalarFunction operator*(const ScalarFunction& a, const ScalarFunction& b);
  friend ScalarFunction operator/(const ScalarFunction& a, const ScalarFunction& b);
  friend ScalarFunction pow(const ScalarFunction& a, const Rational& e);
  friend ScalarFunction exp(const ScalarFunction& a);
  friend ScalarFunction sinh(const ScalarFunction& a);
  friend ScalarFunction cosh(const ScalarFunction& a);
  friend ScalarFunction log(const ScalarFunction& a);
  friend ScalarFunction sqrt(const ScalarFunction& a);

 private:
  explicit ScalarFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace qcforge
