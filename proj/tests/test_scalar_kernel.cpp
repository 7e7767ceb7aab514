#include <cmath>
#include <random>

#include "doctest.h"
#include "qcforge/errors.hpp"
#include "qcforge/jet.hpp"
#include "qcforge/rational.hpp"
#include "qcforge/scalar_function.hpp"

using namespace qcforge;

namespace {

void check_jet(const Jet& j, std::array<double, 4> want, double tol = 1e-14) {
  for (int k = 0; k < 4; ++k) CHECK(j[k] == doctest::Approx(want[k]).epsilon(tol));
}

}  // namespace

TEST_CASE("rational arithmetic is exact and normalized") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(-1, 2) * Rational(-1, 2) == Rational(1, 4));
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(3, -6).str() == "-1/2");
  CHECK(Rational(7, 3) - Rational(1, 3) == Rational(2));
  CHECK(Rational(3, 4) / Rational(3, 8) == Rational(2));
  CHECK_THROWS_AS(Rational(1) / Rational(0), DivisionByZero);
  CHECK_THROWS_AS(Rational(1, 0), DivisionByZero);
  CHECK(Rational(2, 3).pow(-2) == Rational(9, 4));
}

TEST_CASE("rational literals parse") {
  CHECK(Rational::parse("1/2") == Rational(1, 2));
  CHECK(Rational::parse("-3") == Rational(-3));
  CHECK(Rational::parse(" 4/6 ") == Rational(2, 3));
  CHECK(Rational::parse("1.25") == Rational(5, 4));
  CHECK(Rational::parse("-0.5") == Rational(-1, 2));
  CHECK_THROWS_AS(Rational::parse("1/0"), DivisionByZero);
  CHECK_THROWS_AS(Rational::parse("x"), ParseError);
  CHECK_THROWS_AS(Rational::parse("1//2"), ParseError);
}

TEST_CASE("rational print/parse round trip on random fractions") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 100000);
  for (int i = 0; i < 500; ++i) {
    Rational r(num(rng), den(rng));
    r = r * r * Rational(num(rng) | 1);  // exercise big integers
    CHECK(Rational::parse(r.str()) == r);
  }
}

TEST_CASE("jet examples") {
  check_jet(ScalarFunction::parse("u^2").eval(3.0), {9, 6, 2, 0});
  // d/du u^{5/3} = 5/3 u^{2/3}, then 10/9 u^{-1/3}, then -10/27 u^{-4/3}.
  check_jet(ScalarFunction::parse("u^(5/3)").eval(1.0), {1, 5.0 / 3, 10.0 / 9, -10.0 / 27});
  check_jet(ScalarFunction::parse("cosh(u)").eval(0.0), {1, 0, 1, 0});
  check_jet(ScalarFunction::parse("sinh(u)").eval(0.0), {0, 1, 0, 1});
  check_jet(ScalarFunction::parse("exp(2*u)").eval(0.0), {1, 2, 4, 8});
  check_jet(ScalarFunction::parse("ln(u)").eval(1.0), {0, 1, -1, 2});
  check_jet(ScalarFunction::parse("sqrt(u)").eval(4.0), {2, 0.25, -1.0 / 32, 3.0 / 256});
  check_jet(ScalarFunction::parse("1/u").eval(2.0), {0.5, -0.25, 0.25, -0.375});
  check_jet(ScalarFunction::parse("u^(-2)").eval(1.0), {1, -2, 6, -24});
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(ScalarFunction::parse("u^(1/3)").eval(-1.0), DomainError);
  CHECK_THROWS_AS(ScalarFunction::parse("sqrt(u - 2)").eval(1.0), DomainError);
  CHECK_THROWS_AS(ScalarFunction::parse("ln(u)").eval(0.0), DomainError);
  CHECK_THROWS_AS(ScalarFunction::parse("1/(u-1)").eval(1.0), DomainError);
  CHECK_NOTHROW(ScalarFunction::parse("u^3").eval(-2.0));
  CHECK(ScalarFunction::parse("u^3").value(-2.0) == -8.0);
}

TEST_CASE("parser bindings, printing and errors") {
  ScalarFunction::Bindings p{{"a", Rational(1, 4)}, {"S", Rational(-1, 2)}};
  auto f = ScalarFunction::parse("sqrt(1/2*S*u + a*u^2)", p);
  CHECK(f.value(4.0) == doctest::Approx(std::sqrt(-1.0 + 4.0)));
  CHECK_THROWS_AS(ScalarFunction::parse("b*u", p), SyntaxError);
  CHECK_THROWS_AS(ScalarFunction::parse("u +", p), SyntaxError);
  CHECK_THROWS_AS(ScalarFunction::parse("(u", p), SyntaxError);
  CHECK_THROWS_AS(ScalarFunction::parse("u^x", p), SyntaxError);
  CHECK(ScalarFunction::parse("u - (u - 1)").value(5.0) == 1.0);
  CHECK(ScalarFunction::parse("2^(1/2)").value(0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(ScalarFunction::parse("-u^2").value(3.0) == -9.0);
}

TEST_CASE("printed functions parse back to the same values") {
  const char* srcs[] = {"u - (u - 1)/(2*u)", "-(u + 1)^(5/3)*exp(-u)", "(1/2)^2*u", "u/(u*u)",
                        "sqrt(1/10*(3*u^(5/3) - 2)/u^(2/3))", "cosh(u)^2 - sinh(u)^2", "-3 + u*-2",
                        "ln(u^2 + 1)/(1 - -u)"};
  for (const char* s : srcs) {
    auto f = ScalarFunction::parse(s);
    auto g = ScalarFunction::parse(f.str());
    CAPTURE(f.str());
    CHECK(g.str() == f.str());
    for (double u : {1.3, 2.0, 3.7}) {
      auto a = f.eval(u), b = g.eval(u);
      for (int k = 0; k < 4; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-15));
    }
  }
}

namespace {

// Random expressions that stay finite and smooth on u in [1, 2].
ScalarFunction random_function(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_int_distribution<long> small(1, 5);
  switch (pick(rng)) {
    case 0: return ScalarFunction::var();
    case 1: return ScalarFunction(Rational(small(rng), small(rng))) + ScalarFunction::var();
    case 2: return random_function(rng, depth - 1) + random_function(rng, depth - 1);
    case 3: return random_function(rng, depth - 1) * random_function(rng, depth - 1);
    case 4: {
      auto g = random_function(rng, depth - 1);
      return ScalarFunction(1) / (ScalarFunction(2) + g * g);
    }
    case 5: {
      auto g = random_function(rng, depth - 1);
      return pow(g * g + ScalarFunction(1), Rational(small(rng), small(rng) + 1));
    }
    case 6: return sinh(random_function(rng, depth - 1) / ScalarFunction(4));
    case 7: return cosh(random_function(rng, depth - 1) / ScalarFunction(4));
    case 8: return exp(-random_function(rng, depth - 1) / ScalarFunction(8));
    default: {
      auto g = random_function(rng, depth - 1);
      return log(ScalarFunction(1) + g * g);
    }
  }
}

}  // namespace

TEST_CASE("jet components match central differences of the previous component") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pt(1.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto f = random_function(rng, 3);
    const double u = pt(rng);
    // Five-point central stencil, truncation error O(h^4).
    const double h = 1e-3;
    Jet j = f.eval(u), jp = f.eval(u + h), jm = f.eval(u - h), jpp = f.eval(u + 2 * h), jmm = f.eval(u - 2 * h);
    for (int k = 1; k <= 3; ++k) {
      double fd = (-jpp[k - 1] + 8 * jp[k - 1] - 8 * jm[k - 1] + jmm[k - 1]) / (12 * h);
      double scale = std::max({1.0, std::abs(j[k]), std::abs(j[k - 1])});
      CAPTURE(f.str());
      CAPTURE(k);
      CHECK(std::abs(fd - j[k]) / scale < 1e-6);
    }
  }
}

TEST_CASE("jet ring laws hold exactly on integer data") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-9, 9);
  auto rj = [&] { return Jet(d(rng), d(rng), d(rng), d(rng)); };
  for (int i = 0; i < 500; ++i) {
    Jet a = rj(), b = rj(), c = rj();
    CHECK((a * b) * c == a * (b * c));
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    Jet lhs = (a * b).derivative(), rhs = a.derivative() * b + a * b.derivative();
    CHECK(lhs.order == 2);
    CHECK(rhs.order == 2);
    for (int k = 0; k <= 2; ++k) CHECK(lhs[k] == rhs[k]);
  }
}

TEST_CASE("jet order bookkeeping") {
  Jet x = Jet::variable(2.0);
  Jet f = x * x * x;
  CHECK(f.order == 3);
  Jet d1 = f.derivative();
  CHECK(d1.order == 2);
  CHECK((d1 * f).order == 2);
  CHECK(d1.derivative().derivative().value() == 6.0);
}
