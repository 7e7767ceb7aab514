#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qcforge/frame_algebra.hpp"

using namespace qcforge;

namespace {

RForm e(int dim, std::initializer_list<int> one_based, Rational c = Rational(1)) {
  std::vector<int> idx;
  for (int i : one_based) idx.push_back(i - 1);
  return RForm::monomial(dim, idx, c);
}

// Independent oracle: Jacobi identity on brackets read directly off the 2-forms.
bool jacobi_by_brackets(const FrameAlgebra& alg) {
  const int n = alg.dim();
  auto br = [&](int a, int b, int c) { return -alg.d_e(a).component({b, c}); };  // e^a([e_b,e_c])
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        for (int a = 0; a < n; ++a) {
          Rational s(0);
          for (int m = 0; m < n; ++m)
            s += br(m, x, y) * br(a, m, z) + br(m, y, z) * br(a, m, x) + br(m, z, x) * br(a, m, y);
          if (!s.is_zero()) return false;
        }
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("parse l1 and read structure constants") {
  QcFrameSpec l1 = catalog("l1");
  const auto& alg = l1.algebra();
  CHECK(alg.dim() == 7);
  CHECK(alg.d_e(4).component({5, 6}) == Rational(-1, 2));
  RForm de2 = alg.d_e(1);
  CHECK(de2.component({2, 3}) == Rational(-2));
  CHECK(de2.component({2, 6}) == Rational(-1, 2));
  CHECK(de2.component({3, 5}) == Rational(1, 2));
  CHECK(alg.bracket_coeff(4, 5, 6) == Rational(1, 2));
}

TEST_CASE("parse abelian and l2 sources") {
  auto ab = parse_algebra("algebra ab dim 4\nd e1 = 0\nd e2 = 0\nd e3 = 0\nd e4 = 0\n");
  for (int a = 0; a < 4; ++a) CHECK(ab.d_e(a).is_zero());
  CHECK(jacobi_check(ab).ok);
  QcFrameSpec l2 = catalog("l2");
  CHECK(l2.algebra().d_e(1) == e(7, {1, 2}, Rational(-1)) + e(7, {3, 4}));
}

TEST_CASE("parse errors carry positions") {
  const char* dup = "algebra x dim 2\nd e1 = 0\nd e1 = 0\nd e2 = 0\n";
  CHECK_THROWS_AS(parse_algebra(dup), DuplicateDifferential);
  const char* range = "algebra x dim 2\nd e1 = e1^e3\nd e2 = 0\n";
  CHECK_THROWS_AS(parse_algebra(range), IndexOutOfRange);
  try {
    parse_algebra("algebra x dim 2\nd e1 = 2 e1 ^ e2 +\nd e2 = 0\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& err) {
    CHECK(err.line() == 2);
    CHECK(err.column() == 19);  // end of line, after the dangling +
  }
  CHECK_THROWS_AS(parse_algebra("algebra x dim 2\nd e1 = 0\n"), SyntaxError);  // e2 missing
  CHECK_THROWS_AS(parse_algebra("d e1 = 0\n"), SyntaxError);
  CHECK_THROWS_AS(parse_algebra("algebra x dim 2\nd e1 = 0 junk\nd e2 = 0\n"), SyntaxError);
  CHECK_THROWS_AS(parse_algebra("algebra x dim 3\nd e1 = e2 + e2^e3\nd e2 = 0\nd e3 = 0\n"), SyntaxError);
  CHECK_THROWS_AS(parse_algebra("algebra x dim 3\nd e1 = k e2^e3\nd e2 = 0\nd e3 = 0\n"), SyntaxError);
  CHECK_THROWS_AS(parse_algebra("algebra x dim 3\nd e1 = e2^e2\nd e2 = 0\nd e3 = 0\n"), SyntaxError);
}

TEST_CASE("mc_differential examples") {
  QcFrameSpec h = catalog("heis(1)");
  CHECK(mc_differential(h.algebra(), e(7, {5})) == e(7, {1, 2}, 2) + e(7, {3, 4}, 2));
  QcFrameSpec l1 = catalog("l1");
  const auto& A = l1.algebra();
  // anti-derivation on e^5∧e^6, expanded by hand
  RForm want = wedge(A.d_e(4), e(7, {6})) - wedge(e(7, {5}), A.d_e(5));
  CHECK(mc_differential(A, e(7, {5, 6})) == want);
  CHECK(mc_differential(A, RForm::scalar(7, Rational(3))).is_zero());
}

TEST_CASE("catalog entries satisfy Jacobi, agreeing with the bracket oracle") {
  for (const auto& name : {"l0(1)", "l0(-2/3)", "l1", "l2", "l3", "heis(1)", "heis(2)", "heis(3)"}) {
    CAPTURE(name);
    QcFrameSpec q = catalog(name);
    CHECK(jacobi_check(q.algebra()).ok);
    CHECK(jacobi_by_brackets(q.algebra()));
    for (int a = 0; a < q.dim(); ++a) CHECK(mc_differential(q.algebra(), q.algebra().d_e(a)).is_zero());
  }
}

TEST_CASE("jacobi violations are detected") {
  // d e1 = e^{23}, d e2 = e^{13}: d²e1 = e^{13}∧e^3 = 0, so this one is a Lie algebra after all.
  auto ok = parse_algebra("algebra t dim 3\nd e1 = e2^e3\nd e2 = e1^e3\nd e3 = 0\n");
  CHECK(jacobi_check(ok).ok);
  CHECK(jacobi_by_brackets(ok));
  // d e1 = e^{13}, d e3 = e^{12}: d²e3 = d(e^1)∧e^2 = e^{13}∧e^2 = -e^{123}.
  auto bad = parse_algebra("algebra t dim 3\nd e1 = e1^e3\nd e2 = 0\nd e3 = e1^e2\n");
  auto rep = jacobi_check(bad);
  REQUIRE_FALSE(rep.ok);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].a == 2);
  CHECK(rep.violations[0].b == 0);
  CHECK(rep.violations[0].c == 1);
  CHECK(rep.violations[0].d == 2);
  CHECK(rep.violations[0].value == Rational(-1));
  CHECK_FALSE(jacobi_by_brackets(bad));
  auto bad4 = parse_algebra("algebra t dim 4\nd e1 = e2^e3\nd e2 = e1^e4\nd e3 = 0\nd e4 = 0\n");
  CHECK_FALSE(jacobi_check(bad4).ok);
  CHECK_FALSE(jacobi_by_brackets(bad4));
}

TEST_CASE("catalog data") {
  QcFrameSpec l0 = catalog("l0(3/2)");
  const Rational c(3, 2);
  CHECK(l0.algebra().d_e(1) == e(7, {3, 4}, -c));
  CHECK(l0.algebra().d_e(4) == e(7, {1, 2}, 2) + e(7, {3, 4}, 2) + e(7, {4, 6}, c));
  QcFrameSpec h2 = catalog("heis(2)");
  CHECK(h2.dim() == 11);
  CHECK(h2.algebra().d_e(8) == (e(11, {1, 2}) + e(11, {3, 4}) + e(11, {5, 6}) + e(11, {7, 8})) * Rational(2));
  QcFrameSpec l1 = catalog("l1");
  RForm de2 = l1.algebra().d_e(1);
  CHECK(de2.component({2, 3}) == Rational(-2));
  CHECK_THROWS_AS(catalog("l4"), UnknownName);
  CHECK_THROWS_AS(catalog("heis(0)"), UnknownName);
}

TEST_CASE("shipped heisenberg files match the generator") {
  for (int n : {1, 2}) {
    auto shipped = parse_algebra(slurp(data_dir() + "/algebras/heis" + std::to_string(n) + ".alg"));
    CHECK(shipped == parse_algebra(heisenberg_source(n)));
  }
}

TEST_CASE("round trip parse(print(alg)) for the catalog") {
  for (const auto& name : catalog_names()) {
    QcFrameSpec q = catalog(name);
    std::string text = print_algebra(q.algebra(), &q);
    auto back = parse_algebra_file(text);
    CHECK(back.algebra == q.algebra());
    REQUIRE(back.qc.has_value());
    for (int s = 0; s < 3; ++s) CHECK(back.qc->omega(s) == q.omega(s));
  }
}

TEST_CASE("heisenberg horizontal forms are closed") {
  for (int n : {1, 2, 3}) {
    QcFrameSpec q = catalog("heis(" + std::to_string(n) + ")");
    for (int a = 0; a < 4 * n; ++a) CHECK(mc_differential(q.algebra(), RForm::e(q.dim(), a)).is_zero());
  }
}

TEST_CASE("induced complex structures satisfy the quaternion relations") {
  for (const auto& name : catalog_names()) {
    QcFrameSpec q = catalog(name);
    CHECK(q.invariant_violations().empty());
    const auto& I1 = q.IH(0);
    const auto& I2 = q.IH(1);
    const auto& I3 = q.IH(2);
    CHECK(I1 * I2 == I3);
    CHECK(I2 * I1 == -I3);
    CHECK(I1 * I1 == -RMatrix::identity(4 * q.n()));
  }
  // I_1 e_1 = e_2 with ω_1(X,Y) = g(I_1X,Y)
  QcFrameSpec q = catalog("l1");
  CHECK(q.I(0)(1, 0) == Rational(1));
}

TEST_CASE("transposed omega convention is rejected") {
  const char* src =
      "algebra h dim 7\nd e1 = 0\nd e2 = 0\nd e3 = 0\nd e4 = 0\n"
      "d e5 = 2 e1^e2 + 2 e3^e4\nd e6 = 2 e1^e3 + 2 e4^e2\nd e7 = 2 e1^e4 + 2 e2^e3\n"
      "qc horizontal = e1..e4 ; vertical = e5,e6,e7\n"
      "omega1 = e1^e2 + e3^e4\nomega2 = e1^e3 + e4^e2\nomega3 = -e1^e4 - e2^e3\n";
  CHECK_THROWS_AS(parse_qc_spec(src), PreconditionError);
}
