#include <random>

#include "doctest.h"
#include "qcforge/connection.hpp"

using namespace qcforge;

namespace {

// Curvature as commutators of the connection matrices (Γ_a)_{fc} = Γ^f_{ac}.
Table4<Rational> curvature_by_matrices(const ConnectionTable& conn, const FrameAlgebra& alg) {
  const int n = conn.dim();
  std::vector<RMatrix> G(n, RMatrix(n, n));
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      for (int f = 0; f < n; ++f) G[a](f, c) = conn.gamma(a, c, f);
  Table4<Rational> out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      RMatrix m = G[a] * G[b] - G[b] * G[a];
      for (int d = 0; d < n; ++d) m -= G[d] * alg.bracket_coeff(d, a, b);
      for (int c = 0; c < n; ++c)
        for (int f = 0; f < n; ++f) out(a, b, c, f) = m(f, c);
    }
  return out;
}

TorsionTensor random_torsion(int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
  TorsionTensor T{Table3<Rational>(n)};
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Rational v(num(rng), den(rng));
        T.t(a, b, c) = v;
        T.t(b, a, c) = -v;
      }
  return T;
}

}  // namespace

TEST_CASE("abelian algebra has flat zero connection") {
  FrameAlgebra alg("abelian", 5, std::vector<RForm>(5, RForm(5, 2)));
  auto lc = koszul_levi_civita(alg);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c) CHECK(lc.gamma(a, b, c).is_zero());
  CHECK(frame_curvature(lc, alg).r.is_zero());
}

TEST_CASE("Levi-Civita is metric and torsion free on the catalog") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    auto spec = catalog(name);
    const auto& alg = spec.algebra();
    auto lc = koszul_levi_civita(alg);
    CHECK(lc.is_metric());
    auto T = torsion_of(lc, alg);
    CHECK(T.t == Table3<Rational>(alg.dim()));
  }
}

TEST_CASE("heis(1) Levi-Civita values") {
  // [e_1, e_2] = -2 e_5 for de^5 = 2e^{12} + ..., so ∇_{e1} e2 = -e5.
  auto spec = catalog("heis(1)");
  const auto& alg = spec.algebra();
  auto lc = koszul_levi_civita(alg);
  CHECK(alg.bracket_coeff(4, 0, 1) == Rational(-2));
  CHECK(lc.gamma(0, 1, 4) == Rational(-1));
  CHECK(lc.gamma(1, 0, 4) == Rational(1));
  CHECK(lc.gamma(0, 4, 1) == Rational(1));
}

TEST_CASE("curvature agrees with the commutator oracle and has Riemannian symmetries") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    auto spec = catalog(name);
    const auto& alg = spec.algebra();
    auto lc = koszul_levi_civita(alg);
    auto R = frame_curvature(lc, alg);
    CHECK(R.r == curvature_by_matrices(lc, alg));
    const int n = alg.dim();
    bool ok = true;
    for (int a = 0; a < n && ok; ++a)
      for (int b = 0; b < n && ok; ++b)
        for (int c = 0; c < n && ok; ++c)
          for (int d = 0; d < n && ok; ++d) {
            const auto& r = R.r;
            ok = r(a, b, c, d) == -r(b, a, c, d) && r(a, b, c, d) == -r(a, b, d, c) &&
                 r(a, b, c, d) == r(c, d, a, b) && (r(a, b, c, d) + r(b, c, a, d) + r(c, a, b, d)).is_zero();
          }
    CHECK(ok);
  }
}

TEST_CASE("torsion adjustment reproduces the prescribed torsion") {
  std::mt19937 rng(7);
  for (const char* name : {"heis(1)", "l1", "l2", "l3"}) {
    CAPTURE(name);
    auto spec = catalog(name);
    const auto& alg = spec.algebra();
    auto lc = koszul_levi_civita(alg);
    for (int trial = 0; trial < 3; ++trial) {
      auto T = random_torsion(alg.dim(), rng);
      auto conn = adjust_by_torsion(lc, T);
      CHECK(conn.is_metric());
      CHECK(torsion_of(conn, alg).t == T.t);
      CHECK(frame_curvature(conn, alg).r == curvature_by_matrices(conn, alg));
    }
  }
}

TEST_CASE("torsion adjustment preconditions") {
  auto spec = catalog("l1");
  const auto& alg = spec.algebra();
  auto lc = koszul_levi_civita(alg);
  TorsionTensor bad{Table3<Rational>(7)};
  bad.t(0, 1, 2) = Rational(1);
  CHECK_THROWS_AS(adjust_by_torsion(lc, bad), NonAntisymmetricTorsion);
  CHECK_THROWS_AS(adjust_by_torsion(lc, TorsionTensor{Table3<Rational>(4)}), FrameMismatch);
}
