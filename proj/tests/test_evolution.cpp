#include <cmath>

#include "doctest.h"
#include "qcforge/evolution.hpp"
#include "qcforge/qc_verifier.hpp"

using namespace qcforge;

namespace {

std::map<std::string, Rational> P(std::initializer_list<std::pair<const char*, Rational>> kv) {
  std::map<std::string, Rational> m;
  for (const auto& [k, v] : kv) m[k] = v;
  return m;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST_CASE("quaternionic Kaehler builds are closed and Einstein with the predicted constant") {
  struct Case {
    const char* family;
    std::map<std::string, Rational> params;
    double expected;
  };
  const Case cases[] = {
      {"qk-heis", P({{"a", Rational(1)}}), -16},
      {"qk-heis", P({{"a", Rational(9, 4)}}), -36},
      {"qk-heis", P({{"a", Rational(1)}, {"n", Rational(2)}}), -20},
      {"qk-heis-exp", P({{"b", Rational(3, 2)}}), -36},
      {"qk-l1", P({{"b", Rational(1)}}), -4},
      {"qk-l1", P({{"b", Rational(2)}}), -16},
      {"qk-l2", P({{"b", Rational(1)}}), -2},
      {"qk-l2", P({{"b", Rational(3)}}), -18},
  };
  for (const auto& c : cases) {
    CAPTURE(c.family);
    CAPTURE(c.expected);
    auto rep = build(make_family(c.family, c.params));
    CHECK(rep.closure_residual < 1e-10);
    CHECK(rep.ideal_residual < 1e-10);
    CHECK(rep.compatibility_residual < 1e-12);
    CHECK(rep.cartan_residual < 1e-12);
    for (const auto& s : rep.samples) {
      CHECK(rel(s.einstein_constant, c.expected) < 1e-8);
      CHECK(s.einstein_deviation < 1e-8 * std::abs(c.expected));
    }
  }
}

TEST_CASE("family coefficients match the closed-form metrics") {
  SUBCASE("general QK metric") {
    for (const char* name : {"qk-l1", "qk-l2", "qk-3sas"}) {
      auto fam = make_family(name, name == std::string("qk-3sas") ? P({{"a", Rational(1, 3)}}) : P({{"b", Rational(3, 2)}}));
      const double S = fam.S.to_double();
      const double a = name == std::string("qk-3sas") ? 1.0 / 3 : (name == std::string("qk-l1") ? 2.25 / 4 : 2.25 / 8);
      for (double u : fam.default_samples()) {
        double h2 = 0.5 * S * u + a * u * u;
        CHECK(fam.f.value(u) == doctest::Approx(u));
        for (int s = 0; s < 3; ++s) CHECK(std::pow(fam.fs(s).value(u), 2) == doctest::Approx(h2));
        CHECK(std::pow(fam.gu.value(u), 2) == doctest::Approx(1.0 / (2 * (S * u + 2 * a * u * u))));
      }
    }
  }
  SUBCASE("negative S in the cosh coordinate") {
    // u = (1 + cosh σ)/(2b²) turns the l1 and l2 metrics into their σ forms.
    for (int which = 1; which <= 2; ++which) {
      const double b = 1.3;
      auto fam = make_family(which == 1 ? "qk-l1" : "qk-l2", P({{"b", Rational(13, 10)}}));
      for (double sigma : {0.7, 1.4, 2.0}) {
        double u = (1 + std::cosh(sigma)) / (2 * b * b);
        double dudsigma = std::sinh(sigma) / (2 * b * b);
        double h2 = std::sinh(sigma) * std::sinh(sigma) / ((which == 1 ? 16 : 32) * b * b);
        CHECK(std::pow(fam.f1.value(u), 2) == doctest::Approx(h2));
        double g_sigma = std::pow(fam.gu.value(u) * dudsigma, 2);
        CHECK(g_sigma == doctest::Approx(which == 1 ? 1 / (b * b) : 2 / (b * b)));
      }
    }
  }
  SUBCASE("zero S in the exponential coordinate") {
    const double b = 0.7;
    auto fam = make_family("qk-heis", P({{"a", Rational(49, 100)}}));
    auto alt = make_family("qk-heis-exp", P({{"b", Rational(7, 10)}}));
    for (double sigma : {-0.5, 0.1, 0.8}) {
      double u = std::exp(2 * b * sigma);
      CHECK(fam.f.value(u) == doctest::Approx(alt.f.value(sigma)));
      CHECK(fam.f1.value(u) == doctest::Approx(alt.f1.value(sigma)));
      CHECK(fam.gu.value(u) * 2 * b * u == doctest::Approx(alt.gu.value(sigma)));
    }
  }
  SUBCASE("Spin(7) specializations of the general solution") {
    auto general = [&](double S, double a, double u) { return (S * std::pow(u, 5.0 / 3) - 2 * a) / (10 * std::pow(u, 2.0 / 3)); };
    auto l1 = make_family("spin7-l1", P({{"b", Rational(3)}}));
    auto l2 = make_family("spin7-l2", P({{"b", Rational(3)}}));
    auto sas = make_family("spin7-3sas", P({{"a", Rational(1, 2)}}));
    for (double u : {0.4, 0.9, 1.3}) {
      CHECK(std::pow(l1.f1.value(u), 2) == doctest::Approx(general(-0.5, -3.0 / 4, u)));
      CHECK(std::pow(l2.f1.value(u), 2) == doctest::Approx(general(-0.25, -3.0 / 8, u)));
      CHECK(std::pow(l1.gu.value(u), 2) == doctest::Approx(5 * std::pow(u, 2.0 / 3) / (9 * (3 - std::pow(u, 5.0 / 3)))));
      CHECK(std::pow(l2.gu.value(u), 2) == doctest::Approx(10 * std::pow(u, 2.0 / 3) / (9 * (3 - std::pow(u, 5.0 / 3)))));
    }
    for (double u : {1.0, 1.5, 2.0}) CHECK(std::pow(sas.f1.value(u), 2) == doctest::Approx(general(2, 0.5, u)));
  }
  SUBCASE("triaxial Spin(7) with a2 = a1, a3 = -a1 is the Heisenberg family") {
    auto tri = make_family("spin7-triaxial", P({{"a1", Rational(1)}, {"a2", Rational(1)}, {"a3", Rational(-1)}}));
    const double a = 4 * std::sqrt(2.0);
    for (double v : {0.5, 1.0, 1.7}) {
      double u = -1 - v;
      CHECK(tri.f.value(u) == doctest::Approx(std::pow(v, 3)));
      for (int s = 0; s < 3; ++s) CHECK(std::abs(tri.fs(s).value(u)) == doctest::Approx(a / (4 * v)));
      CHECK(std::abs(tri.gu.value(u)) == doctest::Approx(2 * std::pow(v, 3) / a));
    }
  }
}

TEST_CASE("Spin(7) builds are closed, Ricci flat and have full holonomy rank") {
  struct Case {
    const char* family;
    std::map<std::string, Rational> params;
    int min_rank;
  };
  const Case cases[] = {
      {"spin7-heis", P({{"a", Rational(1)}}), 21},
      {"spin7-heis", P({{"a", Rational(5, 2)}}), 21},
      {"spin7-l1", P({{"b", Rational(2)}}), 16},
      {"spin7-l2", P({{"b", Rational(2)}}), 21},
      {"spin7-triaxial", P({{"a1", Rational(1)}, {"a2", Rational(11, 10)}, {"a3", Rational(-1)}}), 21},
      {"spin7-triaxial", P({{"a1", Rational(0)}, {"a2", Rational(1)}, {"a3", Rational(3)}}), 21},
  };
  for (const auto& c : cases) {
    CAPTURE(c.family);
    auto rep = build(make_family(c.family, c.params));
    CHECK(rep.closure_residual < 1e-10);
    CHECK(rep.ricci_max_abs < 1e-8);
    CHECK(rep.cocalibration_residual < 1e-12);
    CHECK(rep.psi_identity_residual < 1e-12);
    CHECK(rep.curvature_rank >= c.min_rank);
    CHECK(rep.curvature_rank <= 21);
  }
  CHECK(build(make_family("spin7-l2")).curvature_rank == 21);
}

TEST_CASE("triaxial closed four form") {
  auto gen = make_family("qk-triaxial", P({{"a1", Rational(0)}, {"a2", Rational(1)}, {"a3", Rational(2)}}));
  auto rep = build(gen, {1, 2, 3});
  CHECK(rep.closure_residual < 1e-10);
  CHECK(rep.ideal_residual > 1e-3);
  CHECK(rep.einstein_deviation > 1e-3);
  for (auto a : {Rational(0), Rational(1, 2), Rational(3)}) {
    auto eq = make_family("qk-triaxial", P({{"a1", a}, {"a2", a}, {"a3", a}, {"C", Rational(2)}}));
    auto r = build(eq);
    CHECK(r.closure_residual < 1e-10);
    CHECK(r.ideal_residual < 1e-10);
    CHECK(r.einstein_deviation < 1e-8);
    CHECK(rel(r.einstein_constant, -96.0 / 8) < 1e-8);
  }
  for (auto a : {std::array<int, 3>{0, 2, 5}, std::array<int, 3>{-1, 0, 1}}) {
    auto fam = make_family("qk-triaxial", P({{"a1", Rational(a[0])}, {"a2", Rational(a[1])}, {"a3", Rational(a[2])}}));
    CHECK(build(fam).closure_residual < 1e-10);
  }
}

TEST_CASE("differential ideal family") {
  auto fam = make_family("ideal-family");
  auto rep = build(fam, {0.0, 0.5});
  CHECK(rep.ideal_residual < 1e-10);
  CHECK(rep.closure_residual > 1e-3);
  auto sym = make_family("ideal-family", P({{"a1", Rational(2)}, {"a2", Rational(2)}, {"a3", Rational(2)}}));
  for (double x : sym.default_samples()) {
    CHECK(sym.f1.value(x) == doctest::Approx(sym.f2.value(x)));
    CHECK(sym.f2.value(x) == doctest::Approx(sym.f3.value(x)));
  }
  CHECK(build(sym).ideal_residual < 1e-10);
}

TEST_CASE("governing systems vanish on every family") {
  for (const auto& name : family_names()) {
    CAPTURE(name);
    auto fam = make_family(name);
    for (auto s : fam.systems) {
      CAPTURE(ode_name(s));
      CHECK(ode_residual(s, fam) < 1e-10);
    }
  }
  // Positive S: the 3-Sasakian families solve their systems for several a.
  for (auto a : {Rational(1, 5), Rational(1, 2), Rational(3)}) {
    CHECK(ode_residual(OdeSystem::Qk, make_family("qk-3sas", P({{"a", a}}))) < 1e-10);
  }
  for (auto a : {Rational(1, 2), Rational(3)})
    CHECK(ode_residual(OdeSystem::Spin7, make_family("spin7-3sas", P({{"a", a}}))) < 1e-10);
}

TEST_CASE("ideal condition S term") {
  // QK structures generate a differential ideal; the least-squares test agrees with the derived
  // S term, while the alternative S f f_j f_k term does not vanish once S != 0.
  for (const char* name : {"qk-l1", "qk-l2", "qk-3sas"}) {
    CAPTURE(name);
    auto fam = make_family(name);
    CHECK(ode_residual(OdeSystem::Ideal, fam) < 1e-10);
    CHECK(ode_residual(OdeSystem::IdealCubicS, fam) > 1e-3);
  }
  CHECK(build(make_family("qk-l1")).ideal_residual < 1e-10);
}

TEST_CASE("G2 forms and orientation") {
  auto spec = catalog("heis(1)");
  RForm phi(7, 3), star(7, 4);
  for (int s = 0; s < 3; ++s) {
    phi += wedge(spec.omega(s), spec.eta(s));
    star -= wedge(spec.omega(s), spec.eta((s + 1) % 3), spec.eta((s + 2) % 3));
  }
  phi -= wedge(spec.eta(0), spec.eta(1), spec.eta(2));
  star += wedge(spec.omega(0), spec.omega(0)) * Rational(1, 2);
  // The four form above is the Hodge dual of φ for the orientation opposite to e^{1234}∧η_{123}.
  CHECK(hodge_star(phi, {0, 1, 2, 3, 4, 5, 6}) == -star);
  CHECK(hodge_star(phi, {1, 0, 2, 3, 4, 5, 6}) == star);
  CHECK(wedge(phi, star) == RForm::monomial(7, {0, 1, 2, 3, 4, 5, 6}, Rational(-7)));
}

TEST_CASE("preconditions and domain guards") {
  CHECK_THROWS_AS(make_family("qk-nowhere"), UnknownName);
  CHECK_THROWS_AS(make_family("qk-l1", P({{"zz", Rational(1)}})), UnknownName);
  CHECK_THROWS_AS(build(make_family("qk-3sas")), PreconditionError);
  auto fam = make_family("qk-l1");
  fam.base = "l3";
  fam.S = Rational(-1);
  CHECK_THROWS_AS(build(fam), NotEinsteinBase);
  auto tri = make_family("spin7-triaxial", P({{"a1", Rational(1)}, {"a2", Rational(2)}, {"a3", Rational(3)}}));
  CHECK_THROWS_AS(build(tri, {-1.5, -0.5}), DomainError);
  CHECK_THROWS_AS(build(make_family("qk-l1"), {0.5}), DomainError);
}
