#include <random>

#include "doctest.h"
#include "qcforge/errors.hpp"
#include "qcforge/symbolic_dga.hpp"

using namespace qcforge;

namespace {

SymScalar v(Sym s, int order = 0) { return SymScalar::var(s, order); }
DgaElement G(Gen g) { return DgaElement::gen(g); }

SymScalar random_scalar(std::mt19937& rng) {
  const Sym syms[] = {Sym::S, Sym::a, Sym::f, Sym::h, Sym::f1, Sym::f2, Sym::f3};
  std::uniform_int_distribution<int> coef(-3, 3), pick(0, 6), order(0, 2), exp(1, 2), terms(1, 3);
  SymScalar out;
  int n = terms(rng);
  for (int t = 0; t < n; ++t) {
    SymScalar m(coef(rng));
    for (int k = 0; k < 2; ++k) m *= v(syms[pick(rng)], order(rng)).pow(exp(rng));
    out += m;
  }
  return out;
}

// Random homogeneous element of the given degree in η, ω, dt (and α when allowed).
DgaElement random_form(std::mt19937& rng, int degree, bool alpha) {
  std::vector<Gen> odd{Gen::eta1, Gen::eta2, Gen::eta3, Gen::dt};
  if (alpha) odd.insert(odd.end(), {Gen::alpha1, Gen::alpha2, Gen::alpha3});
  DgaElement out;
  for (int t = 0; t < 3; ++t) {
    std::vector<Gen> word;
    int d = degree;
    while (d > 0) {
      if (d >= 2 && rng() % 3 == 0) {
        word.push_back(gen_omega(static_cast<int>(rng() % 3)));
        d -= 2;
      } else {
        word.push_back(odd[rng() % odd.size()]);
        d -= 1;
      }
    }
    std::shuffle(word.begin(), word.end(), rng);
    out += normalize_word(word, random_scalar(rng));
  }
  return out;
}

}  // namespace

TEST_CASE("scalar ring") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * b == b * a);
    CHECK(a - a == SymScalar());
    CHECK((a * b).derivative() == a.derivative() * b + a * b.derivative());
  }
  CHECK(v(Sym::S).derivative().is_zero());
  CHECK(v(Sym::a).derivative().is_zero());
  CHECK(v(Sym::f).derivative() == v(Sym::f, 1));
  CHECK(v(Sym::f).pow(-2).derivative() == SymScalar(-2) * v(Sym::f, 1) * v(Sym::f).pow(-3));
  CHECK((v(Sym::f) * v(Sym::h)).divided_by(v(Sym::f)) == v(Sym::h));
  CHECK_THROWS_AS(v(Sym::h).divided_by(v(Sym::f) + SymScalar(1)), PreconditionError);
}

TEST_CASE("substitution follows the chain rule") {
  const auto f = v(Sym::f), fp = v(Sym::f, 1), fpp = v(Sym::f, 2);
  auto h = v(Sym::h);
  auto expr = h * h.derivative() + v(Sym::S) * h;
  auto sub = expr.substitute(Sym::h, SymScalar(Rational(1, 2)) * fp);
  CHECK(sub == SymScalar(Rational(1, 4)) * fp * fpp + SymScalar(Rational(1, 2)) * v(Sym::S) * fp);
  CHECK(h.pow(-1).substitute(Sym::h, SymScalar(3) * f) == SymScalar(Rational(1, 3)) * f.pow(-1));
  CHECK_THROWS_AS(h.pow(-1).substitute(Sym::h, f + SymScalar(1)), PreconditionError);
  CHECK(fpp.substitute_var(SymVar{Sym::f, 2}, f) == f);
  CHECK(fp.substitute_var(SymVar{Sym::f, 2}, f) == fp);
}

TEST_CASE("canonical printing") {
  const auto f = v(Sym::f), fp = v(Sym::f, 1), fpp = v(Sym::f, 2), S = v(Sym::S);
  CHECK((SymScalar(3) * f * fpp + fp * fp - SymScalar(9) * S * f).str() == "3 f f'' + f'^2 - 9 S f");
  CHECK(SymScalar().str() == "0");
  CHECK((-f).str() == "-f");
  CHECK(f.pow(-1).str() == "f^-1");
}

TEST_CASE("normal form is confluent") {
  std::mt19937 rng(5);
  const Gen all[] = {Gen::eta1, Gen::eta2, Gen::eta3, Gen::alpha1, Gen::alpha2, Gen::alpha3,
                     Gen::dt,   Gen::omega1, Gen::omega2, Gen::omega3, Gen::V};
  int nonzero = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<Gen> word;
    int len = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < len; ++k) {
      int idx = static_cast<int>(rng() % 11);
      if (idx >= 7 && rng() % 2) idx = static_cast<int>(rng() % 7);
      word.push_back(all[idx]);
    }
    auto reference = normalize_word(word, SymScalar(1));
    if (!reference.is_zero()) ++nonzero;
    for (int shuffle = 0; shuffle < 5; ++shuffle) CHECK(normalize_word(word, SymScalar(1), &rng) == reference);
  }
  CHECK(nonzero > 50);
}

TEST_CASE("relations and graded commutativity") {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK((G(gen_omega(i)) ^ G(gen_omega(j))) == (i == j ? G(Gen::V) : DgaElement()));
  CHECK((G(Gen::omega2) ^ G(Gen::V)).is_zero());
  CHECK((G(Gen::V) ^ G(Gen::V)).is_zero());
  CHECK((G(Gen::eta1) ^ G(Gen::eta1)).is_zero());
  std::mt19937 rng(19);
  for (int trial = 0; trial < 60; ++trial) {
    int p = 1 + static_cast<int>(rng() % 3), q = 1 + static_cast<int>(rng() % 3);
    auto x = random_form(rng, p, true), y = random_form(rng, q, true), z = random_form(rng, 1, true);
    CHECK((x ^ y) == SymScalar((p * q) % 2 ? -1 : 1) * (y ^ x));
    CHECK(((x ^ y) ^ z) == (x ^ (y ^ z)));
  }
}

TEST_CASE("structure-equation differential") {
  const auto S = v(Sym::S);
  // Each dη_i contributes 2ω_i; the α and S terms repeat an η already present.
  CHECK(dga_d(G(Gen::eta1) ^ G(Gen::eta2) ^ G(Gen::eta3)) == SymScalar(2) * lemma_form());
  CHECK(dga_d(G(Gen::V)).is_zero());
  CHECK(dga_d(G(Gen::dt)).is_zero());
  CHECK(dga_d(G(Gen::eta1)) == SymScalar(2) * G(Gen::omega1) - (G(Gen::eta2) ^ G(Gen::alpha3)) +
                                   (G(Gen::eta3) ^ G(Gen::alpha2)) - S * (G(Gen::eta2) ^ G(Gen::eta3)));
  CHECK_THROWS_AS(dga_d(G(Gen::alpha2)), UnderdeterminedDifferential);
  CHECK_THROWS_AS(dga_d(dga_d(G(Gen::eta1))), UnderdeterminedDifferential);
  // Coefficients differentiate in t: d(f η1) = f' dt∧η1 + f dη1.
  const auto f = v(Sym::f);
  CHECK(dga_d(f * G(Gen::eta1)) == v(Sym::f, 1) * (G(Gen::dt) ^ G(Gen::eta1)) + f * dga_d(G(Gen::eta1)));
  CHECK(dga_d(f * G(Gen::eta1), DgaOptions{AlphaRule::Opaque, false}) == f * dga_d(G(Gen::eta1)));
  // With α = −Sη the structure equations become dη_i = 2ω_i + Sη_j∧η_k.
  auto d_eta = alpha_to_minus_s_eta(dga_d(G(Gen::eta3)));
  CHECK(d_eta == SymScalar(2) * G(Gen::omega3) + S * (G(Gen::eta1) ^ G(Gen::eta2)));
}

TEST_CASE("d squared vanishes for every S when alpha = -S eta") {
  for (Gen g : {Gen::eta1, Gen::eta2, Gen::eta3, Gen::omega1, Gen::omega2, Gen::omega3, Gen::V, Gen::dt})
    CHECK(d_squared_minus_s_eta(G(g)).is_zero());
  std::mt19937 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = random_form(rng, 1 + static_cast<int>(rng() % 4), false);
    CHECK(d_squared_minus_s_eta(x).is_zero());
  }
}

TEST_CASE("closed qc lemma") {
  auto r = verify_closedqc();
  CHECK(r.closed);
  CHECK(r.d_lemma.is_zero());
}

TEST_CASE("quaternionic Kaehler closure") {
  for (auto S : {std::optional<SymScalar>{}, std::optional<SymScalar>{SymScalar(2)}, std::optional<SymScalar>{SymScalar(0)}}) {
    auto r = S ? verify_qk_closure_at(*S) : verify_qk_closure();
    CHECK(r.alpha_free);
    CHECK(r.only_expected_monomials);
    CHECK(r.cyclic);
    CHECK(r.first.matches());
    CHECK(*r.first.factor == SymScalar(1));
    CHECK(r.second.matches());
    CHECK(*r.second.factor == SymScalar(1));
    CHECK(r.first_vanishes_at_h);
    CHECK(r.factored_check.matches());
    CHECK(r.ideal_remainder_clean);
    CHECK(r.ideal_multiplier_check.matches());
    CHECK(r.ideal_omega_check.matches());
    CHECK(r.ideal_eta_check.matches());
    CHECK(r.ideal_vanishes_on_solution);
    CHECK(r.ok());
  }
  auto r = verify_qk_closure();
  CHECK(r.omega_sq_dt.str() == "2 f f' - 4 f h");
  // The η_j∧η_k∧dt remainder carries 4h³/f.
  const auto h = v(Sym::h);
  CHECK(r.ideal_eta_dt == SymScalar(2) * h * v(Sym::h, 1) + v(Sym::S) * h - (SymScalar(4) * h.pow(3)).divided_by(v(Sym::f)));
}

TEST_CASE("Spin(7) closure") {
  for (auto S : {std::optional<SymScalar>{}, std::optional<SymScalar>{SymScalar(2)}}) {
    auto r = S ? verify_spin7_closure_at(*S) : verify_spin7_closure();
    CHECK(r.ok());
    CHECK(*r.first.factor == SymScalar(1));
    CHECK(*r.second.factor == SymScalar(1));
    CHECK(r.factored_check.factor->as_constant() == Rational(-1, 27));
  }
}

TEST_CASE("triaxial systems") {
  auto r = verify_triaxial_systems();
  CHECK_FALSE(r.opaque_alpha_cancels);
  CHECK(r.ok_qk());
  CHECK(r.ok_spin7());
  CHECK(r.ok_ideal_derived());
  for (int k = 0; k < 3; ++k) {
    CHECK(*r.qk_second_check[k].factor == SymScalar(2));
    CHECK(*r.spin7_second_check[k].factor == SymScalar(-2));
    CHECK(r.ideal_vs_cubic_s0[k].matches());
    CHECK_FALSE(r.ideal_vs_cubic[k].matches());
  }
  CHECK_FALSE(r.ok_ideal_cubic());
  // At f1 = f2 = f3 = h the ideal relation reduces to the single-function remainder.
  auto qk = verify_qk_closure();
  const auto h = v(Sym::h), f = v(Sym::f);
  auto collapse = [&](SymScalar x) {
    for (Sym s : {Sym::f1, Sym::f2, Sym::f3}) x = x.substitute(s, h);
    return x;
  };
  auto reduced_single = (qk.ideal_eta_dt - (h * h).divided_by(f) * qk.ideal_omega_dt) * f;
  CHECK(collapse(r.ideal[0]) == reduced_single);
}

TEST_CASE("hypo evolution matches the closure system") {
  auto r = verify_hypo_evolution();
  CHECK(r.ok());
  CHECK(r.a_vs_closure.factor->as_constant() == Rational(3));
  CHECK(r.b_vs_closure.factor->as_constant() == Rational(1));
  // Static data with S = 0 is not a solution: ∂_tΩ_Q vanishes while d of the potential does not.
  auto fixed = [](SymScalar x) {
    return x.substitute_var(SymVar{Sym::f, 1}, SymScalar(0))
        .substitute_var(SymVar{Sym::h, 1}, SymScalar(0))
        .substitute(Sym::S, SymScalar(0));
  };
  const auto f = v(Sym::f), h = v(Sym::h);
  CHECK(fixed(r.A) == SymScalar(-12) * f * h);
  CHECK(fixed(r.B) == SymScalar(-12) * h.pow(3));
}
