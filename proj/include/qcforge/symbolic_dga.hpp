#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qcforge/rational.hpp"

namespace qcforge {

// Symbols of the scalar ring. S and a are constants; the rest are functions of t.
enum class Sym : std::uint8_t { S, a, f, h, f1, f2, f3 };

bool sym_is_constant(Sym s);
// Functions fs(0) = f1 etc.
Sym sym_fs(int s);

// A symbol together with its derivative order, e.g. (f, 2) is f''.
struct SymVar {
  Sym base;
  int order = 0;
  auto operator<=>(const SymVar&) const = default;
};

// Sorted list of (variable, nonzero exponent). Negative exponents allow division by monomials.
using SymMonomial = std::vector<std::pair<SymVar, int>>;

// Laurent polynomial over ℚ in the symbols and their formal derivatives.
class SymScalar {
 public:
  SymScalar() = default;
  SymScalar(long c) : SymScalar(Rational(c)) {}  // NOLINT
  SymScalar(const Rational& c);                   // NOLINT
  static SymScalar var(Sym s, int order = 0);
  static SymScalar monomial(const SymMonomial& m, const Rational& c);

  const std::map<SymMonomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::optional<Rational> as_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }

  SymScalar& operator+=(const SymScalar& o);
  SymScalar& operator-=(const SymScalar& o);
  SymScalar& operator*=(const SymScalar& o);
  friend SymScalar operator+(SymScalar a, const SymScalar& b) { return a += b; }
  friend SymScalar operator-(SymScalar a, const SymScalar& b) { return a -= b; }
  friend SymScalar operator*(SymScalar a, const SymScalar& b) { return a *= b; }
  SymScalar operator-() const;
  friend bool operator==(const SymScalar& a, const SymScalar& b) { return a.terms_ == b.terms_; }

  // Division by a single monomial; anything else raises PreconditionError.
  SymScalar divided_by(const SymScalar& monomial) const;
  SymScalar pow(int e) const;

  // Formal d/dt; S and a are constant.
  SymScalar derivative() const;
  // Replaces every occurrence of `s` (and its derivatives, by differentiating `value`).
  // Negative powers of `s` require `value` to be a monomial.
  SymScalar substitute(Sym s, const SymScalar& value) const;
  // Replaces exactly the variable `v`, leaving its other derivative orders alone.
  SymScalar substitute_var(SymVar v, const SymScalar& value) const;
  bool contains(Sym s) const;

  // Canonical text: terms by decreasing degree, then lexicographic; e.g. "3 f f'' + f'^2 - 9 S f".
  std::string str() const;

 private:
  void add_term(const SymMonomial& m, const Rational& c);
  std::map<SymMonomial, Rational> terms_;
};

std::string sym_name(SymVar v);

// If a = q·b for a monomial q, returns q.
std::optional<SymScalar> monomial_ratio(const SymScalar& a, const SymScalar& b);

// Generators: odd ones η1 η2 η3 α1 α2 α3 dt occupy bits 0..6; the even part is 1, ω1, ω2, ω3 or V.
enum class Gen : std::uint8_t { eta1, eta2, eta3, alpha1, alpha2, alpha3, dt, omega1, omega2, omega3, V };

int gen_degree(Gen g);
std::string gen_name(Gen g);
Gen gen_eta(int s);
Gen gen_alpha(int s);
Gen gen_omega(int s);

enum class Even : std::uint8_t { one, omega1, omega2, omega3, V };

struct DgaMonomial {
  std::uint8_t odd = 0;
  Even even = Even::one;
  auto operator<=>(const DgaMonomial&) const = default;
  int degree() const;
};

// Graded-commutative algebra with the dimension-seven relations ω_iω_j = δ_ij V, ωV = 0, VV = 0.
class DgaElement {
 public:
  DgaElement() = default;
  static DgaElement gen(Gen g);
  static DgaElement scalar(const SymScalar& c);

  const std::map<DgaMonomial, SymScalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  SymScalar coefficient(const DgaMonomial& m) const;
  // Coefficient of the normal form of a product of generators (including its reordering sign).
  SymScalar coefficient(std::initializer_list<Gen> word) const;
  bool contains_alpha() const;
  // Degree of every monomial, or -1 for mixed degree / zero.
  int degree() const;

  DgaElement& operator+=(const DgaElement& o);
  DgaElement& operator-=(const DgaElement& o);
  friend DgaElement operator+(DgaElement a, const DgaElement& b) { return a += b; }
  friend DgaElement operator-(DgaElement a, const DgaElement& b) { return a -= b; }
  DgaElement operator-() const;
  friend DgaElement operator*(const SymScalar& c, const DgaElement& x);
  friend DgaElement operator*(const DgaElement& x, const SymScalar& c) { return c * x; }
  friend DgaElement operator^(const DgaElement& a, const DgaElement& b);  // wedge
  friend bool operator==(const DgaElement& a, const DgaElement& b) { return a.terms_ == b.terms_; }

  DgaElement map_coefficients(const std::function<SymScalar(const SymScalar&)>& fn) const;
  DgaElement substitute(Sym s, const SymScalar& value) const;
  DgaElement substitute_var(SymVar v, const SymScalar& value) const;
  std::string str() const;

  void add(const DgaMonomial& m, const SymScalar& c);

 private:
  std::map<DgaMonomial, SymScalar> terms_;
};

std::string dga_monomial_name(const DgaMonomial& m);

// Rewrites a raw word of generators to normal form by repeatedly applying one applicable rule:
// swapping an adjacent out-of-order pair (with its Koszul sign) or contracting an adjacent pair by a
// relation. With `rng` the rule is picked at random, otherwise left to right.
DgaElement normalize_word(std::vector<Gen> word, const SymScalar& coefficient, std::mt19937* rng = nullptr);

// How dα_s is treated. Opaque: requesting it raises UnderdeterminedDifferential.
// MinusSEta: α_s = −Sη_s, the 3-Sasakian normalisation generalised to a symbolic S.
enum class AlphaRule { Opaque, MinusSEta };

struct DgaOptions {
  AlphaRule alpha = AlphaRule::Opaque;
  // When false, coefficients are treated as constants: the exterior derivative of the slice.
  bool time_derivative = true;
};

// Anti-derivation with dη_i = 2ω_i − η_j∧α_k + η_k∧α_j − Sη_j∧η_k, dω_i = ω_j∧α_k − ω_k∧α_j,
// d(dt) = 0, dV from V = ω1∧ω1 and dc = c′dt for scalars.
DgaElement dga_d(const DgaElement& x, const DgaOptions& opts = {});

// Replaces α_s by −Sη_s.
DgaElement alpha_to_minus_s_eta(const DgaElement& x);

// ω1∧η2∧η3 + ω2∧η3∧η1 + ω3∧η1∧η2.
DgaElement lemma_form();

struct ClosedQcResult {
  DgaElement d_lemma;
  bool closed = false;
};

ClosedQcResult verify_closedqc();

// Comparison of a derived coefficient with an expected expression: holds if derived = factor·expected
// for a monomial factor.
struct CoefficientCheck {
  std::string label;
  SymScalar derived;
  SymScalar expected;
  std::optional<SymScalar> factor;
  bool matches() const { return factor.has_value(); }
};

struct QkClosureResult {
  DgaElement d_phi;
  bool alpha_free = false;
  bool only_expected_monomials = false;
  SymScalar omega_sq_dt;  // coefficient of ω_i∧ω_i∧dt
  SymScalar omega_eta_eta_dt;  // coefficient of ω_i∧η_j∧η_k∧dt, equal for every cyclic (i,j,k)
  bool cyclic = false;
  CoefficientCheck first, second;
  SymScalar factored;  // second coefficient at h = f'/2
  CoefficientCheck factored_check;
  bool first_vanishes_at_h = false;
  // Multipliers and remainder of dF_i = (α_k + λη_k)∧F_j − (α_j + λη_j)∧F_k + r_ω ω_i∧dt + r_η η_j∧η_k∧dt.
  SymScalar ideal_multiplier;
  SymScalar ideal_omega_dt, ideal_eta_dt;
  bool ideal_remainder_clean = false;
  CoefficientCheck ideal_multiplier_check, ideal_omega_check, ideal_eta_check;
  bool ideal_vanishes_on_solution = false;
  bool ok() const;
};

QkClosureResult verify_qk_closure();
QkClosureResult verify_qk_closure_at(const SymScalar& S);

struct Spin7ClosureResult {
  DgaElement d_psi;
  bool alpha_free = false;
  bool only_expected_monomials = false;
  bool cyclic = false;
  SymScalar omega_sq_dt, omega_eta_eta_dt;
  CoefficientCheck first, second;
  SymScalar factored;
  CoefficientCheck factored_check;
  bool first_vanishes_at_h = false;
  bool ok() const;
};

Spin7ClosureResult verify_spin7_closure();
Spin7ClosureResult verify_spin7_closure_at(const SymScalar& S);

// Uses the structure equations dη_i = 2ω_i + Sη_j∧η_k (α = −Sη), which hold on the Heisenberg group,
// the 3-Sasakian structures and 𝔩₁. With α opaque the diagonal ansatz with unequal f_i does not close.
struct TriaxialResult {
  bool opaque_alpha_cancels = false;
  // QK closure: ω∧ω∧dt coefficient and the three ω_i∧η_j∧η_k∧dt coefficients.
  SymScalar qk_first;
  std::array<SymScalar, 3> qk_second;
  CoefficientCheck qk_first_check;
  std::array<CoefficientCheck, 3> qk_second_check;
  bool qk_alpha_free = false;
  bool qk_only_expected = false;
  // Spin(7) closure with symbolic S, and its S = 0 specialisation.
  SymScalar spin7_first;
  std::array<SymScalar, 3> spin7_second;
  CoefficientCheck spin7_first_check;
  std::array<CoefficientCheck, 3> spin7_second_check;  // at S = 0
  bool spin7_alpha_free = false;
  bool spin7_only_expected = false;
  // Ideal condition: remainder of dF_k modulo ⟨F1, F2, F3⟩, as the coefficient of η_i∧η_j∧dt times f.
  std::array<SymScalar, 3> ideal;
  std::array<bool, 3> ideal_remainder_clean{};
  std::array<CoefficientCheck, 3> ideal_vs_cubic;      // cubic S term S f f_i f_j − S f f_k
  std::array<CoefficientCheck, 3> ideal_vs_derived;      // S f (f_i + f_j) − S f f_k
  std::array<CoefficientCheck, 3> ideal_vs_cubic_s0;   // both at S = 0
  bool ok_qk() const;
  bool ok_spin7() const;
  bool ok_ideal_cubic() const;
  bool ok_ideal_derived() const;
};

TriaxialResult verify_triaxial_systems();

struct HypoEvolutionResult {
  // ∂_tΩ_Q − d[6η1η2η3 + 2Σω_sη_s] = A·ω1∧ω1 + B·(ω1∧η2∧η3 + cyclic)
  DgaElement residual_form;
  SymScalar A, B;
  bool alpha_free = false;
  bool only_expected_monomials = false;
  CoefficientCheck a_vs_closure, b_vs_closure;
  // Residual form at h = f'/2 with f'' eliminated through ff'' = f'^2 − Sf.
  bool vanishes_on_solution = false;
  bool ok() const;
};

HypoEvolutionResult verify_hypo_evolution();

// d²x for the 3-Sasakian-like normalisation α = −Sη; zero on all x.
DgaElement d_squared_minus_s_eta(const DgaElement& x);

}  // namespace qcforge
