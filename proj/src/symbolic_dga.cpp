#include "qcforge/symbolic_dga.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "qcforge/errors.hpp"

namespace qcforge {

bool sym_is_constant(Sym s) { return s == Sym::S || s == Sym::a; }

Sym sym_fs(int s) { return static_cast<Sym>(static_cast<int>(Sym::f1) + s); }

namespace {

SymMonomial mono_mul(const SymMonomial& x, const SymMonomial& y) {
  SymMonomial out;
  out.reserve(x.size() + y.size());
  size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      out.push_back(x[i++]);
    } else if (i == x.size() || y[j].first < x[i].first) {
      out.push_back(y[j++]);
    } else {
      int e = x[i].second + y[j].second;
      if (e != 0) out.emplace_back(x[i].first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

SymMonomial mono_inverse(SymMonomial m) {
  for (auto& [v, e] : m) e = -e;
  return m;
}

int mono_degree(const SymMonomial& m) {
  int d = 0;
  for (const auto& [v, e] : m) d += e;
  return d;
}

}  // namespace

SymScalar::SymScalar(const Rational& c) {
  if (!c.is_zero()) terms_[{}] = c;
}

SymScalar SymScalar::var(Sym s, int order) {
  if (sym_is_constant(s) && order > 0) return {};
  return monomial({{SymVar{s, order}, 1}}, Rational(1));
}

SymScalar SymScalar::monomial(const SymMonomial& m, const Rational& c) {
  SymScalar out;
  out.add_term(m, c);
  return out;
}

void SymScalar::add_term(const SymMonomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

std::optional<Rational> SymScalar::as_constant() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
  return std::nullopt;
}

SymScalar& SymScalar::operator+=(const SymScalar& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

SymScalar& SymScalar::operator-=(const SymScalar& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

SymScalar& SymScalar::operator*=(const SymScalar& o) {
  SymScalar out;
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : o.terms_) out.add_term(mono_mul(m1, m2), c1 * c2);
  *this = std::move(out);
  return *this;
}

SymScalar SymScalar::operator-() const {
  SymScalar out;
  for (const auto& [m, c] : terms_) out.terms_[m] = -c;
  return out;
}

SymScalar SymScalar::divided_by(const SymScalar& d) const {
  if (!d.is_monomial()) throw PreconditionError("division by a non-monomial " + d.str());
  const auto& [m, c] = *d.terms_.begin();
  return *this * monomial(mono_inverse(m), Rational(1) / c);
}

SymScalar SymScalar::pow(int e) const {
  if (e < 0) return SymScalar(1).divided_by(pow(-e));
  SymScalar out(1);
  for (int i = 0; i < e; ++i) out *= *this;
  return out;
}

SymScalar SymScalar::derivative() const {
  SymScalar out;
  for (const auto& [m, c] : terms_) {
    for (size_t p = 0; p < m.size(); ++p) {
      const auto& [v, e] = m[p];
      if (sym_is_constant(v.base)) continue;
      SymMonomial rest = m;
      if (e == 1) {
        rest.erase(rest.begin() + p);
      } else {
        rest[p].second = e - 1;
      }
      out.add_term(mono_mul(rest, {{SymVar{v.base, v.order + 1}, 1}}), c * Rational(e));
    }
  }
  return out;
}

namespace {

template <class Match, class Value>
SymScalar substitute_impl(const SymScalar& x, Match match, Value value) {
  SymScalar out;
  for (const auto& [m, c] : x.terms()) {
    SymScalar term(c);
    SymMonomial keep;
    for (const auto& [v, e] : m) {
      if (match(v)) {
        term *= value(v).pow(e);
      } else {
        keep.emplace_back(v, e);
      }
    }
    out += SymScalar::monomial(keep, Rational(1)) * term;
  }
  return out;
}

}  // namespace

SymScalar SymScalar::substitute(Sym s, const SymScalar& value) const {
  std::vector<SymScalar> derivs{value};
  return substitute_impl(
      *this, [&](SymVar v) { return v.base == s; },
      [&](SymVar v) {
        while (static_cast<int>(derivs.size()) <= v.order) derivs.push_back(derivs.back().derivative());
        return derivs[v.order];
      });
}

SymScalar SymScalar::substitute_var(SymVar target, const SymScalar& value) const {
  return substitute_impl(
      *this, [&](SymVar v) { return v == target; }, [&](SymVar) { return value; });
}

bool SymScalar::contains(Sym s) const {
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m)
      if (v.base == s) return true;
  return false;
}

std::string sym_name(SymVar v) {
  static const char* names[] = {"S", "a", "f", "h", "f1", "f2", "f3"};
  std::string out = names[static_cast<int>(v.base)];
  if (v.order <= 3) {
    out += std::string(v.order, '\'');
  } else {
    out += "^(" + std::to_string(v.order) + ")";
  }
  return out;
}

std::string SymScalar::str() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<SymMonomial, Rational>> sorted(terms_.begin(), terms_.end());
  // Higher degree first; within a degree, terms with fewer constant symbols (S, a) first.
  auto constants = [](const SymMonomial& m) {
    int n = 0;
    for (const auto& [v, e] : m)
      if (sym_is_constant(v.base)) n += e;
    return n;
  };
  std::stable_sort(sorted.begin(), sorted.end(), [&](const auto& x, const auto& y) {
    int dx = mono_degree(x.first), dy = mono_degree(y.first);
    if (dx != dy) return dx > dy;
    return constants(x.first) < constants(y.first);
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : sorted) {
    Rational mag = c.abs();
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (mag != Rational(1) || m.empty()) {
      os << mag;
      wrote = true;
    }
    for (const auto& [v, e] : m) {
      if (wrote) os << " ";
      os << sym_name(v);
      if (e != 1) os << "^" << e;
      wrote = true;
    }
  }
  return os.str();
}

std::optional<SymScalar> monomial_ratio(const SymScalar& a, const SymScalar& b) {
  if (b.is_zero()) return a.is_zero() ? std::optional<SymScalar>(SymScalar(1)) : std::nullopt;
  if (a.is_zero()) return std::nullopt;
  const auto& [bm, bc] = *b.terms().begin();
  for (const auto& [am, ac] : a.terms()) {
    SymScalar q = SymScalar::monomial(mono_mul(am, mono_inverse(bm)), ac / bc);
    if (q * b == a) return q;
  }
  return std::nullopt;
}

// ---- generators and monomials ----

int gen_degree(Gen g) {
  if (g <= Gen::dt) return 1;
  return g == Gen::V ? 4 : 2;
}

std::string gen_name(Gen g) {
  static const char* names[] = {"eta1", "eta2", "eta3", "alpha1", "alpha2", "alpha3",
                                "dt",   "omega1", "omega2", "omega3", "V"};
  return names[static_cast<int>(g)];
}

Gen gen_eta(int s) { return static_cast<Gen>(s); }
Gen gen_alpha(int s) { return static_cast<Gen>(3 + s); }
Gen gen_omega(int s) { return static_cast<Gen>(7 + s); }

namespace {

bool is_odd(Gen g) { return g <= Gen::dt; }

Even even_of(Gen g) {
  switch (g) {
    case Gen::omega1: return Even::omega1;
    case Gen::omega2: return Even::omega2;
    case Gen::omega3: return Even::omega3;
    case Gen::V: return Even::V;
    default: return Even::one;
  }
}

Gen gen_of(Even e) {
  switch (e) {
    case Even::omega1: return Gen::omega1;
    case Even::omega2: return Gen::omega2;
    case Even::omega3: return Gen::omega3;
    default: return Gen::V;
  }
}

std::optional<Even> even_mul(Even x, Even y) {
  if (x == Even::one) return y;
  if (y == Even::one) return x;
  if (x == y && x != Even::V) return Even::V;
  return std::nullopt;
}

// Sign of x∧y for disjoint sorted odd masks.
int odd_sign(std::uint8_t x, std::uint8_t y) {
  int swaps = 0;
  for (int b = 0; b < 7; ++b)
    if (y & (1u << b)) swaps += std::popcount(static_cast<unsigned>(x >> (b + 1)));
  return swaps % 2 ? -1 : 1;
}

std::vector<Gen> word_of(const DgaMonomial& m) {
  std::vector<Gen> out;
  for (int b = 0; b < 7; ++b)
    if (m.odd & (1u << b)) out.push_back(static_cast<Gen>(b));
  if (m.even != Even::one) out.push_back(gen_of(m.even));
  return out;
}

}  // namespace

int DgaMonomial::degree() const {
  int d = std::popcount(static_cast<unsigned>(odd));
  if (even == Even::V) return d + 4;
  if (even != Even::one) return d + 2;
  return d;
}

std::string dga_monomial_name(const DgaMonomial& m) {
  auto w = word_of(m);
  if (w.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) out += (i ? "^" : "") + gen_name(w[i]);
  return out;
}

DgaElement DgaElement::gen(Gen g) {
  DgaElement out;
  DgaMonomial m;
  if (is_odd(g)) {
    m.odd = static_cast<std::uint8_t>(1u << static_cast<int>(g));
  } else {
    m.even = even_of(g);
  }
  out.add(m, SymScalar(1));
  return out;
}

DgaElement DgaElement::scalar(const SymScalar& c) {
  DgaElement out;
  out.add(DgaMonomial{}, c);
  return out;
}

void DgaElement::add(const DgaMonomial& m, const SymScalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

SymScalar DgaElement::coefficient(const DgaMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? SymScalar() : it->second;
}

SymScalar DgaElement::coefficient(std::initializer_list<Gen> word) const {
  DgaElement n = normalize_word(std::vector<Gen>(word), SymScalar(1));
  if (n.is_zero()) throw PreconditionError("coefficient of a word that vanishes by the relations");
  const auto& [m, sign] = *n.terms_.begin();
  return coefficient(m) * sign;
}

bool DgaElement::contains_alpha() const {
  for (const auto& [m, c] : terms_)
    if (m.odd & 0b111000) return true;
  return false;
}

int DgaElement::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) {
    if (d >= 0 && m.degree() != d) return -1;
    d = m.degree();
  }
  return d;
}

DgaElement& DgaElement::operator+=(const DgaElement& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

DgaElement& DgaElement::operator-=(const DgaElement& o) {
  for (const auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

DgaElement DgaElement::operator-() const {
  DgaElement out;
  for (const auto& [m, c] : terms_) out.terms_[m] = -c;
  return out;
}

DgaElement operator*(const SymScalar& c, const DgaElement& x) {
  DgaElement out;
  if (c.is_zero()) return out;
  for (const auto& [m, k] : x.terms_) out.add(m, c * k);
  return out;
}

DgaElement operator^(const DgaElement& a, const DgaElement& b) {
  DgaElement out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      if (ma.odd & mb.odd) continue;
      auto e = even_mul(ma.even, mb.even);
      if (!e) continue;
      DgaMonomial m{static_cast<std::uint8_t>(ma.odd | mb.odd), *e};
      out.add(m, ca * cb * SymScalar(odd_sign(ma.odd, mb.odd)));
    }
  }
  return out;
}

DgaElement DgaElement::map_coefficients(const std::function<SymScalar(const SymScalar&)>& fn) const {
  DgaElement out;
  for (const auto& [m, c] : terms_) out.add(m, fn(c));
  return out;
}

DgaElement DgaElement::substitute(Sym s, const SymScalar& value) const {
  return map_coefficients([&](const SymScalar& c) { return c.substitute(s, value); });
}

DgaElement DgaElement::substitute_var(SymVar v, const SymScalar& value) const {
  return map_coefficients([&](const SymScalar& c) { return c.substitute_var(v, value); });
}

std::string DgaElement::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += "\n";
    out += "(" + c.str() + ") " + dga_monomial_name(m);
  }
  return out;
}

DgaElement normalize_word(std::vector<Gen> word, const SymScalar& coefficient, std::mt19937* rng) {
  SymScalar c = coefficient;
  auto key = [](Gen g) { return static_cast<int>(g); };
  for (;;) {
    if (c.is_zero()) return {};
    std::vector<size_t> candidates;
    for (size_t p = 0; p + 1 < word.size(); ++p) {
      Gen x = word[p], y = word[p + 1];
      bool contract = (is_odd(x) && x == y) || (!is_odd(x) && !is_odd(y));
      if (contract || key(x) > key(y)) candidates.push_back(p);
    }
    if (candidates.empty()) break;
    size_t p = candidates.front();
    if (rng) p = candidates[std::uniform_int_distribution<size_t>(0, candidates.size() - 1)(*rng)];
    Gen x = word[p], y = word[p + 1];
    if (is_odd(x) && x == y) return {};
    if (!is_odd(x) && !is_odd(y)) {
      auto e = even_mul(even_of(x), even_of(y));
      if (!e) return {};
      word.erase(word.begin() + p, word.begin() + p + 2);
      word.insert(word.begin() + p, gen_of(*e));
      continue;
    }
    if (is_odd(x) && is_odd(y)) c = -c;
    std::swap(word[p], word[p + 1]);
  }
  DgaMonomial m;
  for (Gen g : word) {
    if (is_odd(g)) {
      m.odd |= static_cast<std::uint8_t>(1u << key(g));
    } else {
      m.even = even_of(g);
    }
  }
  DgaElement out;
  out.add(m, c);
  return out;
}

// ---- differential ----

namespace {

DgaElement G(Gen g) { return DgaElement::gen(g); }
SymScalar sym(Sym s, int order = 0) { return SymScalar::var(s, order); }

DgaElement d_gen(Gen g, const DgaOptions& opts) {
  const SymScalar S = sym(Sym::S);
  auto d_eta = [&](int i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    return SymScalar(2) * G(gen_omega(i)) - (G(gen_eta(j)) ^ G(gen_alpha(k))) + (G(gen_eta(k)) ^ G(gen_alpha(j))) -
           S * (G(gen_eta(j)) ^ G(gen_eta(k)));
  };
  auto d_omega = [&](int i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    return (G(gen_omega(j)) ^ G(gen_alpha(k))) - (G(gen_omega(k)) ^ G(gen_alpha(j)));
  };
  switch (g) {
    case Gen::eta1:
    case Gen::eta2:
    case Gen::eta3:
      return d_eta(static_cast<int>(g));
    case Gen::alpha1:
    case Gen::alpha2:
    case Gen::alpha3:
      if (opts.alpha == AlphaRule::Opaque)
        throw UnderdeterminedDifferential("d" + gen_name(g) + " is not determined by the structure equations");
      return -S * d_eta(static_cast<int>(g) - 3);
    case Gen::dt:
      return {};
    case Gen::omega1:
    case Gen::omega2:
    case Gen::omega3:
      return d_omega(static_cast<int>(g) - 7);
    case Gen::V:
      return (d_omega(0) ^ G(Gen::omega1)) + (G(Gen::omega1) ^ d_omega(0));
  }
  return {};
}

}  // namespace

DgaElement dga_d(const DgaElement& x, const DgaOptions& opts) {
  DgaElement out;
  for (const auto& [m, c] : x.terms()) {
    auto word = word_of(m);
    DgaElement mono;
    mono.add(m, SymScalar(1));
    if (opts.time_derivative) {
      SymScalar dc = c.derivative();
      if (!dc.is_zero()) out += dc * (G(Gen::dt) ^ mono);
    }
    int deg_before = 0;
    for (size_t p = 0; p < word.size(); ++p) {
      DgaElement term = DgaElement::scalar(SymScalar(1));
      for (size_t q = 0; q < p; ++q) term = term ^ G(word[q]);
      term = term ^ d_gen(word[p], opts);
      for (size_t q = p + 1; q < word.size(); ++q) term = term ^ G(word[q]);
      out += (deg_before % 2 ? -c : c) * term;
      deg_before += gen_degree(word[p]);
    }
  }
  return out;
}

DgaElement alpha_to_minus_s_eta(const DgaElement& x) {
  const SymScalar S = sym(Sym::S);
  DgaElement out;
  for (const auto& [m, c] : x.terms()) {
    DgaElement term = DgaElement::scalar(c);
    for (Gen g : word_of(m)) {
      if (g >= Gen::alpha1 && g <= Gen::alpha3) {
        term = term ^ (-S * G(gen_eta(static_cast<int>(g) - 3)));
      } else {
        term = term ^ G(g);
      }
    }
    out += term;
  }
  return out;
}

DgaElement d_squared_minus_s_eta(const DgaElement& x) {
  DgaOptions opts{AlphaRule::MinusSEta, true};
  DgaElement y = alpha_to_minus_s_eta(dga_d(alpha_to_minus_s_eta(x), opts));
  return alpha_to_minus_s_eta(dga_d(y, opts));
}

DgaElement lemma_form() {
  DgaElement out;
  for (int i = 0; i < 3; ++i)
    out += G(gen_omega(i)) ^ G(gen_eta((i + 1) % 3)) ^ G(gen_eta((i + 2) % 3));
  return out;
}

ClosedQcResult verify_closedqc() {
  ClosedQcResult r;
  r.d_lemma = dga_d(lemma_form());
  r.closed = r.d_lemma.is_zero();
  return r;
}

// ---- closure computations ----

namespace {

CoefficientCheck check(std::string label, const SymScalar& derived, const SymScalar& expected) {
  CoefficientCheck c{std::move(label), derived, expected, std::nullopt};
  if (!expected.is_zero()) c.factor = monomial_ratio(derived, expected);
  return c;
}

// Only monomials from `allowed` occur.
bool only_monomials(const DgaElement& x, const std::vector<DgaMonomial>& allowed) {
  for (const auto& [m, c] : x.terms())
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) return false;
  return true;
}

DgaMonomial mono_of(std::initializer_list<Gen> word) {
  DgaElement n = normalize_word(std::vector<Gen>(word), SymScalar(1));
  return n.terms().begin()->first;
}

std::vector<DgaMonomial> closure_monomials() {
  return {mono_of({Gen::V, Gen::dt}), mono_of({Gen::omega1, Gen::eta2, Gen::eta3, Gen::dt}),
          mono_of({Gen::omega2, Gen::eta3, Gen::eta1, Gen::dt}), mono_of({Gen::omega3, Gen::eta1, Gen::eta2, Gen::dt})};
}

SymScalar coefficient_cyclic(const DgaElement& x, int i) {
  return x.coefficient({gen_omega(i), gen_eta((i + 1) % 3), gen_eta((i + 2) % 3), Gen::dt});
}

// F_i = f ω_i + sign_i (p_i η_j∧η_k + q_i η_i∧dt).
std::array<DgaElement, 3> two_forms(const SymScalar& f, const std::array<SymScalar, 3>& p,
                                    const std::array<SymScalar, 3>& q, const std::array<int, 3>& sign) {
  std::array<DgaElement, 3> F;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    F[i] = f * G(gen_omega(i)) + SymScalar(sign[i]) * (p[i] * (G(gen_eta(j)) ^ G(gen_eta(k))) +
                                                        q[i] * (G(gen_eta(i)) ^ G(Gen::dt)));
  }
  return F;
}

DgaElement fix_s(const DgaElement& x, const std::optional<SymScalar>& S) {
  return S ? x.substitute(Sym::S, *S) : x;
}

SymScalar fix_s(const SymScalar& x, const std::optional<SymScalar>& S) {
  return S ? x.substitute(Sym::S, *S) : x;
}

// Remainder of dF_k modulo the ideal, with multipliers fixed by the ω∧η components.
struct IdealReduction {
  SymScalar lambda, mu;
  SymScalar omega_dt, eta_dt;  // before eliminating ω_k∧dt
  SymScalar reduced;           // η_i∧η_j∧dt coefficient after eliminating ω_k∧dt with F_k∧dt
  bool clean = false;
  bool two_components = false;  // remainder spanned by ω_k∧dt and η_i∧η_j∧dt
};

using DFn = std::function<DgaElement(const DgaElement&)>;

DgaElement d_minus_s_eta(const DgaElement& x) {
  return alpha_to_minus_s_eta(dga_d(x, DgaOptions{AlphaRule::MinusSEta, true}));
}

IdealReduction reduce_mod_ideal(const std::array<DgaElement, 3>& F, const SymScalar& f, int k, const DFn& d,
                                bool with_alpha) {
  const int i = (k + 1) % 3, j = (k + 2) % 3;
  DgaElement dF = d(F[k]);
  IdealReduction r;
  r.lambda = dF.coefficient({gen_omega(i), gen_eta(j)}).divided_by(f);
  r.mu = -dF.coefficient({gen_omega(j), gen_eta(i)}).divided_by(f);
  DgaElement mj = r.lambda * G(gen_eta(j)), mi = r.mu * G(gen_eta(i));
  if (with_alpha) {
    mj += G(gen_alpha(j));
    mi += G(gen_alpha(i));
  }
  DgaElement rem = dF - (mj ^ F[i]) + (mi ^ F[j]);
  r.omega_dt = rem.coefficient({gen_omega(k), Gen::dt});
  r.eta_dt = rem.coefficient({gen_eta(i), gen_eta(j), Gen::dt});
  r.two_components = !rem.contains_alpha() &&
                     only_monomials(rem, {mono_of({gen_omega(k), Gen::dt}), mono_of({gen_eta(i), gen_eta(j), Gen::dt})});
  DgaElement reduced = rem - r.omega_dt.divided_by(f) * (F[k] ^ G(Gen::dt));
  r.reduced = reduced.coefficient({gen_eta(i), gen_eta(j), Gen::dt});
  r.clean = !reduced.contains_alpha() && only_monomials(reduced, {mono_of({gen_eta(i), gen_eta(j), Gen::dt})});
  return r;
}

SymScalar eliminate_fpp_qk(const SymScalar& x) {
  // ff'' = f'^2 − S f
  const SymScalar f = sym(Sym::f), fp = sym(Sym::f, 1), S = sym(Sym::S);
  return x.substitute_var(SymVar{Sym::f, 2}, (fp * fp - S * f).divided_by(f));
}

QkClosureResult qk_closure(const std::optional<SymScalar>& Sval) {
  const SymScalar f = sym(Sym::f), h = sym(Sym::h), S = Sval ? *Sval : sym(Sym::S);
  const SymScalar fp = sym(Sym::f, 1);
  const SymScalar h_sol = SymScalar(Rational(1, 2)) * fp;
  auto F = two_forms(f, {h * h, h * h, h * h}, {-h, -h, -h}, {1, 1, 1});
  for (auto& Fi : F) Fi = fix_s(Fi, Sval);
  DgaElement Phi;
  for (const auto& Fi : F) Phi += Fi ^ Fi;

  QkClosureResult r;
  r.d_phi = fix_s(dga_d(Phi), Sval);
  r.alpha_free = !r.d_phi.contains_alpha();
  r.only_expected_monomials = only_monomials(r.d_phi, closure_monomials());
  // Σ_(ijk) c ω_i∧ω_i∧dt = 3c V∧dt.
  r.omega_sq_dt = r.d_phi.coefficient({Gen::V, Gen::dt}) * SymScalar(Rational(1, 3));
  r.omega_eta_eta_dt = coefficient_cyclic(r.d_phi, 0);
  r.cyclic = coefficient_cyclic(r.d_phi, 1) == r.omega_eta_eta_dt && coefficient_cyclic(r.d_phi, 2) == r.omega_eta_eta_dt;

  r.first = check("(f^2)' - 4 f h", r.omega_sq_dt, (f * f).derivative() - SymScalar(4) * f * h);
  r.second = check("2 (f h^2)' + 2 S f h - 12 h^3", r.omega_eta_eta_dt,
                   SymScalar(2) * (f * h * h).derivative() + SymScalar(2) * S * f * h - SymScalar(12) * h.pow(3));
  r.first_vanishes_at_h = r.omega_sq_dt.substitute(Sym::h, h_sol).is_zero();
  r.factored = r.omega_eta_eta_dt.substitute(Sym::h, h_sol);
  r.factored_check = check("f' (f f'' - f'^2 + S f)", r.factored, fp * (f * sym(Sym::f, 2) - fp * fp + S * f));

  auto ideal = reduce_mod_ideal(F, f, 0, [&](const DgaElement& x) { return fix_s(dga_d(x), Sval); }, true);
  r.ideal_multiplier = ideal.lambda;
  r.ideal_omega_dt = ideal.omega_dt;
  r.ideal_eta_dt = ideal.eta_dt;
  r.ideal_remainder_clean = ideal.two_components;
  r.ideal_multiplier_check = check("2 h^2 / f", ideal.lambda, (SymScalar(2) * h * h).divided_by(f));
  if (!(ideal.lambda == ideal.mu)) r.ideal_multiplier_check.factor.reset();
  r.ideal_omega_check = check("f' - 2 h", ideal.omega_dt, fp - SymScalar(2) * h);
  r.ideal_eta_check = check("2 h h' + h S - 4 h^3 / f", ideal.eta_dt,
                            SymScalar(2) * h * h.derivative() + h * S - (SymScalar(4) * h.pow(3)).divided_by(f));
  auto on_solution = [&](const SymScalar& x) { return fix_s(eliminate_fpp_qk(x.substitute(Sym::h, h_sol)), Sval); };
  r.ideal_vanishes_on_solution = on_solution(ideal.omega_dt).is_zero() && on_solution(ideal.eta_dt).is_zero();
  return r;
}

Spin7ClosureResult spin7_closure(const std::optional<SymScalar>& Sval) {
  const SymScalar f = sym(Sym::f), h = sym(Sym::h), S = Sval ? *Sval : sym(Sym::S);
  const SymScalar fp = sym(Sym::f, 1);
  auto F = two_forms(f, {h * h, h * h, h * h}, {h, h, h}, {-1, -1, 1});
  DgaElement Psi = (F[0] ^ F[0]) + (F[1] ^ F[1]) - (F[2] ^ F[2]);
  Spin7ClosureResult r;
  r.d_psi = fix_s(dga_d(Psi), Sval);
  r.alpha_free = !r.d_psi.contains_alpha();
  r.only_expected_monomials = only_monomials(r.d_psi, closure_monomials());
  r.omega_sq_dt = r.d_psi.coefficient({Gen::omega1, Gen::omega1, Gen::dt});
  r.omega_eta_eta_dt = coefficient_cyclic(r.d_psi, 0);
  r.cyclic = coefficient_cyclic(r.d_psi, 1) == r.omega_eta_eta_dt && coefficient_cyclic(r.d_psi, 2) == r.omega_eta_eta_dt;
  r.first = check("2 f f' - 12 f h", r.omega_sq_dt, SymScalar(2) * f * fp - SymScalar(12) * f * h);
  r.second = check("-(2 (f h^2)' - 2 f h S - 4 h^3)", r.omega_eta_eta_dt,
                   -(SymScalar(2) * (f * h * h).derivative() - SymScalar(2) * f * h * S - SymScalar(4) * h.pow(3)));
  const SymScalar h_sol = SymScalar(Rational(1, 6)) * fp;
  r.first_vanishes_at_h = r.omega_sq_dt.substitute(Sym::h, h_sol).is_zero();
  r.factored = r.omega_eta_eta_dt.substitute(Sym::h, h_sol);
  r.factored_check = check("f' (3 f f'' + f'^2 - 9 S f)", r.factored,
                           fp * (SymScalar(3) * f * sym(Sym::f, 2) + fp * fp - SymScalar(9) * S * f));
  return r;
}

}  // namespace

bool QkClosureResult::ok() const {
  return alpha_free && only_expected_monomials && cyclic && first.matches() && second.matches() &&
         first_vanishes_at_h && factored_check.matches() && ideal_remainder_clean &&
         ideal_multiplier_check.matches() && ideal_omega_check.matches() && ideal_eta_check.matches() &&
         ideal_vanishes_on_solution;
}

bool Spin7ClosureResult::ok() const {
  return alpha_free && only_expected_monomials && cyclic && first.matches() && second.matches() &&
         first_vanishes_at_h && factored_check.matches();
}

QkClosureResult verify_qk_closure() { return qk_closure(std::nullopt); }
QkClosureResult verify_qk_closure_at(const SymScalar& S) { return qk_closure(S); }
Spin7ClosureResult verify_spin7_closure() { return spin7_closure(std::nullopt); }
Spin7ClosureResult verify_spin7_closure_at(const SymScalar& S) { return spin7_closure(S); }

TriaxialResult verify_triaxial_systems() {
  const SymScalar f = sym(Sym::f), fp = sym(Sym::f, 1), S = sym(Sym::S);
  std::array<SymScalar, 3> fs{sym(Sym::f1), sym(Sym::f2), sym(Sym::f3)};
  const SymScalar prod = fs[0] * fs[1] * fs[2];
  const SymScalar sum = fs[0] + fs[1] + fs[2];
  std::array<SymScalar, 3> pair, neg_fs;
  for (int i = 0; i < 3; ++i) {
    pair[i] = fs[(i + 1) % 3] * fs[(i + 2) % 3];
    neg_fs[i] = -fs[i];
  }
  TriaxialResult r;

  auto qk = two_forms(f, pair, neg_fs, {1, 1, 1});
  DgaElement Phi;
  for (const auto& Fi : qk) Phi += Fi ^ Fi;
  r.opaque_alpha_cancels = !dga_d(Phi).contains_alpha();
  DgaElement dPhi = d_minus_s_eta(Phi);
  r.qk_alpha_free = !dPhi.contains_alpha();
  r.qk_only_expected = only_monomials(dPhi, closure_monomials());
  r.qk_first = dPhi.coefficient({Gen::V, Gen::dt});
  r.qk_first_check = check("3 f' - 2 (f1 + f2 + f3)", r.qk_first, SymScalar(3) * fp - SymScalar(2) * sum);
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    r.qk_second[i] = coefficient_cyclic(dPhi, i);
    SymScalar sign_pattern = fs[i] - fs[j] - fs[k];
    r.qk_second_check[i] = check("(f f" + std::to_string(j + 1) + " f" + std::to_string(k + 1) + ")' - S f (...) - 6 f1 f2 f3",
                                 r.qk_second[i], (f * pair[i]).derivative() - S * f * sign_pattern - SymScalar(6) * prod);
  }

  std::array<SymScalar, 3> pos_fs = fs;
  auto sp = two_forms(f, pair, pos_fs, {-1, -1, 1});
  DgaElement dPsi = d_minus_s_eta((sp[0] ^ sp[0]) + (sp[1] ^ sp[1]) - (sp[2] ^ sp[2]));
  r.spin7_alpha_free = !dPsi.contains_alpha();
  r.spin7_only_expected = only_monomials(dPsi, closure_monomials());
  r.spin7_first = dPsi.coefficient({Gen::V, Gen::dt});
  r.spin7_first_check = check("f' - 2 (f1 + f2 + f3)", r.spin7_first, fp - SymScalar(2) * sum);
  for (int i = 0; i < 3; ++i) {
    r.spin7_second[i] = coefficient_cyclic(dPsi, i);
    r.spin7_second_check[i] = check("(f f_j f_k)' - 2 f1 f2 f3", r.spin7_second[i].substitute(Sym::S, SymScalar(0)),
                                    (f * pair[i]).derivative() - SymScalar(2) * prod);
  }

  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    auto red = reduce_mod_ideal(qk, f, k, d_minus_s_eta, false);
    r.ideal[k] = red.reduced * f;
    r.ideal_remainder_clean[k] = red.clean;
    const SymScalar fij = fs[i] * fs[j];
    SymScalar common = f * fij.derivative() - fp * fij + SymScalar(2) * prod -
                       SymScalar(2) * fs[i] * fs[i] * fs[j] - SymScalar(2) * fs[i] * fs[j] * fs[j];
    SymScalar cubic = common + S * f * fij - S * f * fs[k];
    SymScalar derived = common + S * f * (fs[i] + fs[j]) - S * f * fs[k];
    r.ideal_vs_cubic[k] = check("cubic-S ideal relation", r.ideal[k], cubic);
    r.ideal_vs_derived[k] = check("ideal relation, S f (f_i + f_j) term", r.ideal[k], derived);
    r.ideal_vs_cubic_s0[k] = check("cubic-S ideal relation at S = 0", r.ideal[k].substitute(Sym::S, SymScalar(0)),
                                     cubic.substitute(Sym::S, SymScalar(0)));
  }
  return r;
}

bool TriaxialResult::ok_qk() const {
  bool ok = qk_alpha_free && qk_only_expected && qk_first_check.matches();
  for (const auto& c : qk_second_check) ok = ok && c.matches();
  return ok;
}

bool TriaxialResult::ok_spin7() const {
  bool ok = spin7_alpha_free && spin7_only_expected && spin7_first_check.matches();
  for (const auto& c : spin7_second_check) ok = ok && c.matches();
  return ok;
}

bool TriaxialResult::ok_ideal_cubic() const {
  bool ok = true;
  for (int k = 0; k < 3; ++k) ok = ok && ideal_remainder_clean[k] && ideal_vs_cubic[k].matches();
  return ok;
}

bool TriaxialResult::ok_ideal_derived() const {
  bool ok = true;
  for (int k = 0; k < 3; ++k) ok = ok && ideal_remainder_clean[k] && ideal_vs_derived[k].matches();
  return ok;
}

HypoEvolutionResult verify_hypo_evolution() {
  const SymScalar f = sym(Sym::f), h = sym(Sym::h), S = sym(Sym::S), fp = sym(Sym::f, 1);
  DgaElement L = lemma_form();
  DgaElement omega_q = SymScalar(3) * f * f * G(Gen::V) + SymScalar(2) * f * h * h * L;
  DgaElement dt_omega_q = omega_q.map_coefficients([](const SymScalar& c) { return c.derivative(); });
  DgaElement potential = SymScalar(6) * h.pow(3) * (G(Gen::eta1) ^ G(Gen::eta2) ^ G(Gen::eta3));
  for (int s = 0; s < 3; ++s) potential += SymScalar(2) * f * h * (G(gen_omega(s)) ^ G(gen_eta(s)));
  HypoEvolutionResult r;
  r.residual_form = dt_omega_q - dga_d(potential, DgaOptions{AlphaRule::Opaque, false});
  r.alpha_free = !r.residual_form.contains_alpha();
  std::vector<DgaMonomial> allowed{mono_of({Gen::V})};
  for (int i = 0; i < 3; ++i) allowed.push_back(mono_of({gen_omega(i), gen_eta((i + 1) % 3), gen_eta((i + 2) % 3)}));
  r.only_expected_monomials = only_monomials(r.residual_form, allowed);
  r.A = r.residual_form.coefficient({Gen::V});
  r.B = r.residual_form.coefficient({Gen::omega1, Gen::eta2, Gen::eta3});
  r.a_vs_closure = check("(f^2)' - 4 f h", r.A, (f * f).derivative() - SymScalar(4) * f * h);
  r.b_vs_closure = check("2 (f h^2)' + 2 S f h - 12 h^3", r.B,
                         SymScalar(2) * (f * h * h).derivative() + SymScalar(2) * S * f * h - SymScalar(12) * h.pow(3));
  DgaElement on_solution = r.residual_form.substitute(Sym::h, SymScalar(Rational(1, 2)) * fp)
                               .map_coefficients([](const SymScalar& c) { return eliminate_fpp_qk(c); });
  r.vanishes_on_solution = on_solution.is_zero();
  return r;
}

bool HypoEvolutionResult::ok() const {
  auto constant = [](const CoefficientCheck& c) { return c.factor && c.factor->as_constant().has_value(); };
  return alpha_free && only_expected_monomials && constant(a_vs_closure) && constant(b_vs_closure) &&
         vanishes_on_solution;
}

}  // namespace qcforge
