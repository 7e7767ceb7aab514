#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qcforge/errors.hpp"

namespace qcforge {

// A monomial e^{i1}∧…∧e^{ik} with i1<…<ik is stored as the bitmask of its (0-based) indices.
using Mask = std::uint32_t;

inline constexpr int kMaxFrameDim = 31;

inline bool is_zero(double x) { return x == 0.0; }
inline double to_double(double x) { return x; }

inline int mask_degree(Mask m) { return std::popcount(m); }

inline std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (int i = 0; m; ++i, m >>= 1)
    if (m & 1u) out.push_back(i);
  return out;
}

inline Mask indices_mask(const std::vector<int>& idx) {
  Mask m = 0;
  for (int i : idx) m |= Mask{1} << i;
  return m;
}

// Sign of e^A∧e^B relative to the sorted monomial e^{A∪B}; 0 if A and B overlap.
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (Mask rest = b; rest; rest &= rest - 1) {
    int j = std::countr_zero(rest);
    inversions += std::popcount(j + 1 < 32 ? (a >> (j + 1)) : Mask{0});
  }
  return (inversions & 1) ? -1 : 1;
}

// Sign of the permutation sorting `idx`, 0 if an index repeats.
inline int sort_sign(std::vector<int> idx) {
  int sign = 1;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) sign = -sign;
    }
  return sign;
}

template <class T>
using FrameVector = std::vector<T>;

template <class T>
FrameVector<T> basis_vector(int dim, int i) {
  FrameVector<T> v(dim, T(0));
  v[i] = T(1);
  return v;
}

// Homogeneous exterior form over an indexed coframe e^0..e^{dim-1}. Zero coefficients are never stored.
template <class T>
class KForm {
 public:
  KForm() = default;
  KForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 0 || dim > kMaxFrameDim) throw FrameMismatch("frame dimension out of range");
  }

  static KForm scalar(int dim, const T& c) {
    KForm f(dim, 0);
    f.add(0, c);
    return f;
  }
  static KForm monomial(int dim, const std::vector<int>& idx, const T& c = T(1)) {
    for (int i : idx)
      if (i < 0 || i >= dim) throw FrameMismatch("index out of frame range");
    KForm f(dim, static_cast<int>(idx.size()));
    int s = sort_sign(idx);
    if (s != 0) f.add(indices_mask(idx), s > 0 ? c : -c);
    return f;
  }
  static KForm e(int dim, int i) { return monomial(dim, {i}); }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<Mask, T>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  T coeff(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? T(0) : it->second;
  }

  // Component on an arbitrary ordered index tuple, i.e. evaluation on basis vectors.
  T component(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != degree_) throw ArityMismatch("component arity differs from degree");
    int s = sort_sign(idx);
    if (s == 0) return T(0);
    T c = coeff(indices_mask(idx));
    return s > 0 ? c : -c;
  }

  void add(Mask m, const T& c) {
    if (mask_degree(m) != degree_) throw ArityMismatch("monomial degree differs from form degree");
    if (m >> dim_) throw FrameMismatch("monomial outside frame");
    using qcforge::is_zero;
    if (is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (is_zero(it->second)) terms_.erase(it);
    }
  }

  KForm operator-() const {
    KForm r(dim_, degree_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }
  KForm& operator+=(const KForm& o) {
    absorb_shape(o);
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    absorb_shape(o);
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  KForm& operator*=(const T& s) {
    using qcforge::is_zero;
    std::map<Mask, T> out;
    for (const auto& [m, c] : terms_) {
      T v = c * s;
      if (!is_zero(v)) out.emplace(m, v);
    }
    terms_ = std::move(out);
    return *this;
  }

  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(KForm a, const T& s) { return a *= s; }
  friend KForm operator*(const T& s, KForm a) { return a *= s; }
  friend bool operator==(const KForm& a, const KForm& b) {
    return a.dim_ == b.dim_ && (a.terms_.empty() || b.terms_.empty() || a.degree_ == b.degree_) &&
           a.terms_ == b.terms_;
  }

  // Keeps only monomials whose indices all lie in `allowed`.
  KForm restrict_to(Mask allowed) const {
    KForm r(dim_, degree_);
    for (const auto& [m, c] : terms_)
      if ((m & ~allowed) == 0) r.terms_.emplace(m, c);
    return r;
  }

  template <class F>
  auto map(F&& fn) const -> KForm<decltype(fn(std::declval<const T&>()))> {
    using U = decltype(fn(std::declval<const T&>()));
    KForm<U> r(dim_, degree_);
    for (const auto& [m, c] : terms_) r.add(m, fn(c));
    return r;
  }

  // Reindexes into a larger frame; index i maps to slot[i].
  KForm embed(int new_dim, const std::vector<int>& slot) const {
    KForm r(new_dim, degree_);
    for (const auto& [m, c] : terms_) {
      std::vector<int> idx;
      for (int i : mask_indices(m)) idx.push_back(slot.at(i));
      int s = sort_sign(idx);
      r.add(indices_mask(idx), s > 0 ? c : -c);
    }
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(to_double(c)));
    return m;
  }

  // Human-readable, 1-based: "2 e1^e2 - 1/2 e3^e7".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<std::vector<int>, T>> sorted;
    for (const auto& [m, c] : terms_) sorted.emplace_back(mask_indices(m), c);
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::ostringstream os;
    bool first = true;
    for (const auto& [idx, c] : sorted) {
      std::ostringstream cs;
      cs << c;
      std::string s = cs.str();
      bool neg = !s.empty() && s[0] == '-';
      if (neg) s.erase(0, 1);
      if (first)
        os << (neg ? "-" : "");
      else
        os << (neg ? " - " : " + ");
      first = false;
      if (idx.empty()) {
        os << s;
        continue;
      }
      if (s != "1") os << s << " ";
      for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? "^e" : "e") << idx[k] + 1;
    }
    return os.str();
  }

 private:
  void absorb_shape(const KForm& o) {
    if (o.dim_ != dim_) throw FrameMismatch("forms live on frames of different dimension");
    if (o.degree_ != degree_) {
      if (o.terms_.empty()) return;
      if (!terms_.empty()) throw ArityMismatch("adding forms of different degree");
      degree_ = o.degree_;
    }
  }

  int dim_ = 0;
  int degree_ = 0;
  std::map<Mask, T> terms_;
};

template <class T>
KForm<T> wedge(const KForm<T>& a, const KForm<T>& b) {
  if (a.dim() != b.dim()) throw FrameMismatch("wedge of forms on different frames");
  KForm<T> r(a.dim(), a.degree() + b.degree());
  if (a.degree() + b.degree() > a.dim()) return r;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      T c = ca * cb;
      r.add(ma | mb, s > 0 ? c : -c);
    }
  return r;
}

template <class T, class... Rest>
KForm<T> wedge(const KForm<T>& a, const KForm<T>& b, const Rest&... rest) {
  return wedge(wedge(a, b), rest...);
}

namespace detail {

template <class T>
T det_columns(const std::vector<const FrameVector<T>*>& vecs, const std::vector<int>& rows, std::size_t col,
              std::vector<bool>& used) {
  if (col == vecs.size()) return T(1);
  T sum(0);
  int parity = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (used[r]) continue;
    const T& entry = (*vecs[col])[rows[r]];
    using qcforge::is_zero;
    if (!is_zero(entry)) {
      used[r] = true;
      T minor = det_columns(vecs, rows, col + 1, used);
      used[r] = false;
      T term = entry * minor;
      if (parity & 1)
        sum -= term;
      else
        sum += term;
    }
    ++parity;
  }
  return sum;
}

}  // namespace detail

// Determinant convention: (e^a∧e^b)(e_c,e_d) = δ^a_c δ^b_d − δ^a_d δ^b_c.
template <class T>
T evaluate(const KForm<T>& a, const std::vector<FrameVector<T>>& vectors) {
  if (static_cast<int>(vectors.size()) != a.degree()) throw ArityMismatch("evaluate: wrong number of vectors");
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != a.dim()) throw FrameMismatch("evaluate: vector of wrong dimension");
  std::vector<const FrameVector<T>*> vecs;
  for (const auto& v : vectors) vecs.push_back(&v);
  T total(0);
  for (const auto& [m, c] : a.terms()) {
    auto rows = mask_indices(m);
    std::vector<bool> used(rows.size(), false);
    total += c * detail::det_columns(vecs, rows, 0, used);
  }
  return total;
}

template <class T>
KForm<T> interior(const FrameVector<T>& v, const KForm<T>& a) {
  if (static_cast<int>(v.size()) != a.dim()) throw FrameMismatch("interior: vector of wrong dimension");
  if (a.degree() == 0) throw ArityMismatch("interior product of a 0-form");
  KForm<T> r(a.dim(), a.degree() - 1);
  using qcforge::is_zero;
  for (const auto& [m, c] : a.terms()) {
    int pos = 0;
    for (int i : mask_indices(m)) {
      if (!is_zero(v[i])) {
        T t = c * v[i];
        r.add(m & ~(Mask{1} << i), (pos & 1) ? -t : t);
      }
      ++pos;
    }
  }
  return r;
}

// Interior product with the basis vector e_i.
template <class T>
KForm<T> interior_basis(int i, const KForm<T>& a) {
  return interior(basis_vector<T>(a.dim(), i), a);
}

// Hodge star for the identity frame metric. `orientation` is a permutation p of 0..n-1 and
// the volume form is e^{p0}∧…∧e^{p(n-1)}.
template <class T>
KForm<T> hodge_star(const KForm<T>& a, const std::vector<int>& orientation) {
  const int n = a.dim();
  if (static_cast<int>(orientation.size()) != n) throw BadOrientation("orientation length differs from frame dimension");
  std::vector<int> seen(n, 0);
  for (int p : orientation) {
    if (p < 0 || p >= n || seen[p]++) throw BadOrientation("orientation is not a permutation");
  }
  const int perm_sign = sort_sign(orientation);
  const Mask full = n == 32 ? ~Mask{0} : ((Mask{1} << n) - 1);
  KForm<T> r(n, n - a.degree());
  for (const auto& [m, c] : a.terms()) {
    const Mask comp = full & ~m;
    int s = wedge_sign(m, comp) * perm_sign;
    r.add(comp, s > 0 ? c : -c);
  }
  return r;
}

}  // namespace qcforge
