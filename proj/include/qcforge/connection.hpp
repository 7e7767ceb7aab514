#pragma once

#include <vector>

#include "qcforge/frame_algebra.hpp"

namespace qcforge {

// Dense table indexed by three frame indices.
template <class T>
class Table3 {
 public:
  Table3() = default;
  explicit Table3(int dim) : n_(dim), v_(static_cast<std::size_t>(dim) * dim * dim, T(0)) {}
  int dim() const { return n_; }
  T& operator()(int a, int b, int c) { return v_[(static_cast<std::size_t>(a) * n_ + b) * n_ + c]; }
  const T& operator()(int a, int b, int c) const { return v_[(static_cast<std::size_t>(a) * n_ + b) * n_ + c]; }
  friend bool operator==(const Table3& x, const Table3& y) { return x.n_ == y.n_ && x.v_ == y.v_; }

 private:
  int n_ = 0;
  std::vector<T> v_;
};

template <class T>
class Table4 {
 public:
  Table4() = default;
  explicit Table4(int dim) : n_(dim), v_(static_cast<std::size_t>(dim) * dim * dim * dim, T(0)) {}
  int dim() const { return n_; }
  T& operator()(int a, int b, int c, int d) { return v_[((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d]; }
  const T& operator()(int a, int b, int c, int d) const {
    return v_[((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d];
  }
  bool is_zero() const {
    for (const auto& x : v_)
      if (!(x == T(0))) return false;
    return true;
  }
  friend bool operator==(const Table4& x, const Table4& y) { return x.n_ == y.n_ && x.v_ == y.v_; }

 private:
  int n_ = 0;
  std::vector<T> v_;
};

// gamma(a, b, c) = Γ^c_{ab} = <e^c, ∇_{e_a} e_b>.
struct ConnectionTable {
  Table3<Rational> gamma;
  int dim() const { return gamma.dim(); }
  // Γ^c_{ab} + Γ^b_{ac} = 0 for the identity frame metric.
  bool is_metric() const;
};

// torsion(a, b, c) = e^c(T(e_a, e_b)).
struct TorsionTensor {
  Table3<Rational> t;
  int dim() const { return t.dim(); }
  bool is_antisymmetric() const;
};

// r(a, b, c, d) = g(R(e_a, e_b) e_c, e_d).
struct CurvatureTensor {
  Table4<Rational> r;
  int dim() const { return r.dim(); }
};

ConnectionTable koszul_levi_civita(const FrameAlgebra& alg);
ConnectionTable adjust_by_torsion(const ConnectionTable& lc, const TorsionTensor& torsion);
TorsionTensor torsion_of(const ConnectionTable& conn, const FrameAlgebra& alg);
CurvatureTensor frame_curvature(const ConnectionTable& conn, const FrameAlgebra& alg);

}  // namespace qcforge
