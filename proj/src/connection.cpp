#include "qcforge/connection.hpp"

namespace qcforge {

bool ConnectionTable::is_metric() const {
  const int n = dim();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c)
        if (!(gamma(a, b, c) + gamma(a, c, b)).is_zero()) return false;
  return true;
}

bool TorsionTensor::is_antisymmetric() const {
  const int n = dim();
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (!(t(a, b, c) + t(b, a, c)).is_zero()) return false;
  return true;
}

ConnectionTable koszul_levi_civita(const FrameAlgebra& alg) {
  const int n = alg.dim();
  ConnectionTable lc{Table3<Rational>(n)};
  const Rational half(1, 2);
  // g(∇_a e_b, e_c) = ½(g([a,b],c) − g([b,c],a) + g([c,a],b))
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Rational v = alg.bracket_coeff(c, a, b) - alg.bracket_coeff(a, b, c) + alg.bracket_coeff(b, c, a);
        if (!v.is_zero()) lc.gamma(a, b, c) = half * v;
      }
  return lc;
}

ConnectionTable adjust_by_torsion(const ConnectionTable& lc, const TorsionTensor& torsion) {
  if (torsion.dim() != lc.dim()) throw FrameMismatch("torsion and connection live on different frames");
  if (!torsion.is_antisymmetric()) throw NonAntisymmetricTorsion("torsion must be antisymmetric in its arguments");
  const int n = lc.dim();
  ConnectionTable out = lc;
  const Rational half(1, 2);
  const auto& T = torsion.t;
  // g(∇_A B, C) = g(∇^g_A B, C) + ½[T(A,B,C) − T(B,C,A) + T(C,A,B)]
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Rational v = T(a, b, c) - T(b, c, a) + T(c, a, b);
        if (!v.is_zero()) out.gamma(a, b, c) += half * v;
      }
  return out;
}

TorsionTensor torsion_of(const ConnectionTable& conn, const FrameAlgebra& alg) {
  const int n = conn.dim();
  TorsionTensor tt{Table3<Rational>(n)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        tt.t(a, b, c) = conn.gamma(a, b, c) - conn.gamma(b, a, c) - alg.bracket_coeff(c, a, b);
  return tt;
}

CurvatureTensor frame_curvature(const ConnectionTable& conn, const FrameAlgebra& alg) {
  const int n = conn.dim();
  const auto& G = conn.gamma;
  CurvatureTensor R{Table4<Rational>(n)};
  // R(e_a,e_b)e_c = ∇_a∇_b e_c − ∇_b∇_a e_c − ∇_{[e_a,e_b]} e_c with constant Γ.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      for (int c = 0; c < n; ++c)
        for (int f = 0; f < n; ++f) {
          Rational s(0);
          for (int d = 0; d < n; ++d) {
            const Rational& g1 = G(b, c, d);
            if (!g1.is_zero() && !G(a, d, f).is_zero()) s += g1 * G(a, d, f);
            const Rational& g2 = G(a, c, d);
            if (!g2.is_zero() && !G(b, d, f).is_zero()) s -= g2 * G(b, d, f);
            const Rational& cd = alg.bracket_coeff(d, a, b);
            if (!cd.is_zero() && !G(d, c, f).is_zero()) s -= cd * G(d, c, f);
          }
          R.r(a, b, c, f) = s;
        }
    }
  return R;
}

}  // namespace qcforge
