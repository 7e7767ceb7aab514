#include "qcforge/qc_verifier.hpp"

namespace qcforge {

namespace {

constexpr int nxt(int i, int k = 1) { return (i + k) % 3; }

std::string sname(const char* what, int s) { return std::string(what) + std::to_string(s + 1); }

// Σ_p F(e_p, I e_p) over the horizontal frame.
Rational horizontal_trace(const QcFrameSpec& spec, const RForm& f, int l) {
  const auto& hp = spec.horizontal();
  const auto& I = spec.IH(l);
  const int h = static_cast<int>(hp.size());
  Rational t(0);
  for (int p = 0; p < h; ++p)
    for (int r = 0; r < h; ++r)
      if (!I(r, p).is_zero()) t += I(r, p) * f.component({hp[p], hp[r]});
  return t;
}

RMatrix horizontal_matrix(const QcFrameSpec& spec, const RForm& f) {
  const auto& hp = spec.horizontal();
  const int h = static_cast<int>(hp.size());
  RMatrix m(h, h);
  for (int p = 0; p < h; ++p)
    for (int q = 0; q < h; ++q)
      if (p != q) m(p, q) = f.component({hp[p], hp[q]});
  return m;
}

RMatrix congruence(const RMatrix& B, const RMatrix& I) { return I.transpose() * B * I; }

RForm rho_from(const FrameAlgebra& alg, const std::array<RForm, 3>& a, int k) {
  return (mc_differential(alg, a[k]) + wedge(a[nxt(k)], a[nxt(k, 2)])) * Rational(1, 2);
}

}  // namespace

ReebReport reeb_check(const QcFrameSpec& spec) {
  ReebReport rep;
  const auto& alg = spec.algebra();
  const Mask H = spec.horizontal_mask();
  std::array<RForm, 3> deta;
  for (int s = 0; s < 3; ++s) deta[s] = alg.d_e(spec.vertical()[s]);
  for (int s = 0; s < 3; ++s)
    for (int k = 0; k < 3; ++k) {
      Rational v = spec.xi(k)[spec.vertical()[s]];
      if (!(v == Rational(s == k ? 1 : 0)))
        rep.violations.push_back(sname("eta", s) + "(" + sname("xi", k) + ") = " + v.str());
    }
  for (int s = 0; s < 3; ++s) {
    if (!interior(spec.xi(s), deta[s]).restrict_to(H).is_zero())
      rep.violations.push_back("(" + sname("xi", s) + " _| d" + sname("eta", s) + ")|H != 0");
    for (int k = s + 1; k < 3; ++k) {
      RForm a = interior(spec.xi(s), deta[k]).restrict_to(H);
      RForm b = interior(spec.xi(k), deta[s]).restrict_to(H);
      if (!(a + b).is_zero())
        rep.violations.push_back("(" + sname("xi", s) + " _| d" + sname("eta", k) + ")|H != -(" + sname("xi", k) +
                                 " _| d" + sname("eta", s) + ")|H");
    }
    if (!(deta[s].restrict_to(H) == spec.omega(s) * Rational(2)))
      rep.violations.push_back("d" + sname("eta", s) + "|H != 2 " + sname("omega", s));
  }
  rep.ok = rep.violations.empty();
  return rep;
}

Sp1Forms sp1_forms_and_S(const QcFrameSpec& spec) {
  if (!spec.standard_reeb()) throw PreconditionError("the pipeline needs Reeb fields equal to the vertical frame");
  const auto& alg = spec.algebra();
  const int dim = spec.dim();
  const auto& v = spec.vertical();
  const Mask H = spec.horizontal_mask();
  const int n = spec.n();
  auto deta = [&](int s, int a, int b) { return alg.d_e(v[s]).component({a, b}); };

  Sp1Forms out;
  const Rational vsum = deta(0, v[1], v[2]) + deta(1, v[2], v[0]) + deta(2, v[0], v[1]);
  for (int i = 0; i < 3; ++i) {
    const int j = nxt(i), k = nxt(i, 2);
    RForm a(dim, 1), b(dim, 1);
    for (int x : spec.horizontal()) {
      Rational c = deta(k, v[j], x);
      if (!(c == -deta(j, v[k], x))) throw ConsistencyError("alpha: the two horizontal expressions disagree");
      a += RForm::e(dim, x) * c;
    }
    for (int s = 0; s < 3; ++s) {
      Rational c = deta(s, v[j], v[k]);
      if (s == i) c -= vsum * Rational(1, 2);
      a += RForm::e(dim, v[s]) * c;
    }
    b += RForm::e(dim, v[i]) * Rational(-1, 2);
    out.alpha_const[i] = a;
    out.alpha_s_coeff[i] = b;
  }

  // ρ_k|_H = P + S Q + S² W
  std::array<Rational, 3> S_l;
  for (int l = 0; l < 3; ++l) {
    const int i = nxt(l), j = nxt(l, 2);
    const auto& A = out.alpha_const;
    const auto& B = out.alpha_s_coeff;
    RForm P = rho_from(alg, A, l).restrict_to(H);
    RForm Q = ((mc_differential(alg, B[l]) + wedge(A[i], B[j]) + wedge(B[i], A[j])) * Rational(1, 2)).restrict_to(H);
    RForm W = (wedge(B[i], B[j]) * Rational(1, 2)).restrict_to(H);
    if (!horizontal_trace(spec, W, l).is_zero()) throw InconsistentScalar("trace identity is not linear in S");
    Rational denom = horizontal_trace(spec, Q, l) + Rational(4 * n);
    if (denom.is_zero()) throw InconsistentScalar("trace identity does not determine S for " + sname("l=", l));
    S_l[l] = -horizontal_trace(spec, P, l) / denom;
  }
  out.s_by_trace = S_l;
  if (!(S_l[0] == S_l[1] && S_l[1] == S_l[2]))
    throw InconsistentScalar("S differs between l = 1, 2, 3: " + S_l[0].str() + ", " + S_l[1].str() + ", " +
                             S_l[2].str());
  out.S = S_l[0];
  for (int s = 0; s < 3; ++s) out.alpha[s] = out.alpha_const[s] + out.alpha_s_coeff[s] * out.S;
  for (int s = 0; s < 3; ++s) out.rho[s] = rho_from(alg, out.alpha, s);
  return out;
}

TorsionData torsion_decomposition(const QcFrameSpec& spec, const Sp1Forms& sp1) {
  const int h = 4 * spec.n();
  const int dim = spec.dim();
  const auto& hp = spec.horizontal();
  const auto& v = spec.vertical();
  const RMatrix id = RMatrix::identity(h);
  TorsionData td;
  td.S = sp1.S;

  std::array<RMatrix, 3> D;
  RMatrix Q(h, h);
  for (int l = 0; l < 3; ++l) {
    D[l] = (horizontal_matrix(spec, sp1.rho[l]) * spec.IH(l) + id * sp1.S) * Rational(-2);
    Q += D[l];
  }
  RMatrix avg = Q;
  for (int s = 0; s < 3; ++s) avg += congruence(Q, spec.IH(s));
  avg *= Rational(1, 4);
  td.U = avg * Rational(1, 12);
  td.T0 = (Q - td.U * Rational(12)) * Rational(1, 2);

  for (int l = 0; l < 3; ++l) {
    RMatrix rebuilt = td.T0 + congruence(td.T0, spec.IH(l)) + td.U * Rational(4);
    if (!(rebuilt == D[l]))
      throw DecompositionResidual("rho_" + std::to_string(l + 1) + "(X, I Y) is not reproduced by T0 and U");
  }
  if (spec.n() == 1 && !td.U.is_zero()) throw DecompositionResidual("U must vanish in dimension seven");

  for (int s = 0; s < 3; ++s) {
    const RMatrix& I = spec.IH(s);
    td.T0xi[s] = (td.T0 * I + I.transpose() * td.T0) * Rational(-1, 4);
    td.Txi[s] = td.T0xi[s] + I * td.U;
  }

  TorsionTensor T{Table3<Rational>(dim)};
  for (int p = 0; p < h; ++p)
    for (int q = 0; q < h; ++q)
      for (int s = 0; s < 3; ++s) {
        Rational w = spec.omega(s).component({hp[p], hp[q]});
        if (!w.is_zero()) T.t(hp[p], hp[q], v[s]) = w * Rational(2);
      }
  for (int s = 0; s < 3; ++s)
    for (int x = 0; x < h; ++x)
      for (int y = 0; y < h; ++y) {
        const Rational& c = td.Txi[s](y, x);
        if (c.is_zero()) continue;
        T.t(v[s], hp[x], hp[y]) = c;
        T.t(hp[x], v[s], hp[y]) = -c;
      }
  const auto& alg = spec.algebra();
  for (int k = 0; k < 3; ++k) {
    const int i = nxt(k), j = nxt(k, 2);
    RVector vec(dim, Rational(0));
    vec[v[k]] = -sp1.S;
    for (int x : hp) vec[x] = -alg.bracket_coeff(x, v[i], v[j]);
    for (int c = 0; c < dim; ++c) {
      T.t(v[i], v[j], c) = vec[c];
      T.t(v[j], v[i], c) = -vec[c];
    }
    td.Tvv[k] = vec;
  }
  td.full = T;
  return td;
}

ConnectionTable biquard_connection(const QcFrameSpec& spec, const TorsionData& torsion, const Sp1Forms& sp1) {
  const auto& alg = spec.algebra();
  const int dim = spec.dim();
  const auto& v = spec.vertical();
  const Mask H = spec.horizontal_mask();
  ConnectionTable conn = adjust_by_torsion(koszul_levi_civita(alg), torsion.full);

  if (!conn.is_metric()) throw ConsistencyError("Biquard connection is not metric");
  if (!(torsion_of(conn, alg).t == torsion.full.t)) throw ConsistencyError("connection torsion differs from the assembled torsion");
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c) {
        bool bh = (H >> b) & 1u, ch = (H >> c) & 1u;
        if (bh != ch && !conn.gamma(a, b, c).is_zero()) throw ConsistencyError("connection does not preserve H and V");
      }
  // ∇ξ_i = −α_j ⊗ ξ_k + α_k ⊗ ξ_j
  for (int i = 0; i < 3; ++i) {
    const int j = nxt(i), k = nxt(i, 2);
    for (int a = 0; a < dim; ++a) {
      Rational aj = sp1.alpha[j].component({a}), ak = sp1.alpha[k].component({a});
      if (!(conn.gamma(a, v[i], v[k]) == -aj) || !(conn.gamma(a, v[i], v[j]) == ak) ||
          !conn.gamma(a, v[i], v[i]).is_zero())
        throw ConsistencyError("nabla xi_" + std::to_string(i + 1) + " disagrees with the sp(1) forms");
    }
  }
  // ∇I_i = −α_j ⊗ I_k + α_k ⊗ I_j on H
  const auto& hp = spec.horizontal();
  const int h = static_cast<int>(hp.size());
  for (int a = 0; a < dim; ++a) {
    RMatrix G(h, h);
    for (int p = 0; p < h; ++p)
      for (int q = 0; q < h; ++q) G(q, p) = conn.gamma(a, hp[p], hp[q]);
    for (int i = 0; i < 3; ++i) {
      const int j = nxt(i), k = nxt(i, 2);
      RMatrix lhs = G * spec.IH(i) - spec.IH(i) * G;
      RMatrix rhs = spec.IH(k) * (-sp1.alpha[j].component({a})) + spec.IH(j) * sp1.alpha[k].component({a});
      if (!(lhs == rhs)) throw ConsistencyError("nabla I_" + std::to_string(i + 1) + " disagrees with the sp(1) forms");
    }
  }
  return conn;
}

namespace {

// Kulkarni–Nomizu product on horizontal positions.
Rational kn(const RMatrix& A, const RMatrix& B, int x, int y, int z, int w) {
  return A(x, z) * B(y, w) + A(y, w) * B(x, z) - A(y, z) * B(x, w) - A(x, w) * B(y, z);
}

}  // namespace

WqcResult wqc(const QcFrameSpec& spec, const TorsionData& td, const CurvatureTensor& curv) {
  const auto& hp = spec.horizontal();
  const int h = static_cast<int>(hp.size());
  const RMatrix g = RMatrix::identity(h);
  const RMatrix L0 = td.T0 * Rational(1, 2) + td.U;
  std::array<RMatrix, 3> om, IL0, T0I, IT0, UI;
  for (int s = 0; s < 3; ++s) {
    const RMatrix& I = spec.IH(s);
    om[s] = I.transpose();  // ω_s(e_p, e_q) = I(q, p)
    IL0[s] = -(L0 * I);     // (I_s L0)(X, Y) = −L0(X, I_s Y)
    T0I[s] = td.T0 * I;     // T0(Z, I_s V)
    IT0[s] = I.transpose() * td.T0;  // T0(I_s Z, V)
    UI[s] = td.U * I;
  }
  const Rational quarterS = td.S * Rational(1, 4);
  WqcResult res{Table4<Rational>(h), true};
  for (int x = 0; x < h; ++x)
    for (int y = 0; y < h; ++y)
      for (int z = 0; z < h; ++z)
        for (int w = 0; w < h; ++w) {
          Rational val = curv.r(hp[x], hp[y], hp[z], hp[w]) + kn(g, L0, x, y, z, w);
          Rational bracket(0), sterm = kn(g, g, x, y, z, w);
          for (int s = 0; s < 3; ++s) {
            val += kn(om[s], IL0[s], x, y, z, w);
            bracket += om[s](x, y) * (T0I[s](z, w) - IT0[s](z, w)) +
                       om[s](z, w) * (T0I[s](x, y) - IT0[s](x, y) - UI[s](x, y) * Rational(4));
            sterm += kn(om[s], om[s], x, y, z, w) + om[s](x, y) * om[s](z, w) * Rational(4);
          }
          val += bracket * Rational(-1, 2) + quarterS * sterm;
          res.w(x, y, z, w) = val;
          if (!val.is_zero()) res.is_zero = false;
        }
  return res;
}

FundamentalForms fundamental_forms_check(const QcFrameSpec& spec) {
  const auto& alg = spec.algebra();
  FundamentalForms f;
  f.omega4 = RForm(spec.dim(), 4);
  f.lemma_form = RForm(spec.dim(), 4);
  for (int s = 0; s < 3; ++s) {
    f.omega4 += wedge(spec.omega(s), spec.omega(s));
    f.lemma_form += wedge(spec.omega(s), spec.eta(nxt(s)), spec.eta(nxt(s, 2)));
  }
  f.omegaQ = f.omega4 + f.lemma_form * Rational(2);
  f.d_omega4 = mc_differential(alg, f.omega4);
  f.d_omegaQ = mc_differential(alg, f.omegaQ);
  f.d_lemma = mc_differential(alg, f.lemma_form);
  f.omega4_closed = f.d_omega4.is_zero();
  f.omegaQ_closed = f.d_omegaQ.is_zero();
  f.lemma_closed = f.d_lemma.is_zero();
  return f;
}

StructureResiduals structure_equation_residuals(const QcFrameSpec& spec, const Sp1Forms& sp1) {
  const auto& alg = spec.algebra();
  StructureResiduals r;
  for (int i = 0; i < 3; ++i) {
    const int j = nxt(i), k = nxt(i, 2);
    const auto& a = sp1.alpha;
    RForm rhs = spec.omega(i) * Rational(2) - wedge(spec.eta(j), a[k]) + wedge(spec.eta(k), a[j]) -
                wedge(spec.eta(j), spec.eta(k)) * sp1.S;
    r.eta[i] = mc_differential(alg, spec.eta(i)) - rhs;
    r.omega[i] = mc_differential(alg, spec.omega(i)) - (wedge(spec.omega(j), a[k]) - wedge(spec.omega(k), a[j]));
  }
  return r;
}

bool vertical_rho_mixing_vanishes(const QcFrameSpec& spec, const Sp1Forms& sp1) {
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t)
      if (s != t && !interior_basis(spec.vertical()[s], sp1.rho[t]).restrict_to(spec.horizontal_mask()).is_zero())
        return false;
  return true;
}

Rational contracted_horizontal_curvature(const QcFrameSpec& spec, const CurvatureTensor& curv) {
  Rational s(0);
  for (int a : spec.horizontal())
    for (int b : spec.horizontal()) s += curv.r(b, a, a, b);
  return s;
}

QcReport qc_report(const QcFrameSpec& spec) {
  QcReport rep;
  rep.reeb = reeb_check(spec);
  if (!rep.reeb.ok) throw PreconditionError("Reeb conditions fail: " + rep.reeb.violations.front());
  rep.sp1 = sp1_forms_and_S(spec);
  rep.S = rep.sp1.S;
  rep.torsion = torsion_decomposition(spec, rep.sp1);
  rep.biquard = biquard_connection(spec, rep.torsion, rep.sp1);
  rep.curvature = frame_curvature(rep.biquard, spec.algebra());
  rep.w = wqc(spec, rep.torsion, rep.curvature);
  rep.forms = fundamental_forms_check(spec);
  rep.einstein = rep.torsion.T0.is_zero() && rep.torsion.U.is_zero();

  const int n = spec.n();
  const int h = 4 * n;
  const auto& td = rep.torsion;
  auto fail = [&](const std::string& what) { rep.failures.push_back(what); };

  rep.qscs_contracted = contracted_horizontal_curvature(spec, rep.curvature);
  rep.qscs_ok = rep.qscs_contracted == Rational(8 * n * (n + 2)) * rep.S;
  if (!rep.qscs_ok) fail("8n(n+2)S differs from the contracted Biquard curvature");

  // Torsion invariants.
  if (!(td.T0 == td.T0.transpose()) || !(td.U == td.U.transpose())) fail("T0 or U is not symmetric");
  if (!td.T0.trace().is_zero() || !td.U.trace().is_zero()) fail("T0 or U is not trace free");
  RMatrix sumT0 = td.T0;
  for (int s = 0; s < 3; ++s) {
    sumT0 += congruence(td.T0, spec.IH(s));
    if (!(congruence(td.U, spec.IH(s)) == td.U)) fail("U is not Sp(n)Sp(1) invariant");
  }
  if (!sumT0.is_zero()) fail("T0 + sum T0(I_s., I_s.) != 0");
  RMatrix rebuilt(h, h);
  for (int s = 0; s < 3; ++s) {
    const RMatrix& T = td.Txi[s];
    rebuilt += td.T0xi[s] * spec.IH(s);
    if (!T.trace().is_zero() || !(T * spec.IH(s)).trace().is_zero()) fail("T_xi is not completely trace free");
  }
  if (!(rebuilt.transpose() == td.T0)) fail("sum T0_xi I_s does not reproduce T0");

  // 4nρ_s(A,B) = R(A,B,e_a,I_s e_a) and R(A,B,ξ_i,ξ_j) = 2ρ_k(A,B).
  const int dim = spec.dim();
  const auto& hp = spec.horizontal();
  const auto& v = spec.vertical();
  for (int s = 0; s < 3; ++s) {
    const int i = nxt(s), j = nxt(s, 2);
    for (int A = 0; A < dim; ++A)
      for (int B = 0; B < dim; ++B) {
        Rational r = rep.sp1.rho[s].component({A, B});
        Rational tr(0);
        for (int p = 0; p < h; ++p)
          for (int q = 0; q < h; ++q)
            if (!spec.IH(s)(q, p).is_zero()) tr += rep.curvature.r(A, B, hp[p], hp[q]) * spec.IH(s)(q, p);
        if (!(tr == r * Rational(4 * n))) {
          fail("4n rho_" + std::to_string(s + 1) + " differs from the curvature trace");
          goto next_s;
        }
        if (!(rep.curvature.r(A, B, v[i], v[j]) == r * Rational(2))) {
          fail("R(A,B,xi_i,xi_j) differs from 2 rho_k");
          goto next_s;
        }
      }
  next_s:;
  }

  // ρ_s|_H = ν ω_s with a common ν.
  {
    std::optional<Rational> nu;
    bool prop = true;
    for (int s = 0; s < 3 && prop; ++s) {
      RForm rh = rep.sp1.rho[s].restrict_to(spec.horizontal_mask());
      Rational c = spec.omega(s).coeff(spec.omega(s).terms().begin()->first);
      Rational ratio = rh.coeff(spec.omega(s).terms().begin()->first) / c;
      if (!(rh == spec.omega(s) * ratio) || (nu && !(*nu == ratio))) prop = false;
      nu = ratio;
    }
    rep.rho_proportional = prop;
    if (prop != rep.einstein) fail("einstein flag disagrees with proportionality of the qc-Ricci forms");
  }

  for (int a = 0; a < h; ++a)
    for (int b = 0; b < h; ++b)
      for (int c = 0; c < h; ++c)
        for (int d = 0; d < h; ++d)
          if (!(rep.w.w(a, b, c, d) == -rep.w.w(b, a, c, d)) || !(rep.w.w(a, b, c, d) == -rep.w.w(a, b, d, c))) {
            fail("W^qc lacks its antisymmetries");
            a = b = c = d = h;
          }

  if (!rep.forms.lemma_closed) fail("d(omega_1^eta_23 + ...) != 0");
  if (rep.forms.omega4_closed != rep.forms.omegaQ_closed) fail("closedness of Omega and Omega_Q disagree");
  rep.vertical_mixing_zero = vertical_rho_mixing_vanishes(spec, rep.sp1);
  if (n == 1 && rep.vertical_mixing_zero != rep.forms.omega4_closed)
    fail("dOmega = 0 disagrees with the vertical integrability criterion");
  return rep;
}

}  // namespace qcforge
