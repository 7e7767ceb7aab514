#include "qcforge/evolution.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "qcforge/qc_verifier.hpp"

namespace qcforge {

std::string ode_name(OdeSystem s) {
  switch (s) {
    case OdeSystem::Qk: return "qk";
    case OdeSystem::Spin7: return "spin7";
    case OdeSystem::TriaxialQk: return "triaxial-qk";
    case OdeSystem::TriaxialSpin7: return "triaxial-spin7";
    case OdeSystem::Ideal: return "ideal";
    case OdeSystem::IdealCubicS: return "ideal-cubic-s";
    case OdeSystem::IdealFamily: return "ideal-family";
  }
  return "?";
}

std::vector<double> MetricFamily::default_samples() const {
  std::vector<double> out;
  const double w = hi - lo;
  for (int i = 0; i < 5; ++i) out.push_back(lo + w * (0.1 + 0.8 * i / 4.0));
  return out;
}

std::vector<std::string> family_names() {
  return {"qk-heis",     "qk-heis-exp", "qk-l1",          "qk-l2",    "qk-3sas",  "qk-triaxial", "ideal-family",
          "spin7-heis", "spin7-triaxial", "spin7-l1", "spin7-l2", "spin7-3sas"};
}

std::map<std::string, Rational> family_defaults(const std::string& name) {
  if (name == "qk-heis") return {{"a", Rational(1)}, {"n", Rational(1)}};
  if (name == "qk-heis-exp") return {{"b", Rational(1)}, {"n", Rational(1)}};
  if (name == "qk-l1" || name == "qk-l2") return {{"b", Rational(1)}};
  if (name == "qk-3sas") return {{"a", Rational(1)}};
  if (name == "qk-triaxial") return {{"a1", Rational(0)}, {"a2", Rational(1)}, {"a3", Rational(2)}, {"C", Rational(1)}};
  if (name == "ideal-family") return {{"a1", Rational(1)}, {"a2", Rational(2)}, {"a3", Rational(3)}};
  if (name == "spin7-heis") return {{"a", Rational(1)}};
  if (name == "spin7-triaxial")
    return {{"a1", Rational(1)}, {"a2", Rational(11, 10)}, {"a3", Rational(-1)}, {"C", Rational(1)}};
  if (name == "spin7-l1" || name == "spin7-l2") return {{"b", Rational(2)}};
  if (name == "spin7-3sas") return {{"a", Rational(1)}};
  throw UnknownName("unknown family '" + name + "'");
}

namespace {

using SF = ScalarFunction;

double d(const Rational& r) { return r.to_double(); }

// Bounded interval where p(u) = s·(u − r1)(u − r2)(u − r3) > 0, falling back to a width-2
// interval next to the outermost root.
std::pair<double, double> positive_window(std::vector<double> roots, double lead_sign) {
  std::sort(roots.begin(), roots.end());
  auto sign_at = [&](double u) {
    double p = lead_sign;
    for (double r : roots) p *= (u - r);
    return p;
  };
  for (int i = 0; i + 1 < 3; ++i)
    if (roots[i + 1] - roots[i] > 1e-12 && sign_at(0.5 * (roots[i] + roots[i + 1])) > 0)
      return {roots[i], roots[i + 1]};
  if (sign_at(roots[2] + 1) > 0) return {roots[2], roots[2] + 2};
  return {roots[0] - 2, roots[0]};
}

}  // namespace

MetricFamily make_family(const std::string& name, const std::map<std::string, Rational>& given) {
  auto p = family_defaults(name);
  for (const auto& [k, v] : given) {
    if (!p.count(k)) throw UnknownName("family '" + name + "' has no parameter '" + k + "'");
    p[k] = v;
  }
  MetricFamily fam;
  fam.name = name;
  fam.params = p;
  const SF U = SF::var();
  const auto third = Rational(1, 3);

  auto qk_canonical = [&](const Rational& S, const Rational& a, int n) {
    // h² = ½ S u + a u², gu = 1/(2h)
    SF h = sqrt(SF(S / Rational(2)) * U + SF(a) * U * U);
    fam.kind = StructureKind::QK;
    fam.S = S;
    fam.f = U;
    fam.f1 = fam.f2 = fam.f3 = h;
    fam.gu = SF(Rational(1)) / (SF(Rational(2)) * h);
    fam.systems = {OdeSystem::Qk, OdeSystem::TriaxialQk, OdeSystem::Ideal};
    fam.expected_einstein = -4.0 * (n + 3) * d(a);
  };
  auto spin7_canonical = [&](const Rational& S, const SF& h2) {
    SF h = sqrt(h2);
    fam.kind = StructureKind::Spin7;
    fam.S = S;
    fam.f = U;
    fam.f1 = fam.f2 = fam.f3 = h;
    fam.gu = SF(Rational(1)) / (SF(Rational(6)) * h);
    fam.systems = {OdeSystem::Spin7};
    fam.expected_einstein = 0.0;
  };
  auto need_positive = [&](const char* key) {
    if (p.at(key).sign() <= 0) throw DomainError(std::string("parameter ") + key + " must be positive");
  };

  if (name == "qk-heis") {
    const Rational& n = p.at("n");
    if (!n.is_integer() || n.sign() <= 0 || n > Rational(7)) throw DomainError("n must be an integer in 1..7");
    need_positive("a");
    fam.base = "heis(" + n.str() + ")";
    qk_canonical(Rational(0), p.at("a"), static_cast<int>(d(n)));
    fam.lo = 0;
    fam.hi = 2;
  } else if (name == "qk-heis-exp") {
    // Exponential coordinate u = e^{2bσ}; the variable here is σ and gu = 1.
    const Rational& n = p.at("n");
    if (!n.is_integer() || n.sign() <= 0 || n > Rational(7)) throw DomainError("n must be an integer in 1..7");
    const Rational& b = p.at("b");
    if (b.is_zero()) throw DomainError("b must be nonzero");
    fam.base = "heis(" + n.str() + ")";
    fam.kind = StructureKind::QK;
    fam.S = Rational(0);
    fam.f = exp(SF(b * Rational(2)) * U);
    fam.f1 = fam.f2 = fam.f3 = SF(b) * fam.f;
    fam.gu = SF(Rational(1));
    fam.systems = {OdeSystem::Qk, OdeSystem::TriaxialQk, OdeSystem::Ideal};
    fam.expected_einstein = -4.0 * (d(n) + 3) * d(b * b);
    fam.lo = -1;
    fam.hi = 1;
  } else if (name == "qk-l1" || name == "qk-l2") {
    need_positive("b");
    const Rational& b = p.at("b");
    const bool one = name == "qk-l1";
    fam.base = one ? "l1" : "l2";
    qk_canonical(one ? Rational(-1, 2) : Rational(-1, 4), b * b / Rational(one ? 4 : 8), 1);
    fam.lo = 1.0 / d(b * b);
    fam.hi = 3.0 / d(b * b);
  } else if (name == "qk-3sas") {
    need_positive("a");
    qk_canonical(Rational(2), p.at("a"), 1);
    fam.lo = 0;
    fam.hi = 2;
  } else if (name == "qk-triaxial") {
    need_positive("C");
    const Rational& C = p.at("C");
    std::array<Rational, 3> a{p.at("a1"), p.at("a2"), p.at("a3")};
    std::array<SF, 3> L;
    for (int i = 0; i < 3; ++i) L[i] = U + SF(a[i]);
    SF P = L[0] * L[1] * L[2];
    fam.base = "heis(1)";
    fam.kind = StructureKind::QK;
    fam.S = Rational(0);
    fam.f = SF(C) * pow(P, Rational(1, 9));
    SF k = sqrt(SF(Rational(6) / C));
    fam.f1 = k * pow(P, Rational(4, 9)) / L[0];
    fam.f2 = k * pow(P, Rational(4, 9)) / L[1];
    fam.f3 = k * pow(P, Rational(4, 9)) / L[2];
    fam.gu = pow(SF(C / Rational(6)), Rational(3, 2)) * pow(P, -third);
    fam.systems = {OdeSystem::TriaxialQk};
    if (a[0] == a[1] && a[1] == a[2]) {
      fam.expected_einstein = -96.0 / std::pow(d(C), 3);
      fam.systems.push_back(OdeSystem::Ideal);
    }
    double m = std::min({d(a[0]), d(a[1]), d(a[2])});
    fam.lo = -m;
    fam.hi = -m + 3;
  } else if (name == "ideal-family") {
    std::array<Rational, 3> a{p.at("a1"), p.at("a2"), p.at("a3")};
    std::array<SF, 3> L;
    for (int i = 0; i < 3; ++i) L[i] = SF(a[i]) - U;
    fam.base = "heis(1)";
    fam.kind = StructureKind::QK;
    fam.S = Rational(0);
    fam.f = SF(Rational(1));
    const Rational q(1, 4), tq(3, 4);
    fam.f1 = pow(L[1], q) * pow(L[2], q) / pow(L[0], tq);
    fam.f2 = pow(L[2], q) * pow(L[0], q) / pow(L[1], tq);
    fam.f3 = pow(L[0], q) * pow(L[1], q) / pow(L[2], tq);
    fam.gu = SF(q) * pow(L[0] * L[1] * L[2], -q);
    fam.systems = {OdeSystem::Ideal, OdeSystem::IdealCubicS, OdeSystem::IdealFamily};
    double m = std::min({d(a[0]), d(a[1]), d(a[2])});
    fam.lo = m - 2;
    fam.hi = m;
  } else if (name == "spin7-heis") {
    need_positive("a");
    const Rational& a = p.at("a");
    fam.base = "heis(1)";
    fam.kind = StructureKind::Spin7;
    fam.S = Rational(0);
    fam.f = pow(U, Rational(3));
    fam.f1 = fam.f2 = fam.f3 = SF(a / Rational(4)) / U;
    fam.gu = SF(Rational(2) / a) * pow(U, Rational(3));
    fam.systems = {OdeSystem::Spin7, OdeSystem::TriaxialSpin7};
    fam.expected_einstein = 0.0;
    fam.lo = 0;
    fam.hi = 2;
  } else if (name == "spin7-triaxial") {
    need_positive("C");
    const Rational& C = p.at("C");
    std::array<Rational, 3> a{p.at("a1"), p.at("a2"), p.at("a3")};
    SF A1 = U + SF(a[0]), A2 = U + SF(a[1]), A3 = SF(a[2]) - U;
    fam.base = "heis(1)";
    fam.kind = StructureKind::Spin7;
    fam.S = Rational(0);
    fam.f = SF(C) * A1 * A2 * A3;
    SF k = sqrt(SF(Rational(2) / C));
    fam.f1 = k / A1;
    fam.f2 = k / A2;
    fam.f3 = -(k / A3);  // the sign that solves the system; the metric only sees f3²
    fam.gu = sqrt(SF(C * C * C / Rational(8))) * A1 * A2 * A3;
    fam.systems = {OdeSystem::TriaxialSpin7};
    fam.expected_einstein = 0.0;
    auto w = positive_window({-d(a[0]), -d(a[1]), d(a[2])}, -1.0);
    fam.lo = w.first;
    fam.hi = w.second;
  } else if (name == "spin7-l1" || name == "spin7-l2") {
    need_positive("b");
    const Rational& b = p.at("b");
    const bool one = name == "spin7-l1";
    fam.base = one ? "l1" : "l2";
    SF u23 = pow(U, Rational(2, 3));
    spin7_canonical(one ? Rational(-1, 2) : Rational(-1, 4),
                    (SF(b) - pow(U, Rational(5, 3))) / (SF(Rational(one ? 20 : 40)) * u23));
    fam.lo = 0;
    fam.hi = std::pow(d(b), 0.6);
  } else if (name == "spin7-3sas") {
    need_positive("a");
    const Rational& a = p.at("a");
    SF u23 = pow(U, Rational(2, 3));
    spin7_canonical(Rational(2), (pow(U, Rational(5, 3)) - SF(a)) / (SF(Rational(5)) * u23));
    fam.lo = std::pow(d(a), 0.6);
    fam.hi = fam.lo + 2;
  }
  return fam;
}

JetCoframe family_coframe(const MetricFamily& fam, const QcFrameSpec& spec, double u) {
  if (!std::isfinite(u)) throw DomainError("sample is not finite");
  JetCoframe cof{spec.algebra(), std::vector<Jet>(spec.dim() + 1)};
  Jet f = fam.f.eval(u);
  if (!(f.value() > 0) || !std::isfinite(f.value()))
    throw DomainError("horizontal metric coefficient is not positive at u = " + std::to_string(u));
  Jet sf = sqrt(f);
  for (int x : spec.horizontal()) cof.scale[x] = sf;
  for (int s = 0; s < 3; ++s) {
    Jet v = fam.fs(s).eval(u);
    if (!std::isfinite(v.value()) || v.value() == 0.0)
      throw DomainError("vertical metric coefficient vanishes at u = " + std::to_string(u));
    cof.scale[spec.vertical()[s]] = v;
  }
  Jet g = fam.gu.eval(u);
  if (!std::isfinite(g.value()) || g.value() == 0.0)
    throw DomainError("du coefficient vanishes at u = " + std::to_string(u));
  cof.scale[spec.dim()] = g;
  return cof;
}

std::array<JForm, 3> structure_two_forms(const MetricFamily& fam, const QcFrameSpec& spec, const JetCoframe& cof) {
  const int n = cof.dim();
  std::vector<int> slot(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) slot[i] = i;
  const Jet f = cof.scale[spec.horizontal()[0]] * cof.scale[spec.horizontal()[0]];
  std::array<JForm, 3> om, eta;
  for (int s = 0; s < 3; ++s) {
    om[s] = spec.omega(s).embed(n, slot).map([&](const Rational& c) { return Jet(c.to_double()) * f; });
    eta[s] = JForm::monomial(n, {spec.vertical()[s]}, cof.scale[spec.vertical()[s]]);
  }
  JForm et = JForm::monomial(n, {cof.du_index()}, cof.scale[cof.du_index()]);
  std::array<JForm, 3> F;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    if (fam.kind == StructureKind::QK) {
      F[i] = om[i] + wedge(eta[j], eta[k]) - wedge(eta[i], et);
    } else {
      JForm rest = wedge(eta[j], eta[k]) + wedge(eta[i], et);
      F[i] = i == 2 ? om[i] + rest : om[i] - rest;
    }
  }
  return F;
}

namespace {

Eigen::MatrixXd hat_matrix(const KForm<double>& f, int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [mask, c] : f.terms()) {
    auto idx = mask_indices(mask);
    m(idx[0], idx[1]) = c;
    m(idx[1], idx[0]) = -c;
  }
  return m;
}

// dF_i = Σ_j β_j∧F_j solved in the least-squares sense over 1-forms β_j; returns the remainder.
double ideal_remainder(const KForm<double>& target, const std::array<KForm<double>, 3>& F) {
  const int n = target.dim();
  std::vector<KForm<double>> cols;
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < n; ++c) cols.push_back(wedge(KForm<double>::e(n, c), F[j]));
  std::map<Mask, int> row;
  for (const auto& col : cols)
    for (const auto& [m, v] : col.terms()) row.try_emplace(m, 0);
  for (const auto& [m, v] : target.terms()) row.try_emplace(m, 0);
  int r = 0;
  for (auto& [m, i] : row) i = r++;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(r, static_cast<int>(cols.size()));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(r);
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (const auto& [m, v] : cols[c].terms()) A(row[m], static_cast<int>(c)) = v;
  for (const auto& [m, v] : target.terms()) b(row[m]) = v;
  if (r == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  Eigen::VectorXd x = svd.solve(b);
  return (A * x - b).cwiseAbs().maxCoeff();
}

double quaternion_residual(const std::array<KForm<double>, 3>& F, int n) {
  std::array<Eigen::MatrixXd, 3> M;
  for (int i = 0; i < 3; ++i) M[i] = hat_matrix(F[i], n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  double best = std::numeric_limits<double>::infinity();
  for (double sigma : {1.0, -1.0}) {
    double e = 0;
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      e = std::max(e, (M[i] * M[i] + id).cwiseAbs().maxCoeff());
      e = std::max(e, (M[i] * M[j] - sigma * M[k]).cwiseAbs().maxCoeff());
    }
    best = std::min(best, e);
  }
  return best;
}

}  // namespace

EvolutionReport build(const MetricFamily& fam, const std::vector<double>& given, double rank_tol) {
  if (fam.base.empty())
    throw PreconditionError("family '" + fam.name + "' has no left-invariant base frame; use the symbolic checks");
  const QcFrameSpec spec = catalog(fam.base);
  const QcReport base = qc_report(spec);
  if (!base.einstein) throw NotEinsteinBase("base '" + fam.base + "' is not qc Einstein");
  if (!(base.S == fam.S)) throw PreconditionError("family assumes S = " + fam.S.str() + " but the base has S = " + base.S.str());
  if (fam.kind == StructureKind::Spin7 && spec.n() != 1) throw PreconditionError("Spin(7) builds need a 7-dimensional base");

  const std::vector<double> samples = given.empty() ? fam.default_samples() : given;
  EvolutionReport rep;
  rep.family = fam;
  const FrameAlgebra ext = extend_by_line(spec.algebra());
  for (double u : samples) {
    SampleResult sr;
    sr.u = u;
    JetCoframe cof = family_coframe(fam, spec, u);
    const int n = cof.dim();
    auto F = structure_two_forms(fam, spec, cof);
    std::array<KForm<double>, 3> Fh;
    for (int i = 0; i < 3; ++i) Fh[i] = to_hat(cof, F[i]);
    sr.compatibility_residual = quaternion_residual(Fh, n);

    if (fam.kind == StructureKind::QK) {
      JForm Phi = wedge(F[0], F[0]) + wedge(F[1], F[1]) + wedge(F[2], F[2]);
      sr.closure_residual = to_hat(cof, ext_d(ext, Phi)).max_abs();
      for (int i = 0; i < 3; ++i) sr.ideal_residual[i] = ideal_remainder(to_hat(cof, ext_d(ext, F[i])), Fh);
    } else {
      JForm Psi = wedge(F[0], F[0]) + wedge(F[1], F[1]) - wedge(F[2], F[2]);
      sr.closure_residual = to_hat(cof, ext_d(ext, Psi)).max_abs();
      const auto& v = spec.vertical();
      const Jet fh = cof.scale[spec.horizontal()[0]] * cof.scale[spec.horizontal()[0]];
      std::vector<int> slot(spec.dim());
      for (int i = 0; i < spec.dim(); ++i) slot[i] = i;
      std::array<JForm, 3> om, eta;
      for (int s = 0; s < 3; ++s) {
        om[s] = spec.omega(s).embed(n, slot).map([&](const Rational& c) { return Jet(c.to_double()) * fh; });
        eta[s] = JForm::monomial(n, {v[s]}, cof.scale[v[s]]);
      }
      JForm et = JForm::monomial(n, {cof.du_index()}, cof.scale[cof.du_index()]);
      JForm phi = wedge(om[0], eta[0]) + wedge(om[1], eta[1]) + wedge(om[2], eta[2]) - wedge(eta[0], eta[1], eta[2]);
      JForm starphi = wedge(om[0], om[0]) * Jet(0.5) -
                      (wedge(om[0], eta[1], eta[2]) + wedge(om[1], eta[2], eta[0]) + wedge(om[2], eta[0], eta[1]));
      sr.psi_identity_residual = to_hat(cof, Psi - (starphi - wedge(phi, et)) * Jet(2.0)).max_abs();
      sr.cocalibration_residual = to_hat(cof, ext_d(ext, starphi, true)).max_abs();
    }

    CartanConnection conn = cartan_connection(cof);
    sr.cartan_residual = std::max(conn.structure_residual, conn.antisymmetry_residual);
    RicciResult rr = ricci_and_rank(cof, conn, rank_tol);
    sr.ricci = rr.ricci;
    sr.curvature_rank = rr.curvature_rank;
    sr.einstein_constant = rr.scalar / n;
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        double val = rr.ric(y, z);
        sr.ricci_max_abs = std::max(sr.ricci_max_abs, std::abs(val));
        sr.einstein_deviation = std::max(sr.einstein_deviation, std::abs(val - (y == z ? sr.einstein_constant : 0.0)));
      }

    rep.closure_residual = std::max(rep.closure_residual, sr.closure_residual);
    for (double r : sr.ideal_residual) rep.ideal_residual = std::max(rep.ideal_residual, r);
    rep.cocalibration_residual = std::max(rep.cocalibration_residual, sr.cocalibration_residual);
    rep.psi_identity_residual = std::max(rep.psi_identity_residual, sr.psi_identity_residual);
    rep.compatibility_residual = std::max(rep.compatibility_residual, sr.compatibility_residual);
    rep.cartan_residual = std::max(rep.cartan_residual, sr.cartan_residual);
    rep.einstein_deviation = std::max(rep.einstein_deviation, sr.einstein_deviation);
    rep.ricci_max_abs = std::max(rep.ricci_max_abs, sr.ricci_max_abs);
    rep.einstein_constant += sr.einstein_constant / static_cast<double>(samples.size());
    rep.curvature_rank = std::max(rep.curvature_rank, sr.curvature_rank);
    rep.samples.push_back(std::move(sr));
  }
  return rep;
}

double ode_residual(OdeSystem system, const MetricFamily& fam, const std::vector<double>& given) {
  const std::vector<double> samples = given.empty() ? fam.default_samples() : given;
  const double S = fam.S.to_double();
  double worst = 0;
  for (double u : samples) {
    const Jet G = fam.gu.eval(u);
    if (G.value() == 0.0 || !std::isfinite(G.value())) throw DomainError("du coefficient vanishes at the sample");
    auto D = [&](const Jet& x) { return x.derivative() / G; };
    const Jet f = fam.f.eval(u);
    const std::array<Jet, 3> fs{fam.f1.eval(u), fam.f2.eval(u), fam.f3.eval(u)};
    const Jet prod = fs[0] * fs[1] * fs[2];
    std::vector<Jet> r;
    switch (system) {
      case OdeSystem::Qk:
        r = {f * D(D(f)) - D(f) * D(f) + Jet(S) * f, fs[0] - D(f) * Jet(0.5), fs[0] - fs[1], fs[1] - fs[2]};
        break;
      case OdeSystem::Spin7:
        r = {Jet(3.0) * f * D(D(f)) + D(f) * D(f) - Jet(9.0 * S) * f, fs[0] - D(f) * Jet(1.0 / 6.0), fs[0] - fs[1],
             fs[1] - fs[2]};
        break;
      case OdeSystem::TriaxialQk:
        r.push_back(Jet(3.0) * D(f) - Jet(2.0) * (fs[0] + fs[1] + fs[2]));
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3, k = (i + 2) % 3;
          r.push_back(D(f * fs[j] * fs[k]) - Jet(S) * f * (fs[i] - fs[j] - fs[k]) - Jet(6.0) * prod);
        }
        break;
      case OdeSystem::TriaxialSpin7:
        r.push_back(D(f) - Jet(2.0) * (fs[0] + fs[1] + fs[2]));
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3, k = (i + 2) % 3;
          r.push_back(D(f * fs[j] * fs[k]) - Jet(2.0) * prod);
        }
        break;
      case OdeSystem::Ideal:
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3, k = (i + 2) % 3;
          const Jet p = fs[j] * fs[k];
          r.push_back(f * D(p) - D(f) * p + Jet(2.0) * prod - Jet(2.0) * p * (fs[j] + fs[k]) +
                      Jet(S) * f * (fs[j] + fs[k]) - Jet(S) * f * fs[i]);
        }
        break;
      case OdeSystem::IdealCubicS:
        for (int k = 0; k < 3; ++k) {
          const int i = (k + 1) % 3, j = (k + 2) % 3;
          const Jet p = fs[i] * fs[j];
          r.push_back(f * D(p) - D(f) * p + Jet(2.0) * prod - Jet(2.0) * p * (fs[i] + fs[j]) + Jet(S) * f * p -
                      Jet(S) * f * fs[k]);
        }
        break;
      case OdeSystem::IdealFamily: {
        std::array<Jet, 3> lu;
        for (int i = 0; i < 3; ++i) lu[i] = log(fs[(i + 1) % 3] * fs[(i + 2) % 3]);
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3, k = (i + 2) % 3;
          r.push_back(fs[i] - exp((lu[j] + lu[k] - lu[i]) * Jet(0.5)));
          r.push_back(fs[i] - D(lu[j] + lu[k]) * Jet(0.25));
        }
        break;
      }
    }
    for (const auto& x : r) worst = std::max(worst, std::abs(x.value()));
  }
  return worst;
}

}  // namespace qcforge
