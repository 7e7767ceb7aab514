#include "qcforge/cartan.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace qcforge {

FrameAlgebra extend_by_line(const FrameAlgebra& base) {
  const int m = base.dim();
  std::vector<int> slot(m);
  for (int i = 0; i < m; ++i) slot[i] = i;
  std::vector<RForm> diff;
  for (const auto& d : base.diff()) diff.push_back(d.embed(m + 1, slot));
  diff.emplace_back(m + 1, 2);
  return FrameAlgebra(base.name() + "xR", m + 1, std::move(diff));
}

JForm ext_d(const FrameAlgebra& ext, const JForm& a, bool spatial_only) {
  const int n = ext.dim();
  const Mask du = Mask{1} << (n - 1);
  JForm out(n, a.degree() + 1);
  for (const auto& [m, c] : a.terms()) {
    if (!spatial_only && !(m & du)) {
      int s = wedge_sign(du, m);
      Jet dc = c.derivative();
      out.add(m | du, s > 0 ? dc : -dc);
    }
    RForm dm = mc_differential(ext, RForm::monomial(n, mask_indices(m)));
    Jet v = spatial_only ? Jet(c.value()) : c;
    for (const auto& [mm, rc] : dm.terms()) out.add(mm, v * Jet(rc.to_double()));
  }
  return out;
}

double jet_abs(const Jet& j) {
  double m = 0;
  for (int k = 0; k <= std::max(0, std::min(3, j.order)); ++k) m = std::max(m, std::abs(j.c[k]));
  return m;
}

double jform_abs(const JForm& a) {
  double m = 0;
  for (const auto& [k, c] : a.terms()) m = std::max(m, jet_abs(c));
  return m;
}

KForm<double> to_hat(const JetCoframe& cof, const JForm& a) {
  KForm<double> out(a.dim(), a.degree());
  for (const auto& [m, c] : a.terms()) {
    double v = c.value();
    for (int i : mask_indices(m)) v /= cof.scale[i].value();
    out.add(m, v);
  }
  return out;
}

namespace {

void check_coframe(const JetCoframe& cof) {
  if (static_cast<int>(cof.scale.size()) != cof.dim()) throw FrameMismatch("coframe needs one scale per direction");
  for (const auto& s : cof.scale)
    if (!std::isfinite(s.value()) || s.value() == 0.0) throw SingularCoframe("coframe degenerates at the sample");
}

}  // namespace

CartanConnection cartan_connection(const JetCoframe& cof) {
  check_coframe(cof);
  const int n = cof.dim();
  FrameAlgebra ext = extend_by_line(cof.base);
  std::vector<JForm> hat(n), dhat(n);
  for (int a = 0; a < n; ++a) {
    hat[a] = JForm::monomial(n, {a}, cof.scale[a]);
    dhat[a] = ext_d(ext, hat[a]);
  }
  // K[a][p][q] = dê^a(ê_p, ê_q)
  std::vector<Jet> K(static_cast<std::size_t>(n) * n * n);
  auto k = [&](int a, int p, int q) -> Jet& { return K[(static_cast<std::size_t>(a) * n + p) * n + q]; };
  for (int a = 0; a < n; ++a)
    for (const auto& [m, c] : dhat[a].terms()) {
      auto idx = mask_indices(m);
      Jet v = c / (cof.scale[idx[0]] * cof.scale[idx[1]]);
      k(a, idx[0], idx[1]) = v;
      k(a, idx[1], idx[0]) = -v;
    }
  CartanConnection conn;
  conn.n = n;
  conn.omega.assign(static_cast<std::size_t>(n) * n, JForm(n, 1));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      JForm w(n, 1);
      for (int c = 0; c < n; ++c) {
        Jet W = (k(a, b, c) + k(b, c, a) - k(c, a, b)) * Jet(0.5);
        if (!is_zero(W)) w.add(Mask{1} << c, W * cof.scale[c]);
      }
      conn.omega[static_cast<std::size_t>(a) * n + b] = w;
    }
  for (int a = 0; a < n; ++a) {
    JForm res = dhat[a];
    for (int b = 0; b < n; ++b) res += wedge(conn.at(a, b), hat[b]);
    conn.structure_residual = std::max(conn.structure_residual, to_hat(cof, res).max_abs());
    for (int b = 0; b < n; ++b)
      conn.antisymmetry_residual = std::max(conn.antisymmetry_residual, jform_abs(conn.at(a, b) + conn.at(b, a)));
  }
  return conn;
}

RicciResult ricci_and_rank(const JetCoframe& cof, const CartanConnection& conn, double rank_tol) {
  check_coframe(cof);
  const int n = cof.dim();
  FrameAlgebra ext = extend_by_line(cof.base);
  RicciResult out;
  out.n = n;
  out.curvature.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  const int pairs = n * (n - 1) / 2;
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(pairs, pairs);
  std::vector<int> pair_index(static_cast<std::size_t>(n) * n, -1);
  for (int p = 0, r = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) pair_index[static_cast<std::size_t>(p) * n + q] = r++;

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      JForm Om = ext_d(ext, conn.at(a, b));
      for (int c = 0; c < n; ++c) Om += wedge(conn.at(a, c), conn.at(c, b));
      for (const auto& [m, v] : Om.terms()) {
        auto idx = mask_indices(m);
        const int p = idx[0], q = idx[1];
        double val = v.value() / (cof.scale[p].value() * cof.scale[q].value());
        out.curvature[((static_cast<std::size_t>(a) * n + b) * n + p) * n + q] = val;
        out.curvature[((static_cast<std::size_t>(a) * n + b) * n + q) * n + p] = -val;
        if (a < b) op(pair_index[static_cast<std::size_t>(a) * n + b], pair_index[static_cast<std::size_t>(p) * n + q]) = val;
      }
    }
  out.ricci.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int y = 0; y < n; ++y)
    for (int z = 0; z < n; ++z) {
      double s = 0;
      for (int a = 0; a < n; ++a) s += out.r(a, z, a, y);
      out.ricci[static_cast<std::size_t>(y) * n + z] = s;
    }
  for (int y = 0; y < n; ++y) out.scalar += out.ric(y, y);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(op);
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double top = sv.size() ? sv(0) : 0.0;
  for (int i = 0; i < sv.size(); ++i)
    if (top > 0 && sv(i) > rank_tol * top) ++out.curvature_rank;
  return out;
}

}  // namespace qcforge
