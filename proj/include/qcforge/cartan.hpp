#pragma once

#include <vector>

#include "qcforge/frame_algebra.hpp"
#include "qcforge/jet.hpp"

namespace qcforge {

using JForm = KForm<Jet>;

// Left-invariant base frame times a line with coordinate u. The coframe is
// ê^a = scale[a](u) e^a for base indices and ê^m = scale[m](u) du with m = base.dim().
struct JetCoframe {
  FrameAlgebra base;
  std::vector<Jet> scale;
  int dim() const { return base.dim() + 1; }
  int du_index() const { return base.dim(); }
};

// The base algebra with one extra closed generator du appended.
FrameAlgebra extend_by_line(const FrameAlgebra& base);

// d on forms with u-dependent coefficients: d(φ e^I) = φ' du∧e^I + φ d(e^I).
// With `spatial_only` the du∧∂_u part is dropped (the differential on a fixed slice).
JForm ext_d(const FrameAlgebra& extended, const JForm& a, bool spatial_only = false);

// Largest |c_k| over the meaningful jet slots.
double jet_abs(const Jet& j);
double jform_abs(const JForm& a);

// Coefficients of `a` in the orthonormal coframe ê (divides by the scales).
KForm<double> to_hat(const JetCoframe& cof, const JForm& a);

struct CartanConnection {
  int n = 0;
  std::vector<JForm> omega;   // omega[a*n+b] = ω^a_b in the e-basis
  double structure_residual = 0;  // max |dê^a + ω^a_b∧ê^b| in the hat frame
  double antisymmetry_residual = 0;  // max |ω^a_b + ω^b_a|
  const JForm& at(int a, int b) const { return omega[static_cast<std::size_t>(a) * n + b]; }
};

// Levi-Civita connection forms of the metric Σ(ê^a)². Throws SingularCoframe.
CartanConnection cartan_connection(const JetCoframe& cof);

struct RicciResult {
  int n = 0;
  std::vector<double> curvature;  // R[((a*n+b)*n+p)*n+q] = Ω^a_b(ê_p, ê_q)
  std::vector<double> ricci;      // n×n, Ric(ê_y, ê_z) = Σ_a Ω^a_z(ê_a, ê_y)
  double scalar = 0;
  int curvature_rank = 0;
  std::vector<double> singular_values;
  double r(int a, int b, int p, int q) const {
    return curvature[((static_cast<std::size_t>(a) * n + b) * n + p) * n + q];
  }
  double ric(int y, int z) const { return ricci[static_cast<std::size_t>(y) * n + z]; }
};

// rank_tol is relative to the largest singular value of the curvature operator.
RicciResult ricci_and_rank(const JetCoframe& cof, const CartanConnection& conn, double rank_tol = 1e-8);

}  // namespace qcforge
