#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qcforge/connection.hpp"
#include "qcforge/frame_algebra.hpp"

namespace qcforge {

struct ReebReport {
  bool ok = true;
  std::vector<std::string> violations;
};

ReebReport reeb_check(const QcFrameSpec& spec);

// α_s = alpha_const[s] + S·alpha_s_coeff[s] before S is known; `alpha` and `rho` have S substituted.
struct Sp1Forms {
  std::array<RForm, 3> alpha_const, alpha_s_coeff;
  std::array<RForm, 3> alpha;
  std::array<RForm, 3> rho;  // ½(dα_k + α_i∧α_j) on the full frame
  std::array<Rational, 3> s_by_trace;  // S solved from each l separately
  Rational S;
};

Sp1Forms sp1_forms_and_S(const QcFrameSpec& spec);

// Horizontal tensors are 4n×4n matrices over horizontal positions: B(p, q) = B(e_p, e_q).
// Endomorphisms store the image of e_q in column q.
struct TorsionData {
  Rational S;
  RMatrix T0, U;
  std::array<RMatrix, 3> T0xi;  // symmetric parts T⁰_{ξ_s}
  std::array<RMatrix, 3> Txi;   // T_{ξ_s} = T⁰_{ξ_s} + I_s u
  std::array<RVector, 3> Tvv;   // T(ξ_i, ξ_j) for (i, j, k) cyclic, stored at k
  TorsionTensor full;
};

TorsionData torsion_decomposition(const QcFrameSpec& spec, const Sp1Forms& sp1);
ConnectionTable biquard_connection(const QcFrameSpec& spec, const TorsionData& torsion, const Sp1Forms& sp1);

struct WqcResult {
  Table4<Rational> w;  // horizontal positions
  bool is_zero = true;
};

WqcResult wqc(const QcFrameSpec& spec, const TorsionData& torsion, const CurvatureTensor& curvature);

struct FundamentalForms {
  RForm omega4, omegaQ, lemma_form;
  RForm d_omega4, d_omegaQ, d_lemma;
  bool omega4_closed = false;
  bool omegaQ_closed = false;
  bool lemma_closed = false;
};

FundamentalForms fundamental_forms_check(const QcFrameSpec& spec);

// Structure equations for the computed α: dη_i − (2ω_i − η_j∧α_k + η_k∧α_j − Sη_j∧η_k) and
// dω_i − (ω_j∧α_k − ω_k∧α_j). The second vanishes for qc Einstein structures with constant S.
struct StructureResiduals {
  std::array<RForm, 3> eta, omega;
};

StructureResiduals structure_equation_residuals(const QcFrameSpec& spec, const Sp1Forms& sp1);

// (ξ_s⌟ρ_t)|_H for s ≠ t, the dimension-seven integrability criterion.
bool vertical_rho_mixing_vanishes(const QcFrameSpec& spec, const Sp1Forms& sp1);

// Σ_{a,b horizontal} R(e_b, e_a, e_a, e_b).
Rational contracted_horizontal_curvature(const QcFrameSpec& spec, const CurvatureTensor& curvature);

struct QcReport {
  ReebReport reeb;
  Sp1Forms sp1;
  TorsionData torsion;
  ConnectionTable biquard;
  CurvatureTensor curvature;
  WqcResult w;
  FundamentalForms forms;
  Rational S;
  Rational qscs_contracted;
  bool qscs_ok = false;
  bool einstein = false;
  bool rho_proportional = false;  // ρ_s|_H = ν ω_s with one common ν
  bool vertical_mixing_zero = false;
  std::vector<std::string> failures;  // invariants that did not hold
};

// Runs the full pipeline. Throws PreconditionError if the Reeb conditions fail.
QcReport qc_report(const QcFrameSpec& spec);

}  // namespace qcforge
