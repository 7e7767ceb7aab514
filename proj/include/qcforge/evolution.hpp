#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcforge/cartan.hpp"
#include "qcforge/scalar_function.hpp"

namespace qcforge {

enum class StructureKind { QK, Spin7 };

enum class OdeSystem {
  Qk,              // f f'' − f'² + S f = 0, h = f'/2
  Spin7,           // 3 f f'' + f'² − 9 S f = 0, h = f'/6
  TriaxialQk,      // 3f' = 2Σf_i, (f f_j f_k)' − S f(f_i − f_j − f_k) − 6 f1 f2 f3 = 0
  TriaxialSpin7,   // f' = 2Σf_i, (f f_j f_k)' = 2 f1 f2 f3 (heis base)
  Ideal,           // ⟨F_1, F_2, F_3⟩ closed under d, S term as derived here
  IdealCubicS,  // the same with the alternative S term S f f_j f_k
  IdealFamily,     // f_i = e^{(u_j+u_k−u_i)/2}, f_i = ¼(u_j + u_k)', u_i = ln(f_j f_k)
};

std::string ode_name(OdeSystem s);

// Coefficients of the evolution ω_s(u) = f ω_s, η_s(u) = f_s η_s with du coefficient gu, so the
// metric is f g_H + Σ f_s² η_s² + gu² du². Derivatives d/dt below mean (1/gu) d/du.
struct MetricFamily {
  std::string name;
  StructureKind kind = StructureKind::QK;
  std::string base;  // catalog name; empty when no left-invariant frame is shipped
  Rational S;
  std::map<std::string, Rational> params;
  ScalarFunction f, f1, f2, f3, gu;
  double lo = 0, hi = 1;  // open window of validity for the default samples
  std::vector<OdeSystem> systems;
  std::optional<double> expected_einstein;  // Ric = λ g when the family is Einstein

  std::vector<double> default_samples() const;
  const ScalarFunction& fs(int s) const { return s == 0 ? f1 : s == 1 ? f2 : f3; }
};

// qk-heis, qk-heis-exp, qk-l1, qk-l2, qk-3sas, qk-triaxial, ideal-family, spin7-heis,
// spin7-general, spin7-triaxial, spin7-l1, spin7-l2, spin7-3sas.
std::vector<std::string> family_names();
// Unknown parameter names raise UnknownName; missing ones take documented defaults.
MetricFamily make_family(const std::string& name, const std::map<std::string, Rational>& params = {});
std::map<std::string, Rational> family_defaults(const std::string& name);

struct SampleResult {
  double u = 0;
  double closure_residual = 0;      // max |dΦ| or |dΨ| in the hat frame
  std::array<double, 3> ideal_residual{};  // least-squares remainder of dF_i mod ⟨F⟩
  double cocalibration_residual = 0;  // |d(*φ)| on the slice (Spin(7) only)
  double psi_identity_residual = 0;   // |Ψ − 2(*φ − φ∧ê^t)| (Spin(7) only)
  double compatibility_residual = 0;  // quaternion relations of the F_i in the hat frame
  double cartan_residual = 0;
  double einstein_constant = 0;       // tr Ric / dim
  double einstein_deviation = 0;      // max |Ric − λ g|
  double ricci_max_abs = 0;
  int curvature_rank = 0;
  std::vector<double> ricci;
};

struct EvolutionReport {
  MetricFamily family;
  std::vector<SampleResult> samples;
  double closure_residual = 0;
  double ideal_residual = 0;
  double cocalibration_residual = 0;
  double psi_identity_residual = 0;
  double compatibility_residual = 0;
  double cartan_residual = 0;
  double einstein_deviation = 0;
  double ricci_max_abs = 0;
  double einstein_constant = 0;  // mean over samples
  int curvature_rank = 0;        // max over samples
};

JetCoframe family_coframe(const MetricFamily& fam, const QcFrameSpec& spec, double u);

// The 2-forms F_i (QK) or F⁻_i (Spin(7)) in the e-basis of base × line at one sample.
std::array<JForm, 3> structure_two_forms(const MetricFamily& fam, const QcFrameSpec& spec, const JetCoframe& cof);

// Builds and checks the structure at each sample. Throws DomainError when a coefficient is
// undefined or a metric coefficient is not positive, NotEinsteinBase when the base frame is not
// qc Einstein, PreconditionError when the family has no concrete base frame.
EvolutionReport build(const MetricFamily& fam, const std::vector<double>& samples = {}, double rank_tol = 1e-8);

// Max residual of a governing system over the samples.
double ode_residual(OdeSystem system, const MetricFamily& fam, const std::vector<double>& samples = {});

}  // namespace qcforge
