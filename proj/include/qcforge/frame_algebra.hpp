#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcforge/kform.hpp"
#include "qcforge/matrix.hpp"
#include "qcforge/rational.hpp"

namespace qcforge {

using RForm = KForm<Rational>;
using RVector = FrameVector<Rational>;

// Left-invariant coframe e^0..e^{n-1} given by its Maurer–Cartan differentials d e^a.
class FrameAlgebra {
 public:
  FrameAlgebra() = default;
  FrameAlgebra(std::string name, int dim, std::vector<RForm> diff);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::vector<RForm>& diff() const { return diff_; }
  const RForm& d_e(int a) const { return diff_.at(a); }

  // c^a_{bc} = e^a([e_b, e_c]) = -(d e^a)(e_b, e_c).
  const Rational& bracket_coeff(int a, int b, int c) const {
    return brackets_[(static_cast<std::size_t>(a) * dim_ + b) * dim_ + c];
  }
  RVector bracket(int b, int c) const;

  friend bool operator==(const FrameAlgebra& x, const FrameAlgebra& y) {
    return x.name_ == y.name_ && x.dim_ == y.dim_ && x.diff_ == y.diff_;
  }

 private:
  std::string name_;
  int dim_ = 0;
  std::vector<RForm> diff_;
  std::vector<Rational> brackets_;
};

// Extends d e^a to all forms as an anti-derivation; d of constants is zero.
RForm mc_differential(const FrameAlgebra& alg, const RForm& a);

struct JacobiViolation {
  int a;  // d²e^a is nonzero on (e_b, e_c, e_d), all 0-based
  int b, c, d;
  Rational value;
};

struct JacobiReport {
  bool ok = true;
  std::vector<JacobiViolation> violations;
};

JacobiReport jacobi_check(const FrameAlgebra& alg);

// Quaternionic contact data on a frame algebra: η_s = e^{vertical[s]}, the ω_s on the
// horizontal span, and the identity frame metric.
class QcFrameSpec {
 public:
  QcFrameSpec() = default;
  QcFrameSpec(FrameAlgebra alg, std::vector<int> horizontal, std::array<int, 3> vertical, std::array<RForm, 3> omega);

  const FrameAlgebra& algebra() const { return alg_; }
  int dim() const { return alg_.dim(); }
  int n() const { return static_cast<int>(horizontal_.size()) / 4; }
  const std::vector<int>& horizontal() const { return horizontal_; }
  const std::array<int, 3>& vertical() const { return vertical_; }
  const RForm& omega(int s) const { return omega_[s]; }
  Mask horizontal_mask() const { return hmask_; }

  RForm eta(int s) const { return RForm::e(dim(), vertical_[s]); }
  // Reeb fields. Default e_{vertical[s]}; replaceable to probe the Reeb conditions.
  const RVector& xi(int s) const { return reeb_[s]; }
  void set_reeb(int s, RVector v) { reeb_[s] = std::move(v); }
  bool standard_reeb() const;

  // I_s on the full frame (zero on vertical): I_s e_a = Σ_b ω_s(e_a, e_b) e_b, column a holds I_s e_a.
  const RMatrix& I(int s) const { return I_full_[s]; }
  // The same endomorphism restricted to the horizontal positions 0..4n-1.
  const RMatrix& IH(int s) const { return I_hor_[s]; }

  // Quaternion relations and metric compatibility; empty when all hold exactly.
  std::vector<std::string> invariant_violations() const;

 private:
  FrameAlgebra alg_;
  std::vector<int> horizontal_;
  std::array<int, 3> vertical_{};
  std::array<RForm, 3> omega_;
  std::array<RVector, 3> reeb_;
  std::array<RMatrix, 3> I_full_, I_hor_;
  Mask hmask_ = 0;
};

// Standard ω_1, ω_2, ω_3 on consecutive quaternionic blocks of `horizontal`.
std::array<RForm, 3> standard_omegas(int dim, const std::vector<int>& horizontal);

// --- Text format ---------------------------------------------------------------------------

struct AlgebraFile {
  FrameAlgebra algebra;
  std::optional<QcFrameSpec> qc;  // present when the file has a qc block or the default split applies
};

// Parameters declared with "param c = 1" may be overridden by `params`.
AlgebraFile parse_algebra_file(std::string_view source, const std::map<std::string, Rational>& params = {});
FrameAlgebra parse_algebra(std::string_view source, const std::map<std::string, Rational>& params = {});
QcFrameSpec parse_qc_spec(std::string_view source, const std::map<std::string, Rational>& params = {});

// Parses a single form literal such as "2 e1^e2 - 1/2 e3^e7" on a frame of dimension `dim`.
RForm parse_form(std::string_view text, int dim, const std::map<std::string, Rational>& params = {});

std::string print_algebra(const FrameAlgebra& alg, const QcFrameSpec* qc = nullptr);

// --- Catalog ---------------------------------------------------------------------------------

std::string data_dir();
// heis(n), l0(c), l0 (c = 1), l1, l2, l3.
QcFrameSpec catalog(std::string_view name);
std::string heisenberg_source(int n);
std::vector<std::string> catalog_names();

}  // namespace qcforge
