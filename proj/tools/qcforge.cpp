#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcforge/acceptance.hpp"
#include "qcforge/errors.hpp"
#include "qcforge/evolution.hpp"
#include "qcforge/qc_verifier.hpp"
#include "qcforge/symbolic_dga.hpp"

using json = nlohmann::ordered_json;
using namespace qcforge;

namespace {

struct RunConfig {
  std::string command;
  std::string catalog_name, file;
  std::vector<std::string> params;
  std::vector<double> samples;
  double tol_residual = 1e-10;
  double tol_ricci = 1e-8;
  double tol_rank = 1e-8;
  std::string format = "text";
  std::string kind, family, target;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string out;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

std::map<std::string, Rational> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, Rational> out;
  for (const auto& kv : raw) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("parameter must look like name=value: " + kv);
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    // Floats such as 0.25 are accepted and converted exactly.
    auto dot = val.find('.');
    if (dot != std::string::npos && val.find('/') == std::string::npos) {
      std::string digits = val.substr(0, dot) + val.substr(dot + 1);
      std::string den = "1" + std::string(val.size() - dot - 1, '0');
      out[key] = Rational::parse(digits + "/" + den);
    } else {
      out[key] = Rational::parse(val);
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnknownName("cannot read file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Output accumulates both forms; text lines carry every verdict that the JSON has.
struct Output {
  json report = json::object();
  std::vector<std::string> lines;
  void line(const std::string& s) { lines.push_back(s); }
  void verdict(const std::string& label, bool ok) { lines.push_back(label + ": " + (ok ? "pass" : "FAIL")); }
};

json provenance(const RunConfig& cfg, const std::string& input, const std::string& hashed) {
  json p;
  p["command"] = cfg.command;
  p["input"] = input;
  p["input_hash"] = "sha256:" + sha256_hex(hashed);
  json params = json::object();
  for (const auto& [k, v] : parse_params(cfg.params)) params[k] = v.str();
  p["parameters"] = params;
  p["tolerances"] = {{"residual", cfg.tol_residual}, {"ricci", cfg.tol_ricci}, {"rank", cfg.tol_rank}};
  p["version"] = QCFORGE_VERSION;
  return p;
}

struct Input {
  std::string label, source;  // source is hashed for provenance
  bool from_file = false;
};

Input resolve_input(const RunConfig& cfg) {
  if (cfg.catalog_name.empty() == cfg.file.empty()) throw ParseError("exactly one of --catalog or --file is required");
  if (!cfg.file.empty()) return {cfg.file, read_file(cfg.file), true};
  return {cfg.catalog_name, "catalog:" + cfg.catalog_name, false};
}

json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return rows;
}

int cmd_check_algebra(const RunConfig& cfg, Output& out) {
  auto in = resolve_input(cfg);
  auto params = parse_params(cfg.params);
  FrameAlgebra alg = in.from_file ? parse_algebra_file(in.source, params).algebra : catalog(cfg.catalog_name).algebra();
  auto rep = jacobi_check(alg);
  out.report["provenance"] = provenance(cfg, in.label, in.source);
  out.report["algebra"] = alg.name();
  out.report["dim"] = alg.dim();
  out.report["ok"] = rep.ok;
  json viol = json::array();
  out.line("algebra: " + alg.name() + " (dim " + std::to_string(alg.dim()) + ")");
  for (const auto& v : rep.violations) {
    viol.push_back({{"a", v.a + 1}, {"b", v.b + 1}, {"c", v.c + 1}, {"d", v.d + 1}, {"value", v.value.str()}});
    out.line("  d^2 e" + std::to_string(v.a + 1) + " (e" + std::to_string(v.b + 1) + ", e" + std::to_string(v.c + 1) +
             ", e" + std::to_string(v.d + 1) + ") = " + v.value.str());
  }
  out.report["violations"] = viol;
  out.verdict("d^2 = 0", rep.ok);
  return rep.ok ? 0 : 1;
}

int cmd_qc_report(const RunConfig& cfg, Output& out) {
  auto in = resolve_input(cfg);
  auto params = parse_params(cfg.params);
  QcFrameSpec spec = in.from_file ? parse_qc_spec(in.source, params) : catalog(cfg.catalog_name);
  auto reeb = reeb_check(spec);
  if (!reeb.ok) {
    std::string msg = "Reeb conditions fail";
    for (const auto& v : reeb.violations) msg += "; " + v;
    throw PreconditionError(msg);
  }
  auto rep = qc_report(spec);
  json r;
  r["provenance"] = provenance(cfg, in.label, in.source);
  r["algebra"] = spec.algebra().name();
  r["n"] = spec.n();
  r["s"] = rep.S.str();
  r["einstein"] = rep.einstein;
  r["wqc_zero"] = rep.w.is_zero;
  r["omega4_closed"] = rep.forms.omega4_closed;
  r["omegaQ_closed"] = rep.forms.omegaQ_closed;
  r["lemma_form_closed"] = rep.forms.lemma_closed;
  r["torsion_t0"] = {{"zero", rep.torsion.T0.is_zero()}, {"matrix", matrix_json(rep.torsion.T0)}};
  r["torsion_u"] = {{"zero", rep.torsion.U.is_zero()}, {"matrix", matrix_json(rep.torsion.U)}};
  json alpha = json::array();
  for (int s = 0; s < 3; ++s)
    alpha.push_back({{"affine_constant", rep.sp1.alpha_const[s].str()},
                     {"affine_s_coefficient", rep.sp1.alpha_s_coeff[s].str()},
                     {"value", rep.sp1.alpha[s].str()}});
  r["alpha"] = alpha;
  r["qscs_contracted"] = rep.qscs_contracted.str();
  r["qscs_ok"] = rep.qscs_ok;
  r["rho_proportional"] = rep.rho_proportional;
  r["vertical_mixing_zero"] = rep.vertical_mixing_zero;
  r["failures"] = rep.failures;
  r["ok"] = rep.failures.empty();
  out.report = r;

  out.line("algebra: " + spec.algebra().name() + " (n = " + std::to_string(spec.n()) + ")");
  out.line("S = " + rep.S.str());
  for (int s = 0; s < 3; ++s) out.line("alpha_" + std::to_string(s + 1) + " = " + rep.sp1.alpha[s].str());
  out.line(std::string("einstein: ") + (rep.einstein ? "true" : "false"));
  out.line(std::string("wqc_zero: ") + (rep.w.is_zero ? "true" : "false"));
  out.line(std::string("omega4_closed: ") + (rep.forms.omega4_closed ? "true" : "false"));
  out.line(std::string("omegaQ_closed: ") + (rep.forms.omegaQ_closed ? "true" : "false"));
  out.line(std::string("lemma_form_closed: ") + (rep.forms.lemma_closed ? "true" : "false"));
  out.line(std::string("torsion_t0 zero: ") + (rep.torsion.T0.is_zero() ? "true" : "false"));
  out.line(std::string("torsion_u zero: ") + (rep.torsion.U.is_zero() ? "true" : "false"));
  out.verdict("contracted curvature = 8n(n+2)S", rep.qscs_ok);
  for (const auto& f : rep.failures) out.line("invariant FAIL: " + f);
  out.verdict("invariants", rep.failures.empty());
  return rep.failures.empty() ? 0 : 1;
}

int cmd_build(const RunConfig& cfg, Output& out) {
  auto fam = make_family(cfg.family, parse_params(cfg.params));
  const StructureKind want = cfg.kind == "qk" ? StructureKind::QK : StructureKind::Spin7;
  if (fam.kind != want) throw PreconditionError("family " + cfg.family + " is not a " + cfg.kind + " family");
  auto rep = build(fam, cfg.samples, cfg.tol_rank);
  const bool spin7 = fam.kind == StructureKind::Spin7;

  json r;
  r["provenance"] = provenance(cfg, cfg.family, "family:" + cfg.family);
  r["family"] = fam.name;
  r["kind"] = cfg.kind;
  r["base"] = fam.base;
  r["S"] = fam.S.str();
  json params = json::object();
  for (const auto& [k, v] : fam.params) params[k] = v.str();
  r["parameters"] = params;
  r["functions"] = {{"f", fam.f.str()}, {"f1", fam.f1.str()}, {"f2", fam.f2.str()}, {"f3", fam.f3.str()}, {"gu", fam.gu.str()}};

  json checks = json::array();
  bool all = true;
  auto verdict = [&](const std::string& name, double value, double tol, bool upper) {
    bool ok = upper ? value <= tol : value > tol;
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", ok}});
    out.line(name + " = " + num(value) + " (tol " + num(tol) + ")" + (ok ? "  pass" : "  FAIL"));
    all = all && ok;
  };
  const bool closes = fam.name != "ideal-family";
  if (closes) verdict("closure_residual", rep.closure_residual, cfg.tol_residual, true);
  verdict("compatibility_residual", rep.compatibility_residual, cfg.tol_residual, true);
  verdict("cartan_residual", rep.cartan_residual, cfg.tol_residual, true);
  bool ideal_claimed = false;
  for (auto s : fam.systems) {
    verdict("ode_residual[" + ode_name(s) + "]", ode_residual(s, fam, cfg.samples), cfg.tol_residual, true);
    ideal_claimed = ideal_claimed || s == OdeSystem::Ideal;
  }
  if (ideal_claimed) verdict("ideal_residual", rep.ideal_residual, 1e-8, true);
  if (spin7) {
    verdict("cocalibration_residual", rep.cocalibration_residual, cfg.tol_residual, true);
    verdict("psi_identity_residual", rep.psi_identity_residual, cfg.tol_residual, true);
    verdict("ricci_max_abs", rep.ricci_max_abs, cfg.tol_ricci, true);
  } else if (fam.expected_einstein) {
    double scale = std::max(1.0, std::abs(*fam.expected_einstein));
    verdict("einstein_deviation", rep.einstein_deviation, cfg.tol_ricci * scale, true);
    verdict("ricci_const_error", std::abs(rep.einstein_constant - *fam.expected_einstein), cfg.tol_ricci * scale, true);
  }
  r["checks"] = checks;

  const bool closed = rep.closure_residual <= cfg.tol_residual;
  const bool einstein = rep.einstein_deviation <= cfg.tol_ricci * std::max(1.0, std::abs(rep.einstein_constant));
  r["closed"] = closed;
  r["einstein"] = einstein;
  r["ricci_const"] = rep.einstein_constant;
  if (fam.expected_einstein) r["expected_ricci_const"] = *fam.expected_einstein;
  r["curvature_rank"] = rep.curvature_rank;
  r["residuals"] = {{"closure", rep.closure_residual},          {"ideal", rep.ideal_residual},
                    {"cocalibration", rep.cocalibration_residual}, {"psi_identity", rep.psi_identity_residual},
                    {"compatibility", rep.compatibility_residual}, {"cartan", rep.cartan_residual},
                    {"einstein_deviation", rep.einstein_deviation}, {"ricci_max_abs", rep.ricci_max_abs}};
  json samples = json::array();
  for (const auto& s : rep.samples)
    samples.push_back({{"u", s.u},
                       {"closure_residual", s.closure_residual},
                       {"ideal_residual", s.ideal_residual},
                       {"einstein_constant", s.einstein_constant},
                       {"einstein_deviation", s.einstein_deviation},
                       {"ricci_max_abs", s.ricci_max_abs},
                       {"curvature_rank", s.curvature_rank}});
  r["samples"] = samples;
  r["ok"] = all;
  out.report = r;

  out.line("family: " + fam.name + " (base " + (fam.base.empty() ? "-" : fam.base) + ", S = " + fam.S.str() + ")");
  out.line("f = " + fam.f.str() + ", f1 = " + fam.f1.str() + ", f2 = " + fam.f2.str() + ", f3 = " + fam.f3.str() +
           ", gu = " + fam.gu.str());
  out.line(std::string("closed: ") + (closed ? "true" : "false"));
  out.line(std::string("einstein: ") + (einstein ? "true" : "false"));
  out.line("ricci_const = " + num(rep.einstein_constant));
  out.line("curvature_rank = " + std::to_string(rep.curvature_rank));
  out.verdict("build", all);
  return all ? 0 : 1;
}

json coefficient_json(const CoefficientCheck& c) {
  json j{{"label", c.label}, {"derived", c.derived.str()}, {"expected", c.expected.str()}, {"pass", c.matches()}};
  if (c.factor) j["factor"] = c.factor->str();
  return j;
}

int cmd_symbolic(const RunConfig& cfg, Output& out) {
  json r;
  r["provenance"] = provenance(cfg, cfg.target, "symbolic:" + cfg.target);
  r["target"] = cfg.target;
  json checks = json::array();
  bool all = true;
  auto add = [&](const std::string& name, bool ok, const std::string& detail = "") {
    checks.push_back({{"name", name}, {"pass", ok}, {"detail", detail}});
    out.line(name + (detail.empty() ? "" : ": " + detail) + (ok ? "  pass" : "  FAIL"));
    all = all && ok;
  };
  auto coeff = [&](const CoefficientCheck& c) {
    checks.push_back(coefficient_json(c));
    out.line(c.label + ": " + c.derived.str() + (c.matches() ? "  pass" : "  FAIL (expected multiple of " + c.expected.str() + ")"));
    all = all && c.matches();
  };
  const std::string& t = cfg.target;
  if (t == "closedqc") {
    auto res = verify_closedqc();
    add("d(omega1 eta2 eta3 + cyclic)", res.closed, res.d_lemma.is_zero() ? "0" : res.d_lemma.str());
  } else if (t == "qk-closure" || t == "spin7-closure") {
    const bool qk = t == "qk-closure";
    auto emit = [&](const auto& res, const std::string& h) {
      add("alpha-free", res.alpha_free);
      add("only omega^2 dt and omega eta eta dt terms", res.only_expected_monomials && res.cyclic);
      coeff(res.first);
      coeff(res.second);
      add("first coefficient vanishes at h = " + h, res.first_vanishes_at_h);
      out.line("at h = " + h + ": " + res.factored.str());
      coeff(res.factored_check);
      r["system"] = res.factored.str();
    };
    if (qk) {
      auto res = verify_qk_closure();
      emit(res, "f'/2");
      coeff(res.ideal_multiplier_check);
      coeff(res.ideal_omega_check);
      coeff(res.ideal_eta_check);
      add("ideal remainder has only omega dt and eta eta dt terms", res.ideal_remainder_clean);
      add("ideal remainder vanishes on solutions", res.ideal_vanishes_on_solution);
    } else {
      emit(verify_spin7_closure(), "f'/6");
    }
  } else if (t == "triaxial") {
    auto res = verify_triaxial_systems();
    add("QK closure alpha-free", res.qk_alpha_free);
    add("QK closure has only expected terms", res.qk_only_expected);
    coeff(res.qk_first_check);
    for (const auto& c : res.qk_second_check) coeff(c);
    add("Spin(7) closure alpha-free", res.spin7_alpha_free);
    add("Spin(7) closure has only expected terms", res.spin7_only_expected);
    coeff(res.spin7_first_check);
    for (const auto& c : res.spin7_second_check) coeff(c);
    for (int k = 0; k < 3; ++k) add("ideal remainder clean " + std::to_string(k + 1), res.ideal_remainder_clean[k]);
    for (const auto& c : res.ideal_vs_derived) coeff(c);
    for (const auto& c : res.ideal_vs_cubic_s0) coeff(c);
    for (const auto& c : res.ideal_vs_cubic) coeff(c);
  } else if (t == "hypo-evolution") {
    auto res = verify_hypo_evolution();
    add("alpha-free", res.alpha_free);
    add("only omega^2 and lemma-form terms", res.only_expected_monomials);
    coeff(res.a_vs_closure);
    coeff(res.b_vs_closure);
    add("vanishes on solutions", res.vanishes_on_solution);
  } else {
    throw UnknownName("unknown symbolic target " + t);
  }
  r["checks"] = checks;
  r["ok"] = all;
  out.report = r;
  out.verdict(t, all);
  return all ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg, Output& out) {
  AcceptanceTolerances tol;
  tol.closure = cfg.tol_residual;
  tol.ode = cfg.tol_residual;
  tol.ricci = cfg.tol_ricci;
  tol.rank = cfg.tol_rank;
  auto results = run_acceptance(tol);
  json r;
  r["provenance"] = provenance(cfg, "acceptance", "sweep");
  json crit = json::array();
  bool all = true;
  for (const auto& c : results) {
    json checks = json::array();
    out.line(format_criterion(c));
    for (const auto& k : c.checks) {
      checks.push_back({{"name", k.text}, {"pass", k.pass}});
      if (!k.pass) out.line("      FAIL " + k.text);
    }
    crit.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"checks", checks}});
    all = all && c.pass;
  }
  r["criteria"] = crit;
  r["ok"] = all;
  out.report = r;
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternionic contact structures and their QK / Spin(7) evolutions"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--tol-residual", cfg.tol_residual, "Residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-ricci", cfg.tol_ricci, "Ricci tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-rank", cfg.tol_rank, "Relative singular value cutoff for curvature rank")->check(CLI::PositiveNumber);
  app.fallthrough();

  auto input_opts = [&](CLI::App* sub) {
    sub->add_option("--catalog", cfg.catalog_name, "Catalog entry, e.g. l3 or heis(2)");
    sub->add_option("--file", cfg.file, "Algebra file");
    sub->add_option("--param", cfg.params, "Parameter override name=value")->take_all();
  };
  auto* check = app.add_subcommand("check-algebra", "Parse an algebra and check d^2 = 0");
  input_opts(check);
  auto* qc = app.add_subcommand("qc-report", "Run the qc verification pipeline");
  input_opts(qc);
  auto* bld = app.add_subcommand("build", "Build and check a QK or Spin(7) metric family");
  bld->add_option("kind", cfg.kind, "qk or spin7")->required()->check(CLI::IsMember({"qk", "spin7"}));
  bld->add_option("--family", cfg.family, "Family name")->required();
  bld->add_option("--param", cfg.params, "Parameter name=value")->take_all();
  bld->add_option("--samples", cfg.samples, "Sample points, comma separated")->delimiter(',');
  auto* sym = app.add_subcommand("symbolic", "Symbolic structure-equation checks");
  sym->add_option("target", cfg.target, "closedqc, qk-closure, spin7-closure, triaxial, hypo-evolution")->required();
  auto* sweep = app.add_subcommand("sweep", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Output out;
  int rc = 0;
  try {
    if (check->parsed()) cfg.command = "check-algebra", rc = cmd_check_algebra(cfg, out);
    else if (qc->parsed()) cfg.command = "qc-report", rc = cmd_qc_report(cfg, out);
    else if (bld->parsed()) cfg.command = "build", rc = cmd_build(cfg, out);
    else if (sym->parsed()) cfg.command = "symbolic", rc = cmd_symbolic(cfg, out);
    else if (sweep->parsed()) cfg.command = "sweep", rc = cmd_sweep(cfg, out);
  } catch (const Error& e) {
    rc = dynamic_cast<const ParseError*>(&e)          ? 2
         : dynamic_cast<const PreconditionError*>(&e) ? 3
         : dynamic_cast<const DomainError*>(&e)       ? 4
                                                      : 1;
    out.report = {{"error", {{"message", e.what()}, {"exit_code", rc}}}, {"ok", false}};
    out.lines = {std::string("error: ") + e.what()};
  }
  out.report["exit_code"] = rc;
  if (cfg.format == "json") {
    std::cout << out.report.dump(2) << "\n";
  } else {
    for (const auto& l : out.lines) std::cout << l << "\n";
  }
  if (rc >= 2 && cfg.format == "json") std::cerr << out.lines.front() << "\n";
  return rc;
}
