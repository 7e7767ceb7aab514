#pragma once

#include <string>
#include <vector>

namespace qcforge {

// Thresholds used by the acceptance suite. Exact checks have no tolerance.
struct AcceptanceTolerances {
  double closure = 1e-10;
  double ricci = 1e-8;
  double einstein_relative = 1e-8;
  double ode = 1e-10;
  double nonzero = 1e-3;      // "clearly fails" threshold for negative results
  double equal_axes = 1e-8;   // triaxial with a1 = a2 = a3
  double ideal_family = 1e-10;
  double property = 1e-12;
  double finite_difference = 1e-4;
  double rank = 1e-8;
};

struct AcceptanceCheck {
  std::string text;
  bool pass = false;
};

struct AcceptanceCriterion {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<AcceptanceCheck> checks;
  double seconds = 0;
};

// Runs criteria 1..14 (or only `only` when nonzero). Exceptions inside a criterion are caught and
// recorded as a failing check.
std::vector<AcceptanceCriterion> run_acceptance(const AcceptanceTolerances& tol = {}, int only = 0);

// "PASS  3  sp(1) connection forms" style line.
std::string format_criterion(const AcceptanceCriterion& c);

}  // namespace qcforge
