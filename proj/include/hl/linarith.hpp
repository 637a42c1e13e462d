#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hl/trace.hpp"

namespace hl {

struct LinarithError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LinRel { Lt, Le, Eq };

// A constraint "sum of coeff*var REL constant". Coefficient maps hold no
// zero entries.
struct LinConstraint {
  std::map<std::string, mpq_class> coeffs;
  mpq_class constant;
  LinRel rel = LinRel::Le;
};

struct LinearSystem {
  std::vector<LinConstraint> constraints;
  bool integer = false;  // variables range over int instead of rat
};

// Infeasibility witness: one multiplier per constraint. Inequality
// multipliers are nonnegative; equality multipliers may take any sign. The
// combination has all-zero variable coefficients and an absurd constant
// relation (0 < 0, 0 <= -1, or 0 = nonzero).
struct Certificate {
  std::vector<mpq_class> multipliers;
};

struct FmResult {
  bool feasible = false;
  Certificate certificate;                    // when infeasible
  std::map<std::string, mpq_class> witness;   // when feasible
};

// Decides a rational linear system by Fourier-Motzkin elimination.
// Equalities are substituted away first; variables are eliminated in
// ascending (strict-constraint-count, first-occurrence) order. Rejects
// systems with more than var_limit variables.
FmResult fm_decide(const LinearSystem& sys, int var_limit = 12);

bool check_cert(const Certificate& c, const LinearSystem& sys);

// Integer bound tightening: divides each constraint by the gcd of its
// coefficients, rounds the constant toward the feasible side, and turns
// strict bounds into non-strict ones. Preserves the integer solution set;
// output coefficients are coprime. Rejects non-integral coefficients.
LinearSystem int_tighten(const LinearSystem& sys);

struct LinarithResult {
  bool proved = false;
  // one certificate per refuted subgoal (two for equality goals)
  std::vector<Certificate> certificates;
  ProofTrace trace;  // meaningful when proved
};

// Refutation scheme: proves the goal iff hyps plus the negated goal are
// infeasible (after int_tighten in integer mode). Never returns a false
// proof; a feasible negation yields proved = false.
LinarithResult linarith_goal(const LinearSystem& hyps,
                             const LinConstraint& goal, int var_limit = 12);

std::string linear_system_json(const LinearSystem& sys);
std::optional<LinearSystem> linear_system_of_json(const std::string& text);

}  // namespace hl
