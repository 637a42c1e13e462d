#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hl/trace.hpp"

namespace hl {

struct ArithError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- polynomial normal forms ----------------------------------------------

struct HornerPoly;
using HornerPtr = std::shared_ptr<const HornerPoly>;

// const(c) | horner(base, var, exp, addend) = base * x_var^exp + addend.
// Canonical: base never const 0, exponents merged, variable indices strictly
// increase from the base outward along the spine.
struct HornerPoly {
  bool is_const = true;
  mpq_class constant;          // const node
  HornerPtr base;              // horner node
  int var = 0;
  int exp = 1;
  HornerPtr addend;

  static HornerPtr of_const(mpq_class c);
  static HornerPtr horner(HornerPtr base, int var, int exp, HornerPtr addend);
};

bool horner_eq(const HornerPtr& a, const HornerPtr& b);
std::string horner_str(const HornerPtr& p,
                       const std::vector<std::string>& atoms);
mpq_class horner_eval(const HornerPtr& p, const std::vector<mpq_class>& vals);

struct RingNormal {
  TermPtr canonical;               // sum-of-monomials term
  HornerPtr poly;                  // same polynomial, Horner form
  std::vector<std::string> atoms;  // index -> variable name
  ProofTrace trace;
};

// Normalize a (semi)ring expression over +, -, *, ^, neg, numerals and
// variables; each trace step applies one named ring axiom. semiring mode
// rejects subtraction and negation.
RingNormal ring_normalize(const TermPtr& t, bool semiring = false);

struct RingProof {
  bool equal = false;
  TermPtr lhs_canonical;
  TermPtr rhs_canonical;
  ProofTrace trace;  // meaningful when equal
};

RingProof ring_prove_eq(const TermPtr& lhs, const TermPtr& rhs,
                        bool semiring = false);

// ---- abelian-group normal form ---------------------------------------------

struct AbelForm {
  std::map<std::string, mpz_class> coeffs;  // atom -> nonzero coefficient
  mpz_class constant;
};

struct AbelNormal {
  TermPtr canonical;
  AbelForm form;
  ProofTrace trace;
};

// Normalize over +, -, neg and integer scalar multiples (lit *. atom).
AbelNormal abel_normalize(const TermPtr& t);

// ---- literal arithmetic (norm_num) ------------------------------------------

struct SignedVal {
  bool negative = false;  // never set when mag encodes zero
  Bits mag = Bits{false};
  mpz_class value() const {
    mpz_class v = mpz_of_bits(mag);
    return negative ? mpz_class(-v) : v;
  }
};

// One judgment of the numeral kernel: op(a[, b]) = result (or truth for
// comparisons), justified by a bit-level lemma over earlier judgments.
struct NumJudgment {
  std::string lemma;
  std::string op;  // add | succ | mul | sub | pow | lt | le | eq
  Bits a;
  Bits b;          // unused for succ
  Bits result;     // arithmetic ops
  bool truth = false;  // comparisons
  std::vector<std::size_t> premises;  // indices of earlier judgments
};

// One expression node evaluated: combines operand signs via a sign rule and
// cites kernel judgments for the magnitudes.
struct NumNodeStep {
  std::vector<int> position;
  std::string op;    // lit | add | sub | mul | pow | neg
  std::string rule;  // sign-case rule name
  SignedVal lhs, rhs, result;
  std::vector<std::size_t> premises;
};

struct NumTrace {
  std::vector<NumJudgment> judgments;
  std::vector<NumNodeStep> nodes;
  SignedVal result;
  // for norm_num_prove: the final comparison judgment / sign rule
  std::string rel_rule;
  std::vector<std::size_t> rel_premises;
  bool rel_truth = false;
};

struct NumResult {
  SignedVal value;
  NumTrace trace;
};

// Evaluate a literal-only expression by primitive numeral lemmas. Nat-sorted
// subtraction is truncated at zero. Throws ArithError (with the offending
// position) on non-literal subterms.
NumResult norm_num_eval(const TermPtr& e);

struct NumProof {
  bool proved = false;     // relation is true
  bool falsified = false;  // relation is literal and false
  SignedVal lhs, rhs;
  NumTrace trace;
  ProofTrace envelope;  // meaningful when proved
};

// Decide a relation (=, <, <=, !=) between literal expressions.
NumProof norm_num_prove(const TermPtr& rel);

// Structural check of a numeral kernel: every judgment must match its lemma
// schema bit-for-bit with premises already established. No bignum arithmetic.
bool check_num_trace(const NumTrace& tr, std::string* why = nullptr);

// Full check of a relation proof: the kernel verifies, the node steps mirror
// the relation term position by position, and the final sign-case comparison
// justifies rel_truth.
bool check_num_goal(const TermPtr& rel, const NumTrace& tr,
                    std::string* why = nullptr);

// Check a single ring/abel axiom step (before -> after at the root).
bool check_ring_axiom(const std::string& axiom, bool reversed,
                      const TermPtr& before, const TermPtr& after);

std::string num_trace_json(const NumTrace& tr);
std::optional<NumTrace> num_trace_of_json(const std::string& text);

}  // namespace hl
