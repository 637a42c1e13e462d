#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hl/arith.hpp"
#include "hl/trace.hpp"

namespace hl {

struct DecideError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecProp;
using DecPropPtr = std::shared_ptr<const DecProp>;

// A decidable proposition: literal relations closed under connectives and
// literal-bounded universal quantification. `Noncomputable` marks an opaque
// proposition that is only classically decidable; decide() rejects it
// instead of assuming choice.
struct DecProp {
  enum class Kind { RelLit, BoundedForall, And, Or, Not, Implies, Noncomputable };

  Kind kind;
  TermPtr rel;        // RelLit: relation whose leaves are numerals or
                      // variables bound by an enclosing forall
  std::string var;    // BoundedForall
  TermPtr bound;      // BoundedForall: must be a numeral to be decidable
  std::vector<DecPropPtr> kids;

  static DecPropPtr rel_lit(TermPtr rel);
  static DecPropPtr forall_lt(std::string var, TermPtr bound, DecPropPtr body);
  static DecPropPtr conj(DecPropPtr a, DecPropPtr b);
  static DecPropPtr disj(DecPropPtr a, DecPropPtr b);
  static DecPropPtr negation(DecPropPtr a);
  static DecPropPtr implies(DecPropPtr a, DecPropPtr b);
  static DecPropPtr noncomputable(std::string label);
};

// Evaluation tree: one node per connective decision/instantiated leaf.
// Leaves carry the instantiated relation and its numeral-kernel trace, so
// the whole tree is independently checkable.
struct Evidence {
  std::string node;  // rel | and | or | not | implies | forall
  bool value = false;
  TermPtr rel;       // leaves: instantiated relation
  NumTrace num;      // leaves: kernel trace deciding it
  std::vector<Evidence> kids;  // connectives; forall: one per instance tried
};

struct DecideResult {
  bool value = false;
  Evidence evidence;
  ProofTrace trace;  // kind "decide", terminal literal_truth
};

// Decides p by evaluation, short-circuiting conjunction, disjunction,
// implication, and bounded quantifiers at the first decisive branch.
// Throws DecideError on noncomputable or non-literal-bounded parts.
DecideResult decide(const DecProp& p);

// if-then-else on a decidable condition; the proposition itself never
// appears in the result.
TermPtr ite_eval(const DecProp& p, const TermPtr& then_val,
                 const TermPtr& else_val);

// Encode the proposition as a prop-sorted term (for trace goals).
TermPtr dec_prop_term(const DecProp& p);

std::string evidence_json(const Evidence& e);
std::optional<Evidence> evidence_of_json(const std::string& text);

// Structural re-check: evidence must mirror the proposition, every leaf's
// kernel trace must verify and match its relation, every connective's value
// must follow from its children, and short-circuits must stop at a decisive
// child. Returns false with a reason on any mismatch.
bool check_evidence(const DecProp& p, const Evidence& e,
                    std::string* why = nullptr);

}  // namespace hl
