#pragma once

#include <string>
#include <vector>

#include "hl/term.hpp"

namespace hl {

// One rewriting step inside a proof trace. `rule` names either a declared
// rewrite rule or a built-in axiom schema (ring/abel/cast); `reversed` marks
// right-to-left application of an equation.
struct ProofStep {
  std::string rule;
  bool reversed = false;
  std::vector<int> position;  // child-index path within the goal
  TermPtr before;
  TermPtr after;
};

// Uniform trace envelope shared by every tactic. Kind-specific payloads
// (numeral kernels, linear-arithmetic certificates, class-resolution
// derivations) are serialized into `payload` by the producing module; the
// verifier reads them back from there.
struct ProofTrace {
  int schema = 1;
  std::string kind;  // ring | abel | norm_num | norm_cast | simp | linarith |
                     // resolve | decide
  TermPtr goal;      // relation for prop goals, plain term for normalizations
  std::vector<ProofStep> steps;
  std::string terminal;  // reflexivity | literal_truth | certificate
  std::string payload;   // kind-specific JSON text ("" when not needed)
};

// Structured (lossless) JSON form of a term; of_json returns nullptr on any
// malformed input instead of throwing.
std::string term_json_str(const TermPtr& t);
TermPtr term_of_json_str(const std::string& text);

}  // namespace hl
