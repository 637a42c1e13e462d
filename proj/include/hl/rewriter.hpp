#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hl/decl.hpp"

namespace hl {

using TermSubst = std::map<std::string, TermPtr>;

struct RewriteStep {
  std::string rule;
  std::vector<int> position;  // child-index path from the root
  TermSubst substitution;
  TermPtr before;  // subterm at position prior to the step
  TermPtr after;   // its replacement
};

struct RewriteTrace {
  std::vector<RewriteStep> steps;
  bool fuel_exhausted = false;
  std::vector<std::string> loop_candidates;  // rules active when fuel ran out
};

struct SimpResult {
  TermPtr term;
  RewriteTrace trace;
};

// Sort-oblivious first-order matching: symbols and shape must agree, sorts
// are ignored (they are re-derived on instantiation).
bool match_term(const TermPtr& pattern, const TermPtr& term, TermSubst& subst);

// Instantiate a rule RHS under a substitution, re-sorting top-down so the
// result lives at `expected` (the sort of the subterm being replaced).
TermPtr instantiate(const TermPtr& pattern, const TermSubst& subst,
                    const std::optional<Sort>& expected);

// Innermost-leftmost exhaustive rewriting with the given rules. Conditional
// rules fire only when every class condition resolves (backward, depth 8).
SimpResult simp(const TermPtr& t, const std::vector<const RewriteRule*>& rules,
                const Env& env, int fuel = 10000);
// Convenience: all env rules of kind simp and def.
SimpResult simp(const TermPtr& t, const Env& env, int fuel = 10000);

// Definitional reduction only (kind-def rules).
TermPtr dsimp(const TermPtr& t, const Env& env, int fuel = 10000);

// Coercion normalization on a relation: push casts toward the root with
// cast_move rules, retype literals across declared coercions, and strip
// matching casts from the relation with cast_elim rules.
SimpResult norm_cast(const TermPtr& rel, const Env& env, int fuel = 10000);

struct OrientResult {
  bool ok = true;
  std::string reason;
};

// Stand-alone check of the rewrite-rule shape invariants.
OrientResult orient_check(const RewriteRule& r);

// Replay a trace against its input; returns the final term or nullopt with
// a reason when some step does not apply as recorded.
std::optional<TermPtr> replay_trace(const TermPtr& input,
                                    const RewriteTrace& trace,
                                    std::string* why = nullptr);

}  // namespace hl
