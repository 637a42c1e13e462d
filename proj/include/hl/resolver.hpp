#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hl/decl.hpp"

namespace hl {

enum class Strategy { Backward, Bidir };

enum class Outcome { Success, Failure, DepthExceeded, CycleDetected };

const char* outcome_name(Outcome o);

struct Query {
  ClassAtom atom;  // must be ground
  int max_depth = 32;
  Strategy strategy = Strategy::Backward;
  bool cache = false;
};

using CarrierSubst = std::map<std::string, Carrier>;

struct Derivation {
  std::string rule;  // instance name
  CarrierSubst substitution;
  std::vector<Derivation> children;  // one per body atom
};

struct SearchMetrics {
  std::size_t nodes_expanded = 0;
  std::size_t cache_hits = 0;
  int max_depth_reached = 0;
  Outcome outcome = Outcome::Failure;
};

struct ResolveResult {
  std::optional<Derivation> derivation;
  SearchMetrics metrics;
};

ResolveResult resolve_backward(const Query& q, const Env& env);
ResolveResult resolve_bidir(const Query& q, const Env& env);
ResolveResult resolve(const Query& q, const Env& env);

// First-order matching of a carrier pattern against a ground carrier.
bool match_carrier(const Carrier& pattern, const Carrier& ground,
                   CarrierSubst& subst);
Carrier subst_carrier(const Carrier& pattern, const CarrierSubst& subst);
ClassAtom subst_atom(const ClassAtom& atom, const CarrierSubst& subst);

struct CheckResult {
  bool ok = true;
  std::vector<std::string> reasons;
};

// Independent derivation checker; trusts only the declared instance rules.
CheckResult check_derivation(const Derivation& d, const ClassAtom& goal,
                             const Env& env);

}  // namespace hl
