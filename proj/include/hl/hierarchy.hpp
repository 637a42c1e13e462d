#pragma once

#include <string>
#include <vector>

#include "hl/decl.hpp"

namespace hl {

// Class-to-class edge C -> D: some instance derives D from C, both unary,
// over the identical carrier pattern. Matches the drawn shape of the
// hierarchy figure; binary classes do not participate.
struct ClassEdge {
  std::string from;
  std::string to;
  std::string via;  // instance name
};

std::vector<ClassEdge> class_edges(const Env& env);

struct CycleReport {
  bool acyclic = true;
  std::vector<std::vector<std::string>> cycles;  // elementary cycles
};

CycleReport check_acyclic(const Env& env);

struct Diamond {
  std::string from;
  std::string to;
  unsigned long long path_count = 0;  // >= 2
};

std::vector<Diamond> diamond_report(const Env& env);

struct HierarchyStats {
  std::size_t class_count = 0;
  std::size_t instance_count = 0;
  std::size_t unary_count = 0;
  std::size_t class_to_class_count = 0;  // instances of the form C a -> D a
  std::size_t max_out_degree = 0;
};

HierarchyStats stats(const Env& env);

struct PiInstance {
  InstanceRule instance;              // C(b -> a) <- C(a)
  std::vector<RewriteRule> def_rules; // pointwise projection definitions
};

struct PiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generalizes a unary class instance to function carriers:
// C(fn_domain -> base_arg) <- C(base_arg).
PiInstance pi_instance(const Env& env, const std::string& cls,
                       const Carrier& base_arg, const Carrier& fn_domain);

struct ReassocError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// From a lemma a >> b = d over an [assoc] operator, emits the companion
// simp rule a >> (b >> X) = d >> X.
RewriteRule reassoc(const Env& env, const Lemma& lemma);

// Benchmark hierarchy generators; both return .hl source text.
// Chain: c0 -> c1 -> ... -> cn.
std::string gen_chain(int n, bool with_fact);
// Ladder of n diamonds: rungs {u_i, v_i}, complete bipartite between
// consecutive rungs; 2n+2 classes.
std::string gen_diamond_ladder(int n, bool with_fact);

}  // namespace hl
