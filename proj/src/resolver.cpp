#include "hl/resolver.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace hl {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Failure: return "failure";
    case Outcome::DepthExceeded: return "depth_exceeded";
    case Outcome::CycleDetected: return "cycle_detected";
  }
  return "?";
}

bool match_carrier(const Carrier& pattern, const Carrier& ground,
                   CarrierSubst& subst) {
  switch (pattern.kind()) {
    case Carrier::Kind::Var: {
      auto it = subst.find(pattern.name());
      if (it != subst.end()) return it->second == ground;
      subst.emplace(pattern.name(), ground);
      return true;
    }
    case Carrier::Kind::Const:
      return ground.kind() == Carrier::Kind::Const &&
             ground.name() == pattern.name();
    case Carrier::Kind::Arrow:
      return ground.kind() == Carrier::Kind::Arrow &&
             match_carrier(pattern.domain(), ground.domain(), subst) &&
             match_carrier(pattern.codomain(), ground.codomain(), subst);
  }
  return false;
}

Carrier subst_carrier(const Carrier& pattern, const CarrierSubst& subst) {
  switch (pattern.kind()) {
    case Carrier::Kind::Var: {
      auto it = subst.find(pattern.name());
      if (it == subst.end()) return pattern;
      return it->second;
    }
    case Carrier::Kind::Const:
      return pattern;
    case Carrier::Kind::Arrow:
      return Carrier::arrow(subst_carrier(pattern.domain(), subst),
                            subst_carrier(pattern.codomain(), subst));
  }
  return pattern;
}

ClassAtom subst_atom(const ClassAtom& atom, const CarrierSubst& subst) {
  ClassAtom out{atom.cls, {}};
  out.args.reserve(atom.args.size());
  for (const auto& a : atom.args) out.args.push_back(subst_carrier(a, subst));
  return out;
}

namespace {

// Rules answering a class, sorted once: ascending priority, ties newest-first.
std::vector<const InstanceRule*> candidate_order(const Env& env,
                                                 const std::string& cls) {
  std::vector<const InstanceRule*> out;
  const auto& insts = env.instances();
  for (auto it = insts.rbegin(); it != insts.rend(); ++it)
    if (it->head.cls == cls) out.push_back(&*it);
  std::stable_sort(out.begin(), out.end(),
                   [](const InstanceRule* a, const InstanceRule* b) {
                     return a->priority < b->priority;
                   });
  return out;
}

struct BackwardSearch {
  const Env& env;
  SearchMetrics metrics;
  bool use_cache = false;
  int max_depth = 32;
  bool pruned_by_cycle = false;
  bool pruned_by_depth = false;
  std::vector<ClassAtom> path;
  // Cache entries: derivation when solved; nullopt when failed cleanly (only
  // stored if the failed subtree saw no cycle/depth pruning, otherwise the
  // failure is not reproducible at other depths/paths).
  std::map<ClassAtom, std::optional<Derivation>> cache;

  std::optional<Derivation> solve(const ClassAtom& goal, int depth) {
    metrics.max_depth_reached = std::max(metrics.max_depth_reached, depth);
    if (use_cache) {
      auto it = cache.find(goal);
      if (it != cache.end()) {
        ++metrics.cache_hits;
        return it->second;
      }
    }
    if (std::find(path.begin(), path.end(), goal) != path.end()) {
      pruned_by_cycle = true;
      return std::nullopt;
    }
    if (depth >= max_depth) {
      pruned_by_depth = true;
      return std::nullopt;
    }
    bool saw_prune_before = pruned_by_cycle || pruned_by_depth;
    bool subtree_pruned = false;
    path.push_back(goal);
    std::optional<Derivation> result;
    for (const InstanceRule* rule : candidate_order(env, goal.cls)) {
      CarrierSubst subst;
      if (rule->head.args.size() != goal.args.size()) continue;
      bool ok = true;
      for (std::size_t i = 0; i < goal.args.size() && ok; ++i)
        ok = match_carrier(rule->head.args[i], goal.args[i], subst);
      if (!ok) continue;
      ++metrics.nodes_expanded;
      bool before_cycle = pruned_by_cycle, before_depth = pruned_by_depth;
      pruned_by_cycle = pruned_by_depth = false;
      Derivation d{rule->name, subst, {}};
      bool all = true;
      for (const auto& sub : rule->body) {
        auto child = solve(subst_atom(sub, subst), depth + 1);
        if (!child) {
          all = false;
          break;
        }
        d.children.push_back(std::move(*child));
      }
      subtree_pruned |= pruned_by_cycle || pruned_by_depth;
      pruned_by_cycle |= before_cycle;
      pruned_by_depth |= before_depth;
      if (all) {
        result = std::move(d);
        break;
      }
    }
    path.pop_back();
    if (use_cache) {
      if (result)
        cache.emplace(goal, result);
      else if (!subtree_pruned)
        cache.emplace(goal, std::nullopt);
    }
    (void)saw_prune_before;
    return result;
  }
};

bool env_has_cycle(const Env& env);

}  // namespace

ResolveResult resolve_backward(const Query& q, const Env& env) {
  BackwardSearch s{env, {}, q.cache, q.max_depth, false, false, {}, {}};
  auto d = s.solve(q.atom, 0);
  s.metrics.outcome =
      d ? Outcome::Success
        : (s.pruned_by_depth
               ? Outcome::DepthExceeded
               : (s.pruned_by_cycle ? Outcome::CycleDetected
                                    : Outcome::Failure));
  return ResolveResult{std::move(d), s.metrics};
}

namespace {

// Cheap structural cycle check over unary class-to-class edges; mirrors the
// hierarchy module's graph but avoids a dependency loop.
bool env_has_cycle(const Env& env) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& inst : env.instances()) {
    if (inst.head.args.size() != 1) continue;
    for (const auto& b : inst.body) {
      if (b.args.size() != 1) continue;
      if (b.args[0] == inst.head.args[0]) adj[b.cls].push_back(inst.head.cls);
    }
  }
  std::map<std::string, int> color;  // 0 white 1 grey 2 black
  std::function<bool(const std::string&)> dfs = [&](const std::string& u) {
    color[u] = 1;
    for (const auto& v : adj[u]) {
      if (color[v] == 1) return true;
      if (color[v] == 0 && dfs(v)) return true;
    }
    color[u] = 2;
    return false;
  };
  for (const auto& [u, _] : adj)
    if (color[u] == 0 && dfs(u)) return true;
  return false;
}

}  // namespace

ResolveResult resolve_bidir(const Query& q, const Env& env) {
  SearchMetrics m;
  if (env_has_cycle(env)) {
    m.outcome = Outcome::CycleDetected;
    return ResolveResult{std::nullopt, m};
  }
  // Forward saturation from ground facts: semi-naive enough for these sizes.
  // Proved set maps each ground atom to the rule + children that derived it.
  struct Prov {
    const InstanceRule* rule;
    CarrierSubst subst;
    std::vector<ClassAtom> premises;
  };
  std::map<ClassAtom, Prov> proved;

  // Ground carrier universe: carriers of the query plus any ground carriers
  // appearing in instance heads/bodies (facts).
  std::set<Carrier> carriers;
  for (const auto& a : q.atom.args)
    if (a.is_ground()) carriers.insert(a);
  for (const auto& inst : env.instances()) {
    for (const auto& a : inst.head.args)
      if (a.is_ground()) carriers.insert(a);
    for (const auto& b : inst.body)
      for (const auto& a : b.args)
        if (a.is_ground()) carriers.insert(a);
  }

  // Enumerate substitutions of rule variables over the carrier universe.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& inst : env.instances()) {
      std::vector<std::string> vars;
      for (const auto& a : inst.head.args) a.collect_vars(vars);
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

      std::vector<Carrier> univ(carriers.begin(), carriers.end());
      std::vector<std::size_t> idx(vars.size(), 0);
      bool done = vars.empty() ? false : univ.empty();
      bool first = true;
      while (!done) {
        CarrierSubst subst;
        if (!vars.empty()) {
          if (!first) {
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == univ.size()) idx[i++] = 0;
            if (i == idx.size()) break;
          }
          for (std::size_t i = 0; i < vars.size(); ++i)
            subst.emplace(vars[i], univ[idx[i]]);
        } else if (!first) {
          break;
        }
        first = false;

        ClassAtom head = subst_atom(inst.head, subst);
        if (!head.ground() || proved.count(head)) continue;
        bool all = true;
        std::vector<ClassAtom> prem;
        for (const auto& b : inst.body) {
          ClassAtom g = subst_atom(b, subst);
          if (!g.ground() || !proved.count(g)) {
            all = false;
            break;
          }
          prem.push_back(std::move(g));
        }
        if (all) {
          ++m.nodes_expanded;
          proved.emplace(head, Prov{&inst, subst, std::move(prem)});
          changed = true;
        }
        if (vars.empty()) break;
      }
    }
  }

  auto it = proved.find(q.atom);
  if (it == proved.end()) {
    m.outcome = Outcome::Failure;
    return ResolveResult{std::nullopt, m};
  }
  std::function<Derivation(const ClassAtom&, int)> rebuild =
      [&](const ClassAtom& atom, int depth) {
        m.max_depth_reached = std::max(m.max_depth_reached, depth);
        const Prov& p = proved.at(atom);
        Derivation d{p.rule->name, p.subst, {}};
        for (const auto& prem : p.premises)
          d.children.push_back(rebuild(prem, depth + 1));
        return d;
      };
  Derivation d = rebuild(q.atom, 0);
  m.outcome = Outcome::Success;
  return ResolveResult{std::move(d), m};
}

ResolveResult resolve(const Query& q, const Env& env) {
  return q.strategy == Strategy::Bidir ? resolve_bidir(q, env)
                                       : resolve_backward(q, env);
}

namespace {

void check_node(const Derivation& d, const ClassAtom& goal, const Env& env,
                CheckResult& out) {
  const InstanceRule* rule = env.find_instance(d.rule);
  if (!rule) {
    out.ok = false;
    out.reasons.push_back("unknown instance rule: " + d.rule);
    return;
  }
  ClassAtom head = subst_atom(rule->head, d.substitution);
  if (!(head == goal)) {
    out.ok = false;
    out.reasons.push_back("rule " + d.rule + " head " + head.str() +
                          " does not prove goal " + goal.str());
  }
  if (d.children.size() != rule->body.size()) {
    out.ok = false;
    out.reasons.push_back("arity mismatch: rule " + d.rule + " expects " +
                          std::to_string(rule->body.size()) +
                          " subproofs, got " +
                          std::to_string(d.children.size()));
    return;
  }
  for (std::size_t i = 0; i < d.children.size(); ++i)
    check_node(d.children[i], subst_atom(rule->body[i], d.substitution), env,
               out);
}

}  // namespace

CheckResult check_derivation(const Derivation& d, const ClassAtom& goal,
                             const Env& env) {
  CheckResult out;
  check_node(d, goal, env, out);
  return out;
}

}  // namespace hl
