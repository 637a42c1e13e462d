#include "hl/rewriter.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "hl/resolver.hpp"

namespace hl {

bool match_term(const TermPtr& pattern, const TermPtr& term, TermSubst& subst) {
  switch (pattern->kind()) {
    case Term::Kind::Var: {
      auto it = subst.find(pattern->symbol());
      if (it != subst.end()) return term_eq(it->second, term);
      subst.emplace(pattern->symbol(), term);
      return true;
    }
    case Term::Kind::Numeral:
      return term->kind() == Term::Kind::Numeral &&
             pattern->bits() == term->bits();
    case Term::Kind::Coerce:
      return term->kind() == Term::Kind::Coerce &&
             match_term(pattern->args()[0], term->args()[0], subst);
    case Term::Kind::Op:
    case Term::Kind::Rel:
      if (term->kind() != pattern->kind() ||
          term->symbol() != pattern->symbol() ||
          term->args().size() != pattern->args().size())
        return false;
      for (std::size_t i = 0; i < pattern->args().size(); ++i)
        if (!match_term(pattern->args()[i], term->args()[i], subst))
          return false;
      return true;
  }
  return false;
}

TermPtr instantiate(const TermPtr& pattern, const TermSubst& subst,
                    const std::optional<Sort>& expected) {
  switch (pattern->kind()) {
    case Term::Kind::Var: {
      auto it = subst.find(pattern->symbol());
      if (it != subst.end()) return it->second;
      return pattern;  // callers enforce RHS vars <= LHS vars
    }
    case Term::Kind::Numeral:
      return Term::numeral(pattern->bits(),
                           expected.value_or(pattern->sort()));
    case Term::Kind::Coerce: {
      Sort target = expected.value_or(pattern->sort());
      TermPtr child = instantiate(pattern->args()[0], subst, std::nullopt);
      if (child->sort() == target) return child;  // cast collapsed away
      return Term::coerce(target, child);
    }
    case Term::Kind::Rel:
      return Term::rel(pattern->symbol(),
                       instantiate(pattern->args()[0], subst, std::nullopt),
                       instantiate(pattern->args()[1], subst, std::nullopt));
    case Term::Kind::Op: {
      const std::string& sym = pattern->symbol();
      std::vector<TermPtr> args;
      if (sym == "^") {
        args.push_back(instantiate(pattern->args()[0], subst, expected));
        args.push_back(
            instantiate(pattern->args()[1], subst, Sort::carrier("nat")));
        return Term::op(sym, std::move(args),
                        expected.value_or(args.empty() ? pattern->sort()
                                                       : args[0]->sort()));
      }
      if (sym == "app") {
        TermPtr fn = instantiate(pattern->args()[0], subst, std::nullopt);
        std::optional<Sort> dom, cod;
        if (fn->sort().is_arrow()) {
          dom = fn->sort().domain();
          cod = fn->sort().codomain();
        }
        TermPtr arg = instantiate(pattern->args()[1], subst, dom);
        Sort out = cod ? *cod : expected.value_or(pattern->sort());
        return Term::op(sym, {fn, arg}, out);
      }
      for (const auto& a : pattern->args())
        args.push_back(instantiate(a, subst, expected));
      Sort out = expected.value_or(args.empty() ? pattern->sort()
                                                : args[0]->sort());
      return Term::op(sym, std::move(args), out);
    }
  }
  return pattern;
}

namespace {

bool conditions_hold(const RewriteRule& rule, const TermSubst& subst,
                     const Env& env) {
  for (const auto& cond : rule.conditions) {
    ClassAtom ground{cond.cls, {}};
    for (const auto& arg : cond.args) {
      if (arg.kind() == Carrier::Kind::Var) {
        auto it = subst.find(arg.name());
        if (it == subst.end()) return false;
        ground.args.push_back(Carrier::of_sort(it->second->sort()));
      } else {
        ground.args.push_back(arg);
      }
    }
    Query q;
    q.atom = std::move(ground);
    q.max_depth = 8;
    if (!resolve_backward(q, env).derivation) return false;
  }
  return true;
}

struct Rewriter {
  const std::vector<const RewriteRule*>& rules;
  const Env& env;
  int fuel;
  RewriteTrace trace;

  bool spent() const { return fuel <= 0; }

  // Normalize t at `path`; innermost-leftmost, restarting at the changed
  // position after each step.
  TermPtr norm(TermPtr t, std::vector<int>& path) {
    for (;;) {
      if (spent()) return t;
      // children first, left to right
      if (!t->args().empty() && t->kind() != Term::Kind::Var) {
        std::vector<TermPtr> args = t->args();
        bool changed = false;
        for (std::size_t i = 0; i < args.size(); ++i) {
          path.push_back(static_cast<int>(i));
          TermPtr ni = norm(args[i], path);
          path.pop_back();
          if (!term_eq(ni, args[i])) {
            args[i] = ni;
            changed = true;
          }
        }
        if (changed) t = rebuild(t, std::move(args));
      }
      if (spent()) return t;
      bool fired = false;
      for (const RewriteRule* rule : rules) {
        TermSubst subst;
        if (!match_term(rule->lhs, t, subst)) continue;
        if (!conditions_hold(*rule, subst, env)) continue;
        TermPtr after = instantiate(rule->rhs, subst, t->sort());
        if (term_eq(after, t)) continue;  // no-op step, skip to avoid loops
        --fuel;
        trace.steps.push_back({rule->name, path, subst, t, after});
        t = after;
        fired = true;
        break;
      }
      if (!fired) return t;
    }
  }

  static TermPtr rebuild(const TermPtr& t, std::vector<TermPtr> args) {
    switch (t->kind()) {
      case Term::Kind::Op:
        return Term::op(t->symbol(), std::move(args), t->sort());
      case Term::Kind::Rel:
        return Term::rel(t->symbol(), args[0], args[1]);
      case Term::Kind::Coerce:
        if (args[0]->sort() == t->coerce_target()) return args[0];
        return Term::coerce(t->coerce_target(), args[0]);
      default:
        return t;
    }
  }
};

}  // namespace

SimpResult simp(const TermPtr& t, const std::vector<const RewriteRule*>& rules,
                const Env& env, int fuel) {
  Rewriter rw{rules, env, fuel, {}};
  std::vector<int> path;
  TermPtr out = rw.norm(t, path);
  if (rw.spent()) {
    rw.trace.fuel_exhausted = true;
    std::set<std::string> recent;
    std::size_t n = rw.trace.steps.size();
    for (std::size_t i = n > 20 ? n - 20 : 0; i < n; ++i)
      recent.insert(rw.trace.steps[i].rule);
    rw.trace.loop_candidates.assign(recent.begin(), recent.end());
  }
  return SimpResult{out, std::move(rw.trace)};
}

SimpResult simp(const TermPtr& t, const Env& env, int fuel) {
  std::vector<const RewriteRule*> rules = env.rules_of_kind(RuleKind::Simp);
  for (const RewriteRule* r : env.rules_of_kind(RuleKind::Def))
    rules.push_back(r);
  return simp(t, rules, env, fuel);
}

TermPtr dsimp(const TermPtr& t, const Env& env, int fuel) {
  return simp(t, env.rules_of_kind(RuleKind::Def), env, fuel).term;
}

namespace {

// Retype a bare numeral opposite a cast so a cast_elim rule can fire:
// rel(^^x, n) becomes rel(^^x, ^^n') with n' the numeral at the cast source.
TermPtr retype_literal(const TermPtr& rel, const Env& env, RewriteTrace& trace) {
  if (rel->kind() != Term::Kind::Rel) return rel;
  const TermPtr& a = rel->args()[0];
  const TermPtr& b = rel->args()[1];
  for (int side = 0; side < 2; ++side) {
    const TermPtr& cast = side == 0 ? a : b;
    const TermPtr& lit = side == 0 ? b : a;
    if (cast->kind() != Term::Kind::Coerce || !lit->is_numeral()) continue;
    Sort src = cast->coerce_source();
    if (!src.is_carrier() || !lit->sort().is_carrier()) continue;
    if (!env.has_coe(src.name(), lit->sort().name())) continue;
    TermPtr inner = Term::numeral(lit->bits(), src);
    TermPtr lifted = Term::coerce(lit->sort(), inner);
    TermPtr after =
        side == 0 ? Term::rel(rel->symbol(), a, lifted)
                  : Term::rel(rel->symbol(), lifted, b);
    trace.steps.push_back({"cast_literal",
                           {side == 0 ? 1 : 0},
                           {},
                           lit,
                           lifted});
    return after;
  }
  return rel;
}

}  // namespace

SimpResult norm_cast(const TermPtr& rel, const Env& env, int fuel) {
  std::vector<const RewriteRule*> move = env.rules_of_kind(RuleKind::CastMove);
  std::vector<const RewriteRule*> elim = env.rules_of_kind(RuleKind::CastElim);
  TermPtr t = rel;
  RewriteTrace trace;
  for (;;) {
    SimpResult moved = simp(t, move, env, fuel);
    fuel -= static_cast<int>(moved.trace.steps.size());
    for (auto& s : moved.trace.steps) trace.steps.push_back(std::move(s));
    t = moved.term;
    TermPtr retyped = retype_literal(t, env, trace);
    SimpResult stripped = simp(retyped, elim, env, fuel);
    fuel -= static_cast<int>(stripped.trace.steps.size());
    for (auto& s : stripped.trace.steps) trace.steps.push_back(std::move(s));
    bool progressed = !term_eq(stripped.term, t) || !term_eq(retyped, t);
    t = stripped.term;
    if (!progressed || fuel <= 0) {
      trace.fuel_exhausted = fuel <= 0 && progressed;
      break;
    }
  }
  return SimpResult{t, std::move(trace)};
}

OrientResult orient_check(const RewriteRule& r) {
  if (!r.lhs || !r.rhs) return {false, "rule has no equation"};
  if (r.lhs->is_var())
    return {false, "bare-variable LHS matches every term"};
  std::vector<std::string> lhs_vars, rhs_vars, cond_vars;
  std::function<void(const TermPtr&, std::vector<std::string>&)> collect =
      [&](const TermPtr& t, std::vector<std::string>& out) {
        if (t->is_var()) out.push_back(t->symbol());
        for (const auto& a : t->args()) collect(a, out);
      };
  collect(r.lhs, lhs_vars);
  collect(r.rhs, rhs_vars);
  std::sort(lhs_vars.begin(), lhs_vars.end());
  for (const auto& v : rhs_vars)
    if (!std::binary_search(lhs_vars.begin(), lhs_vars.end(), v))
      return {false, "fresh variable on RHS: " + v};
  for (const auto& cond : r.conditions) {
    std::vector<std::string> vars;
    for (const auto& arg : cond.args) arg.collect_vars(vars);
    for (const auto& v : vars)
      if (!std::binary_search(lhs_vars.begin(), lhs_vars.end(), v))
        return {false, "condition variable not bound by LHS: " + v};
  }
  return {true, ""};
}

namespace {

TermPtr replace_at(const TermPtr& t, const std::vector<int>& path,
                   std::size_t depth, const TermPtr& replacement,
                   const TermPtr& expect_before, bool& ok) {
  if (depth == path.size()) {
    if (!term_eq(t, expect_before)) {
      ok = false;
      return t;
    }
    return replacement;
  }
  int i = path[depth];
  if (i < 0 || static_cast<std::size_t>(i) >= t->args().size()) {
    ok = false;
    return t;
  }
  std::vector<TermPtr> args = t->args();
  args[static_cast<std::size_t>(i)] = replace_at(
      args[static_cast<std::size_t>(i)], path, depth + 1, replacement,
      expect_before, ok);
  if (!ok) return t;
  switch (t->kind()) {
    case Term::Kind::Op:
      return Term::op(t->symbol(), std::move(args), t->sort());
    case Term::Kind::Rel:
      return Term::rel(t->symbol(), args[0], args[1]);
    case Term::Kind::Coerce:
      return args[0]->sort() == t->coerce_target()
                 ? args[0]
                 : Term::coerce(t->coerce_target(), args[0]);
    default:
      ok = false;
      return t;
  }
}

}  // namespace

std::optional<TermPtr> replay_trace(const TermPtr& input,
                                    const RewriteTrace& trace,
                                    std::string* why) {
  TermPtr t = input;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const RewriteStep& s = trace.steps[i];
    bool ok = true;
    t = replace_at(t, s.position, 0, s.after, s.before, ok);
    if (!ok) {
      if (why)
        *why = "step " + std::to_string(i) + " (" + s.rule +
               ") does not apply at its recorded position";
      return std::nullopt;
    }
  }
  return t;
}

}  // namespace hl
