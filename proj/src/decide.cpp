#include "hl/decide.hpp"

#include <map>

#include <nlohmann/json.hpp>

namespace hl {

DecPropPtr DecProp::rel_lit(TermPtr rel) {
  auto p = std::make_shared<DecProp>();
  p->kind = Kind::RelLit;
  p->rel = std::move(rel);
  return p;
}

DecPropPtr DecProp::forall_lt(std::string var, TermPtr bound,
                              DecPropPtr body) {
  auto p = std::make_shared<DecProp>();
  p->kind = Kind::BoundedForall;
  p->var = std::move(var);
  p->bound = std::move(bound);
  p->kids = {std::move(body)};
  return p;
}

DecPropPtr DecProp::conj(DecPropPtr a, DecPropPtr b) {
  auto p = std::make_shared<DecProp>();
  p->kind = Kind::And;
  p->kids = {std::move(a), std::move(b)};
  return p;
}

DecPropPtr DecProp::disj(DecPropPtr a, DecPropPtr b) {
  auto p = std::make_shared<DecProp>();
  p->kind = Kind::Or;
  p->kids = {std::move(a), std::move(b)};
  return p;
}

DecPropPtr DecProp::negation(DecPropPtr a) {
  auto p = std::make_shared<DecProp>();
  p->kind = Kind::Not;
  p->kids = {std::move(a)};
  return p;
}

DecPropPtr DecProp::implies(DecPropPtr a, DecPropPtr b) {
  auto p = std::make_shared<DecProp>();
  p->kind = Kind::Implies;
  p->kids = {std::move(a), std::move(b)};
  return p;
}

DecPropPtr DecProp::noncomputable(std::string label) {
  auto p = std::make_shared<DecProp>();
  p->kind = Kind::Noncomputable;
  p->var = std::move(label);
  return p;
}

namespace {

using Env = std::map<std::string, mpz_class>;

TermPtr subst_term(const TermPtr& t, const Env& env) {
  switch (t->kind()) {
    case Term::Kind::Var: {
      auto it = env.find(t->symbol());
      if (it == env.end())
        throw DecideError("free variable '" + t->symbol() +
                          "' in a decidable leaf");
      return Term::numeral(it->second, t->sort());
    }
    case Term::Kind::Numeral:
      return t;
    case Term::Kind::Op: {
      std::vector<TermPtr> args;
      args.reserve(t->args().size());
      for (const auto& a : t->args()) args.push_back(subst_term(a, env));
      return Term::op(t->symbol(), std::move(args), t->sort());
    }
    case Term::Kind::Coerce:
      return Term::coerce(t->coerce_target(), subst_term(t->args()[0], env));
    case Term::Kind::Rel:
      return Term::rel(t->symbol(), subst_term(t->args()[0], env),
                       subst_term(t->args()[1], env));
  }
  throw DecideError("malformed term");
}

Evidence eval(const DecProp& p, Env& env) {
  Evidence e;
  switch (p.kind) {
    case DecProp::Kind::RelLit: {
      e.node = "rel";
      e.rel = subst_term(p.rel, env);
      NumProof pr;
      try {
        pr = norm_num_prove(e.rel);
      } catch (const ArithError& ex) {
        throw DecideError(std::string("undecidable leaf: ") + ex.what());
      }
      e.value = pr.proved;
      e.num = std::move(pr.trace);
      return e;
    }
    case DecProp::Kind::BoundedForall: {
      e.node = "forall";
      if (!p.bound->is_numeral())
        throw DecideError("quantifier bound is not a literal");
      mpz_class b = p.bound->value();
      e.value = true;
      for (mpz_class i = 0; i < b; ++i) {
        env[p.var] = i;
        Evidence inst = eval(*p.kids[0], env);
        bool ok = inst.value;
        e.kids.push_back(std::move(inst));
        if (!ok) {
          e.value = false;
          break;
        }
      }
      env.erase(p.var);
      return e;
    }
    case DecProp::Kind::And: {
      e.node = "and";
      Evidence a = eval(*p.kids[0], env);
      bool av = a.value;
      e.kids.push_back(std::move(a));
      if (!av) {
        e.value = false;
        return e;
      }
      Evidence b = eval(*p.kids[1], env);
      e.value = b.value;
      e.kids.push_back(std::move(b));
      return e;
    }
    case DecProp::Kind::Or: {
      e.node = "or";
      Evidence a = eval(*p.kids[0], env);
      bool av = a.value;
      e.kids.push_back(std::move(a));
      if (av) {
        e.value = true;
        return e;
      }
      Evidence b = eval(*p.kids[1], env);
      e.value = b.value;
      e.kids.push_back(std::move(b));
      return e;
    }
    case DecProp::Kind::Not: {
      e.node = "not";
      Evidence a = eval(*p.kids[0], env);
      e.value = !a.value;
      e.kids.push_back(std::move(a));
      return e;
    }
    case DecProp::Kind::Implies: {
      e.node = "implies";
      Evidence a = eval(*p.kids[0], env);
      bool av = a.value;
      e.kids.push_back(std::move(a));
      if (!av) {
        e.value = true;  // vacuous
        return e;
      }
      Evidence b = eval(*p.kids[1], env);
      e.value = b.value;
      e.kids.push_back(std::move(b));
      return e;
    }
    case DecProp::Kind::Noncomputable:
      throw DecideError("proposition '" + p.var +
                        "' has no decision procedure");
  }
  throw DecideError("malformed proposition");
}

}  // namespace

TermPtr dec_prop_term(const DecProp& p) {
  switch (p.kind) {
    case DecProp::Kind::RelLit:
      return p.rel;
    case DecProp::Kind::BoundedForall:
      return Term::op("forall_lt",
                      {Term::var(p.var, p.bound->sort()), p.bound,
                       dec_prop_term(*p.kids[0])},
                      Sort::prop());
    case DecProp::Kind::And:
      return Term::op(
          "and", {dec_prop_term(*p.kids[0]), dec_prop_term(*p.kids[1])},
          Sort::prop());
    case DecProp::Kind::Or:
      return Term::op(
          "or", {dec_prop_term(*p.kids[0]), dec_prop_term(*p.kids[1])},
          Sort::prop());
    case DecProp::Kind::Not:
      return Term::op("not", {dec_prop_term(*p.kids[0])}, Sort::prop());
    case DecProp::Kind::Implies:
      return Term::op(
          "implies", {dec_prop_term(*p.kids[0]), dec_prop_term(*p.kids[1])},
          Sort::prop());
    case DecProp::Kind::Noncomputable:
      return Term::op("opaque", {Term::var(p.var, Sort::prop())},
                      Sort::prop());
  }
  throw DecideError("malformed proposition");
}

DecideResult decide(const DecProp& p) {
  DecideResult out;
  Env env;
  out.evidence = eval(p, env);
  out.value = out.evidence.value;
  out.trace.kind = "decide";
  out.trace.goal = dec_prop_term(p);
  out.trace.terminal = "literal_truth";
  out.trace.payload = evidence_json(out.evidence);
  return out;
}

TermPtr ite_eval(const DecProp& p, const TermPtr& then_val,
                 const TermPtr& else_val) {
  return decide(p).value ? then_val : else_val;
}

// ---- JSON ----------------------------------------------------------------------

namespace {

using nlohmann::json;

json evidence_to_json(const Evidence& e) {
  json j{{"node", e.node}, {"value", e.value}};
  if (e.node == "rel") {
    j["rel"] = json::parse(term_json_str(e.rel));
    j["num"] = json::parse(num_trace_json(e.num));
  }
  if (!e.kids.empty()) {
    j["kids"] = json::array();
    for (const auto& k : e.kids) j["kids"].push_back(evidence_to_json(k));
  }
  return j;
}

Evidence evidence_from_json(const json& j) {
  Evidence e;
  e.node = j.at("node").get<std::string>();
  e.value = j.at("value").get<bool>();
  if (e.node == "rel") {
    e.rel = term_of_json_str(j.at("rel").dump());
    if (!e.rel) throw json::other_error::create(501, "bad term", nullptr);
    auto tr = num_trace_of_json(j.at("num").dump());
    if (!tr) throw json::other_error::create(501, "bad kernel", nullptr);
    e.num = std::move(*tr);
  }
  if (j.contains("kids"))
    for (const auto& k : j.at("kids")) e.kids.push_back(evidence_from_json(k));
  return e;
}

}  // namespace

std::string evidence_json(const Evidence& e) {
  return evidence_to_json(e).dump();
}

std::optional<Evidence> evidence_of_json(const std::string& text) {
  try {
    return evidence_from_json(json::parse(text));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// ---- checking ------------------------------------------------------------------

namespace {

bool check_rec(const DecProp& p, const Evidence& e, Env& env,
               std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  switch (p.kind) {
    case DecProp::Kind::RelLit: {
      if (e.node != "rel" || !e.kids.empty())
        return fail("leaf evidence shape mismatch");
      TermPtr expect;
      try {
        expect = subst_term(p.rel, env);
      } catch (const std::exception& ex) {
        return fail(ex.what());
      }
      if (!e.rel || !term_eq(e.rel, expect))
        return fail("instantiated relation mismatch");
      if (!check_num_goal(e.rel, e.num, why)) return false;
      if (e.num.rel_truth != e.value)
        return fail("leaf verdict contradicts its kernel");
      return true;
    }
    case DecProp::Kind::BoundedForall: {
      if (e.node != "forall") return fail("quantifier evidence shape mismatch");
      if (!p.bound->is_numeral())
        return fail("quantifier bound is not a literal");
      mpz_class b = p.bound->value();
      if (mpz_class(e.kids.size()) > b)
        return fail("more instances than the bound");
      for (std::size_t i = 0; i < e.kids.size(); ++i) {
        env[p.var] = mpz_class(i);
        bool ok = check_rec(*p.kids[0], e.kids[i], env, why);
        env.erase(p.var);
        if (!ok) return false;
        bool last = i + 1 == e.kids.size();
        if (!last && !e.kids[i].value)
          return fail("quantifier continued past a counterexample");
      }
      bool all = e.kids.empty() || e.kids.back().value;
      if (all && mpz_class(e.kids.size()) != b)
        return fail("quantifier stopped early without a counterexample");
      if (e.value != all) return fail("quantifier verdict mismatch");
      return true;
    }
    case DecProp::Kind::And:
    case DecProp::Kind::Or:
    case DecProp::Kind::Implies: {
      const char* want = p.kind == DecProp::Kind::And   ? "and"
                         : p.kind == DecProp::Kind::Or ? "or"
                                                        : "implies";
      if (e.node != want || e.kids.empty() || e.kids.size() > 2)
        return fail("connective evidence shape mismatch");
      if (!check_rec(*p.kids[0], e.kids[0], env, why)) return false;
      bool av = e.kids[0].value;
      // the left branch decides alone exactly when it short-circuits
      bool decisive = p.kind == DecProp::Kind::And ? !av
                      : p.kind == DecProp::Kind::Or ? av
                                                    : !av;
      if (decisive) {
        if (e.kids.size() != 1)
          return fail("connective evaluated past a decisive branch");
        bool v = p.kind == DecProp::Kind::Or      ? true
                 : p.kind == DecProp::Kind::And   ? false
                                                  : true;
        if (e.value != v) return fail("connective verdict mismatch");
        return true;
      }
      if (e.kids.size() != 2)
        return fail("connective missing its right branch");
      if (!check_rec(*p.kids[1], e.kids[1], env, why)) return false;
      if (e.value != e.kids[1].value)
        return fail("connective verdict mismatch");
      return true;
    }
    case DecProp::Kind::Not: {
      if (e.node != "not" || e.kids.size() != 1)
        return fail("negation evidence shape mismatch");
      if (!check_rec(*p.kids[0], e.kids[0], env, why)) return false;
      if (e.value != !e.kids[0].value)
        return fail("negation verdict mismatch");
      return true;
    }
    case DecProp::Kind::Noncomputable:
      return fail("no evidence can decide an opaque proposition");
  }
  return fail("malformed proposition");
}

}  // namespace

bool check_evidence(const DecProp& p, const Evidence& e, std::string* why) {
  Env env;
  return check_rec(p, e, env, why);
}

}  // namespace hl
