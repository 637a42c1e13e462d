#include "hl/linarith.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "hl/term.hpp"

namespace hl {

namespace {

// working row: constraint plus its provenance as a combination of originals
struct Row {
  std::map<std::string, mpq_class> coeffs;
  mpq_class constant;
  LinRel rel;
  std::vector<mpq_class> mult;
};

void add_scaled(std::map<std::string, mpq_class>& into,
                const std::map<std::string, mpq_class>& from,
                const mpq_class& k) {
  for (const auto& [v, c] : from) {
    into[v] += k * c;
    if (into[v] == 0) into.erase(v);
  }
}

void add_scaled(std::vector<mpq_class>& into, const std::vector<mpq_class>& from,
                const mpq_class& k) {
  for (std::size_t i = 0; i < from.size(); ++i) into[i] += k * from[i];
}

// constant row "0 rel constant": true when violated
bool absurd(LinRel rel, const mpq_class& c) {
  switch (rel) {
    case LinRel::Lt:
      return c <= 0;
    case LinRel::Le:
      return c < 0;
    default:
      return c != 0;
  }
}

std::optional<Certificate> constant_violation(const std::vector<Row>& rows) {
  for (const auto& r : rows)
    if (r.coeffs.empty() && absurd(r.rel, r.constant))
      return Certificate{r.mult};
  return std::nullopt;
}

std::vector<std::string> collect_vars(const LinearSystem& sys) {
  std::vector<std::string> vars;
  std::set<std::string> seen;
  for (const auto& c : sys.constraints)
    for (const auto& [v, k] : c.coeffs)
      if (seen.insert(v).second) vars.push_back(v);
  return vars;
}

}  // namespace

FmResult fm_decide(const LinearSystem& sys, int var_limit) {
  std::vector<std::string> vars = collect_vars(sys);
  if (static_cast<int>(vars.size()) > var_limit)
    throw LinarithError("system has " + std::to_string(vars.size()) +
                        " variables, over the limit of " +
                        std::to_string(var_limit));

  std::size_t n = sys.constraints.size();
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const LinConstraint& c = sys.constraints[i];
    Row r{c.coeffs, c.constant, c.rel, std::vector<mpq_class>(n, 0)};
    r.mult[i] = 1;
    rows.push_back(std::move(r));
  }

  // substitute equalities away first; remember them for the witness
  struct EqSub {
    std::string var;
    Row row;  // eq row: coeffs . x = constant, solved for `var`
  };
  std::vector<EqSub> eq_subs;
  for (;;) {
    auto it = std::find_if(rows.begin(), rows.end(), [](const Row& r) {
      return r.rel == LinRel::Eq && !r.coeffs.empty();
    });
    if (it == rows.end()) break;
    Row eq = *it;
    rows.erase(it);
    const auto& [v, a] = *eq.coeffs.begin();
    std::string var = v;
    mpq_class av = a;
    for (Row& r : rows) {
      auto f = r.coeffs.find(var);
      if (f == r.coeffs.end()) continue;
      mpq_class k = -f->second / av;
      add_scaled(r.coeffs, eq.coeffs, k);
      r.constant += k * eq.constant;
      add_scaled(r.mult, eq.mult, k);
    }
    eq_subs.push_back({var, std::move(eq)});
  }

  if (auto cert = constant_violation(rows))
    return {false, std::move(*cert), {}};

  // remaining variables, eliminated in ascending
  // (strict-constraint-count, first-occurrence) order
  std::vector<std::string> elim;
  {
    std::set<std::string> remaining;
    for (const auto& r : rows)
      for (const auto& [v, k] : r.coeffs) remaining.insert(v);
    std::vector<std::pair<int, std::string>> keyed;
    for (const auto& v : vars) {
      if (!remaining.count(v)) continue;
      int strict = 0;
      for (const auto& r : rows)
        if (r.rel == LinRel::Lt && r.coeffs.count(v)) ++strict;
      keyed.emplace_back(strict, v);
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    for (auto& [s, v] : keyed) elim.push_back(v);
  }

  // bounds seen per eliminated variable, for back-substitution
  struct VarBounds {
    std::string var;
    std::vector<Row> touching;  // rows mentioning the variable
  };
  std::vector<VarBounds> history;

  for (const auto& v : elim) {
    std::vector<Row> pos, neg, rest;
    for (Row& r : rows) {
      auto f = r.coeffs.find(v);
      if (f == r.coeffs.end())
        rest.push_back(std::move(r));
      else if (f->second > 0)
        pos.push_back(std::move(r));
      else
        neg.push_back(std::move(r));
    }
    VarBounds vb{v, {}};
    for (const auto& r : pos) vb.touching.push_back(r);
    for (const auto& r : neg) vb.touching.push_back(r);
    history.push_back(std::move(vb));

    for (const Row& p : pos)
      for (const Row& q : neg) {
        mpq_class a = p.coeffs.at(v);        // > 0
        mpq_class b = -q.coeffs.at(v);       // > 0
        Row combo;
        combo.rel = (p.rel == LinRel::Lt || q.rel == LinRel::Lt) ? LinRel::Lt
                                                                 : LinRel::Le;
        combo.mult.assign(n, 0);
        add_scaled(combo.coeffs, p.coeffs, 1 / a);
        add_scaled(combo.coeffs, q.coeffs, 1 / b);
        combo.constant = p.constant / a + q.constant / b;
        add_scaled(combo.mult, p.mult, 1 / a);
        add_scaled(combo.mult, q.mult, 1 / b);
        rest.push_back(std::move(combo));
      }
    rows = std::move(rest);
    if (auto cert = constant_violation(rows))
      return {false, std::move(*cert), {}};
  }

  // feasible: rebuild a witness back-to-front
  FmResult out;
  out.feasible = true;
  auto eval_side = [&](const Row& r, const std::string& skip) {
    mpq_class s = 0;
    for (const auto& [v, k] : r.coeffs)
      if (v != skip) s += k * out.witness.at(v);
    return s;
  };
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    std::optional<mpq_class> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const Row& r : it->touching) {
      mpq_class a = r.coeffs.at(it->var);
      mpq_class bound = (r.constant - eval_side(r, it->var)) / a;
      if (a > 0) {  // upper bound
        if (!hi || bound < *hi || (bound == *hi && r.rel == LinRel::Lt)) {
          hi = bound;
          hi_strict = r.rel == LinRel::Lt;
        }
      } else {
        if (!lo || bound > *lo || (bound == *lo && r.rel == LinRel::Lt)) {
          lo = bound;
          lo_strict = r.rel == LinRel::Lt;
        }
      }
    }
    mpq_class val;
    if (lo && hi)
      val = (lo_strict || hi_strict) ? mpq_class((*lo + *hi) / 2) : *hi;
    else if (hi)
      val = hi_strict ? mpq_class(*hi - 1) : *hi;
    else if (lo)
      val = lo_strict ? mpq_class(*lo + 1) : *lo;
    else
      val = 0;
    out.witness[it->var] = val;
  }
  // unconstrained variables default to 0 (before equality back-substitution,
  // whose rows may reference them)
  {
    std::set<std::string> eq_vars;
    for (const auto& e : eq_subs) eq_vars.insert(e.var);
    for (const auto& v : vars)
      if (!out.witness.count(v) && !eq_vars.count(v)) out.witness[v] = 0;
  }
  // equality-substituted variables, most recent first
  for (auto it = eq_subs.rbegin(); it != eq_subs.rend(); ++it) {
    const Row& eq = it->row;
    mpq_class a = eq.coeffs.at(it->var);
    out.witness[it->var] = (eq.constant - eval_side(eq, it->var)) / a;
  }
  return out;
}

bool check_cert(const Certificate& c, const LinearSystem& sys) {
  if (c.multipliers.size() != sys.constraints.size()) return false;
  std::map<std::string, mpq_class> combined;
  mpq_class constant = 0;
  bool any = false, strict = false, only_eq = true;
  for (std::size_t i = 0; i < sys.constraints.size(); ++i) {
    const mpq_class& m = c.multipliers[i];
    if (m == 0) continue;
    const LinConstraint& cn = sys.constraints[i];
    if (cn.rel != LinRel::Eq) {
      if (m < 0) return false;  // inequality multipliers must be nonnegative
      only_eq = false;
      if (cn.rel == LinRel::Lt) strict = true;
    }
    any = true;
    add_scaled(combined, cn.coeffs, m);
    constant += m * cn.constant;
  }
  if (!any || !combined.empty()) return false;
  LinRel rel = only_eq ? LinRel::Eq : strict ? LinRel::Lt : LinRel::Le;
  return absurd(rel, constant);
}

namespace {

mpz_class floor_q(const mpq_class& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

}  // namespace

LinearSystem int_tighten(const LinearSystem& sys) {
  LinearSystem out;
  out.integer = true;
  for (const LinConstraint& c : sys.constraints) {
    mpz_class g = 0;
    for (const auto& [v, k] : c.coeffs) {
      if (k.get_den() != 1)
        throw LinarithError("non-integral coefficient on '" + v + "'");
      mpz_class num = k.get_num();
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
    }
    LinConstraint t = c;
    if (c.coeffs.empty()) {
      // constant constraint: normalize strictness only
      if (c.rel == LinRel::Lt) {
        t.rel = LinRel::Le;
        mpq_class b = c.constant;
        t.constant = b.get_den() == 1 ? mpq_class(b - 1) : mpq_class(floor_q(b));
      }
      out.constraints.push_back(std::move(t));
      continue;
    }
    mpq_class scaled = c.constant / mpq_class(g);
    for (auto& [v, k] : t.coeffs) k /= mpq_class(g);
    switch (c.rel) {
      case LinRel::Le:
        t.constant = floor_q(scaled);
        break;
      case LinRel::Lt:
        t.rel = LinRel::Le;
        t.constant = scaled.get_den() == 1 ? mpq_class(scaled - 1)
                                           : mpq_class(floor_q(scaled));
        break;
      case LinRel::Eq:
        if (scaled.get_den() != 1) {
          // no integer solution: replace by an absurd constant constraint
          t.coeffs.clear();
          t.rel = LinRel::Le;
          t.constant = -1;
        } else {
          t.constant = scaled;
        }
        break;
    }
    out.constraints.push_back(std::move(t));
  }
  return out;
}

namespace {

// display form of a constraint as a Rel term (coefficients scaled integral)
TermPtr constraint_term(const LinConstraint& c, const Sort& sort) {
  mpz_class lcm = 1;
  for (const auto& [v, k] : c.coeffs)
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), k.get_den_mpz_t());
  mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.constant.get_den_mpz_t());
  auto scaled_term = [&](const mpq_class& k, const TermPtr& var) -> TermPtr {
    mpq_class s = k * mpq_class(lcm);
    mpz_class mag = s.get_num() < 0 ? mpz_class(-s.get_num()) : s.get_num();
    TermPtr t = var;
    if (!t) {
      t = Term::numeral(mag, sort);
    } else if (mag != 1) {
      t = Term::op("*", {Term::numeral(mag, sort), t}, sort);
    }
    if (s < 0) t = Term::op("neg", {t}, sort);
    return t;
  };
  TermPtr lhs;
  for (const auto& [v, k] : c.coeffs) {
    TermPtr piece = scaled_term(k, Term::var(v, sort));
    lhs = lhs ? Term::op("+", {lhs, piece}, sort) : piece;
  }
  if (!lhs) lhs = Term::numeral(mpz_class(0), sort);
  TermPtr rhs = scaled_term(c.constant, nullptr);
  const char* rel =
      c.rel == LinRel::Lt ? "<" : c.rel == LinRel::Le ? "<=" : "=";
  return Term::rel(rel, lhs, rhs);
}

LinConstraint negate(const LinConstraint& goal) {
  LinConstraint neg;
  for (const auto& [v, k] : goal.coeffs) neg.coeffs[v] = -k;
  neg.constant = -goal.constant;
  // not(e < c)  ==  -e <= -c;  not(e <= c)  ==  -e < -c
  neg.rel = goal.rel == LinRel::Lt ? LinRel::Le : LinRel::Lt;
  return neg;
}

const char* rel_name(LinRel r) {
  return r == LinRel::Lt ? "lt" : r == LinRel::Le ? "le" : "eq";
}

nlohmann::json system_to_json(const LinearSystem& sys) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : sys.constraints) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (const auto& [v, k] : c.coeffs) coeffs[v] = k.get_str();
    cs.push_back(nlohmann::json{{"coeffs", std::move(coeffs)},
                                {"constant", c.constant.get_str()},
                                {"rel", rel_name(c.rel)}});
  }
  return nlohmann::json{{"constraints", std::move(cs)},
                        {"integer", sys.integer}};
}

}  // namespace

LinarithResult linarith_goal(const LinearSystem& hyps,
                             const LinConstraint& goal, int var_limit) {
  // refute each negated subgoal; equality goals split into two inequalities
  std::vector<LinConstraint> negs;
  if (goal.rel == LinRel::Eq) {
    LinConstraint lt = goal, gt = goal;
    lt.rel = LinRel::Le;  // e <= c
    gt.rel = LinRel::Le;  // e >= c, i.e. -e <= -c
    for (auto& [v, k] : gt.coeffs) k = -k;
    gt.constant = -gt.constant;
    negs.push_back(negate(lt));
    negs.push_back(negate(gt));
  } else {
    negs.push_back(negate(goal));
  }

  LinarithResult out;
  nlohmann::json payload;
  payload["hypotheses"] = system_to_json(hyps);
  payload["subgoals"] = nlohmann::json::array();
  for (const LinConstraint& neg : negs) {
    LinearSystem refute = hyps;
    refute.constraints.push_back(neg);
    LinearSystem solved = hyps.integer ? int_tighten(refute) : refute;
    FmResult fm = fm_decide(solved, var_limit);
    if (fm.feasible) return {};  // goal not entailed
    if (!check_cert(fm.certificate, solved))
      throw LinarithError("internal: certificate failed its own check");
    nlohmann::json sub;
    sub["system"] = system_to_json(solved);
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : fm.certificate.multipliers) ms.push_back(m.get_str());
    sub["multipliers"] = std::move(ms);
    payload["subgoals"].push_back(std::move(sub));
    out.certificates.push_back(std::move(fm.certificate));
  }
  out.proved = true;
  out.trace.kind = "linarith";
  out.trace.goal =
      constraint_term(goal, Sort::carrier(hyps.integer ? "int" : "rat"));
  out.trace.terminal = "certificate";
  out.trace.payload = payload.dump();
  return out;
}

std::string linear_system_json(const LinearSystem& sys) {
  return system_to_json(sys).dump();
}

std::optional<LinearSystem> linear_system_of_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  LinearSystem sys;
  try {
    sys.integer = j.at("integer").get<bool>();
    for (const auto& e : j.at("constraints")) {
      LinConstraint c;
      for (const auto& [v, k] : e.at("coeffs").items()) {
        mpq_class q(k.get<std::string>());
        q.canonicalize();
        if (q != 0) c.coeffs[v] = q;
      }
      c.constant = mpq_class(e.at("constant").get<std::string>());
      c.constant.canonicalize();
      std::string r = e.at("rel").get<std::string>();
      if (r == "lt")
        c.rel = LinRel::Lt;
      else if (r == "le")
        c.rel = LinRel::Le;
      else if (r == "eq")
        c.rel = LinRel::Eq;
      else
        return std::nullopt;
      sys.constraints.push_back(std::move(c));
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return sys;
}

}  // namespace hl
