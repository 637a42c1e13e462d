#include "hl/decl.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hl {

Carrier Carrier::constant(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->name = std::move(name);
  return Carrier(std::move(n));
}

Carrier Carrier::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return Carrier(std::move(n));
}

Carrier Carrier::arrow(Carrier dom, Carrier cod) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Arrow;
  n->dom = dom.node_;
  n->cod = cod.node_;
  return Carrier(std::move(n));
}

bool Carrier::is_ground() const {
  switch (kind()) {
    case Kind::Const: return true;
    case Kind::Var: return false;
    case Kind::Arrow: return domain().is_ground() && codomain().is_ground();
  }
  return false;
}

Sort Carrier::to_sort() const {
  switch (kind()) {
    case Kind::Const: return Sort::carrier(name());
    case Kind::Arrow: return Sort::arrow(domain().to_sort(), codomain().to_sort());
    case Kind::Var: throw std::logic_error("to_sort on pattern variable");
  }
  throw std::logic_error("unreachable");
}

Carrier Carrier::of_sort(const Sort& s) {
  switch (s.kind()) {
    case Sort::Kind::Carrier: return constant(s.name());
    case Sort::Kind::Arrow:
      return arrow(of_sort(s.domain()), of_sort(s.codomain()));
    case Sort::Kind::Prop: throw std::logic_error("prop is not a carrier");
  }
  throw std::logic_error("unreachable");
}

std::string Carrier::str() const {
  switch (kind()) {
    case Kind::Const: return name();
    case Kind::Var: return name();
    case Kind::Arrow: {
      std::string d = domain().str();
      if (domain().kind() == Kind::Arrow) d = "(" + d + ")";
      return d + " -> " + codomain().str();
    }
  }
  return "?";
}

void Carrier::collect_vars(std::vector<std::string>& out) const {
  switch (kind()) {
    case Kind::Var:
      if (std::find(out.begin(), out.end(), name()) == out.end())
        out.push_back(name());
      return;
    case Kind::Const: return;
    case Kind::Arrow:
      domain().collect_vars(out);
      codomain().collect_vars(out);
      return;
  }
}

bool operator==(const Carrier& a, const Carrier& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Carrier::Kind::Const:
    case Carrier::Kind::Var:
      return a.name() == b.name();
    case Carrier::Kind::Arrow:
      return a.domain() == b.domain() && a.codomain() == b.codomain();
  }
  return false;
}

bool ClassAtom::ground() const {
  for (const auto& c : args)
    if (!c.is_ground()) return false;
  return true;
}

std::string ClassAtom::str() const {
  std::string s = cls + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += args[i].str();
  }
  return s + ")";
}

const std::string& decl_name(const Declaration& d) {
  return std::visit(
      [](const auto& x) -> const std::string& {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SortDecl>) return x.name;
        else if constexpr (std::is_same_v<T, OpDecl>) return x.symbol;
        else if constexpr (std::is_same_v<T, CoeDecl>) {
          static const std::string coe = "coe";
          return coe;
        } else return x.name;
      },
      d);
}

Env::Env() {
  Position p{};
  for (const char* s : {"nat", "int", "rat"}) sorts_.push_back({s, {}, p});
  // Builtin operators share a homogeneous carrier signature.
  for (auto [sym, ar] : std::initializer_list<std::pair<const char*, int>>{
           {"+", 2}, {"-", 2}, {"*", 2}, {"^", 2}, {"*.", 2}, {"neg", 1},
           {"norm", 1}, {"app", 2}})
    ops_.push_back({sym, ar, false, {}, p});
  coes_.push_back({"nat", "int", p});
  coes_.push_back({"int", "rat", p});
  coes_.push_back({"nat", "rat", p});
}

bool Env::has_sort(const std::string& name) const {
  for (const auto& s : sorts_)
    if (s.name == name) return true;
  return false;
}

const OpDecl* Env::find_op(const std::string& symbol) const {
  for (const auto& o : ops_)
    if (o.symbol == symbol) return &o;
  return nullptr;
}

const ClassDecl* Env::find_class(const std::string& name) const {
  for (const auto& c : classes_)
    if (c.name == name) return &c;
  return nullptr;
}

const RewriteRule* Env::find_rule(const std::string& name) const {
  for (const auto& r : rules_)
    if (r.name == name) return &r;
  return nullptr;
}

const InstanceRule* Env::find_instance(const std::string& name) const {
  for (const auto& r : instances_)
    if (r.name == name) return &r;
  return nullptr;
}

const Lemma* Env::find_lemma(const std::string& name) const {
  for (const auto& l : lemmas_)
    if (l.name == name) return &l;
  return nullptr;
}

bool Env::has_coe(const std::string& src, const std::string& tgt) const {
  for (const auto& c : coes_)
    if (c.source == src && c.target == tgt) return true;
  return false;
}

bool Env::has_name(const std::string& name) const {
  return names_.count(name) || has_sort(name) || find_op(name) ||
         find_class(name);
}

std::vector<const RewriteRule*> Env::rules_of_kind(RuleKind k) const {
  std::vector<const RewriteRule*> out;
  for (const auto& r : rules_)
    if (r.kind == k) out.push_back(&r);
  return out;
}

namespace {

void check_atom(const Env& env, const ClassAtom& atom, Position pos) {
  const ClassDecl* c = env.find_class(atom.cls);
  if (!c) throw EnvError("unknown class '" + atom.cls + "'", pos);
  if (static_cast<int>(atom.args.size()) != c->arity)
    throw EnvError("class '" + atom.cls + "' expects " +
                       std::to_string(c->arity) + " carrier argument(s)",
                   pos);
}

void collect_term_vars(const TermPtr& t, std::vector<std::string>& out) {
  if (t->is_var()) {
    if (std::find(out.begin(), out.end(), t->symbol()) == out.end())
      out.push_back(t->symbol());
    return;
  }
  for (const auto& a : t->args()) collect_term_vars(a, out);
}

}  // namespace

void Env::add(Declaration d) {
  if (sealed_) throw EnvError("environment is sealed", Position{});
  std::visit(
      [this](auto&& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SortDecl>) {
          if (has_sort(x.name))
            throw EnvError("redeclared sort '" + x.name + "'", x.pos);
          sorts_.push_back(std::move(x));
        } else if constexpr (std::is_same_v<T, OpDecl>) {
          if (find_op(x.symbol))
            throw EnvError("redeclared operator '" + x.symbol + "'", x.pos);
          ops_.push_back(std::move(x));
        } else if constexpr (std::is_same_v<T, CoeDecl>) {
          if (!has_sort(x.source) || !has_sort(x.target))
            throw EnvError("coercion over undeclared sort", x.pos);
          coes_.push_back(std::move(x));
        } else if constexpr (std::is_same_v<T, ClassDecl>) {
          if (names_.count(x.name) || find_class(x.name))
            throw EnvError("redeclared name '" + x.name + "'", x.pos);
          if (x.arity != 1 && x.arity != 2)
            throw EnvError("class arity must be 1 or 2", x.pos);
          for (const auto& proj : x.projections) {
            for (const auto& c : classes_)
              for (const auto& p : c.projections)
                if (p.symbol == proj.symbol)
                  throw EnvError("projection '" + proj.symbol +
                                     "' already owned by class '" + c.name + "'",
                                 x.pos);
            if (const OpDecl* o = find_op(proj.symbol)) {
              if (o->arity != proj.arity)
                throw EnvError("projection arity mismatch for '" +
                                   proj.symbol + "'",
                               x.pos);
            } else {
              ops_.push_back({proj.symbol, proj.arity, false, {}, x.pos});
            }
          }
          names_[x.name] = 1;
          classes_.push_back(std::move(x));
        } else if constexpr (std::is_same_v<T, InstanceRule>) {
          if (names_.count(x.name))
            throw EnvError("redeclared name '" + x.name + "'", x.pos);
          check_atom(*this, x.head, x.pos);
          std::vector<std::string> head_vars;
          for (const auto& c : x.head.args) c.collect_vars(head_vars);
          for (const auto& b : x.body) {
            check_atom(*this, b, x.pos);
            std::vector<std::string> body_vars;
            for (const auto& c : b.args) c.collect_vars(body_vars);
            for (const auto& v : body_vars)
              if (std::find(head_vars.begin(), head_vars.end(), v) ==
                  head_vars.end())
                throw EnvError("instance '" + x.name + "': body variable '" +
                                   v + "' does not appear in the head",
                               x.pos);
          }
          names_[x.name] = 2;
          instances_.push_back(std::move(x));
        } else if constexpr (std::is_same_v<T, RewriteRule>) {
          if (names_.count(x.name))
            throw EnvError("redeclared name '" + x.name + "'", x.pos);
          if (x.lhs->is_var())
            throw EnvError("rule '" + x.name + "': LHS is a bare variable",
                           x.pos);
          std::vector<std::string> lv, rv;
          collect_term_vars(x.lhs, lv);
          collect_term_vars(x.rhs, rv);
          for (const auto& v : rv)
            if (std::find(lv.begin(), lv.end(), v) == lv.end())
              throw EnvError("rule '" + x.name + "': fresh variable '" + v +
                                 "' on RHS",
                             x.pos);
          for (const auto& cond : x.conditions) {
            check_atom(*this, cond, x.pos);
            std::vector<std::string> cv;
            for (const auto& c : cond.args) c.collect_vars(cv);
            for (const auto& v : cv)
              if (std::find(lv.begin(), lv.end(), v) == lv.end())
                throw EnvError("rule '" + x.name + "': condition variable '" +
                                   v + "' not bound by LHS",
                               x.pos);
          }
          names_[x.name] = 3;
          rules_.push_back(std::move(x));
        } else if constexpr (std::is_same_v<T, Lemma>) {
          if (names_.count(x.name))
            throw EnvError("redeclared name '" + x.name + "'", x.pos);
          names_[x.name] = 4;
          lemmas_.push_back(std::move(x));
        } else if constexpr (std::is_same_v<T, GoalDecl>) {
          if (names_.count(x.name))
            throw EnvError("redeclared name '" + x.name + "'", x.pos);
          if (x.class_goal) check_atom(*this, *x.class_goal, x.pos);
          names_[x.name] = 5;
          goals_.push_back(std::move(x));
        }
      },
      std::move(d));
}

Env env_of_decls(const std::vector<Declaration>& decls) {
  Env env;
  for (const auto& d : decls) env.add(d);
  env.seal();
  return env;
}

}  // namespace hl
