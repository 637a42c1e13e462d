#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hl/term.hpp"

namespace hl {

// Carrier expression appearing as a class-atom argument: a concrete carrier
// sort, a pattern variable, or a function carrier.
class Carrier {
public:
  enum class Kind { Const, Var, Arrow };

  static Carrier constant(std::string name);
  static Carrier var(std::string name);
  static Carrier arrow(Carrier dom, Carrier cod);

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  Carrier domain() const { return Carrier(node_->dom); }
  Carrier codomain() const { return Carrier(node_->cod); }

  bool is_ground() const;
  Sort to_sort() const;  // requires is_ground()
  static Carrier of_sort(const Sort& s);
  std::string str() const;
  void collect_vars(std::vector<std::string>& out) const;

  friend bool operator==(const Carrier& a, const Carrier& b);
  friend bool operator!=(const Carrier& a, const Carrier& b) { return !(a == b); }
  friend bool operator<(const Carrier& a, const Carrier& b) {
    return a.str() < b.str();
  }

private:
  struct Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const Node> dom, cod;
  };
  explicit Carrier(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct ClassAtom {
  std::string cls;
  std::vector<Carrier> args;
  bool ground() const;
  std::string str() const;
  friend bool operator==(const ClassAtom& a, const ClassAtom& b) {
    return a.cls == b.cls && a.args == b.args;
  }
  friend bool operator<(const ClassAtom& a, const ClassAtom& b) {
    return a.str() < b.str();
  }
};

struct Position {
  int line = 0;
  int column = 0;
};

struct Projection {
  std::string symbol;
  int arity = 0;
};

struct ClassDecl {
  std::string name;
  int arity = 1;  // 1 or 2 carrier parameters
  std::vector<Projection> projections;
  std::optional<std::string> doc;
  Position pos;
};

struct InstanceRule {
  std::string name;
  ClassAtom head;
  std::vector<ClassAtom> body;
  int priority = 1000;
  std::optional<std::string> doc;
  Position pos;
};

enum class RuleKind { Simp, Def, CastMove, CastElim };

struct RewriteRule {
  std::string name;
  TermPtr lhs;
  TermPtr rhs;
  // Side conditions; their variables name LHS term variables and denote the
  // carrier sort of whatever that variable matched.
  std::vector<ClassAtom> conditions;
  RuleKind kind = RuleKind::Simp;
  std::optional<std::string> doc;
  Position pos;
};

struct Hypothesis {
  std::string name;
  TermPtr statement;
};

struct Lemma {
  std::string name;
  std::vector<Hypothesis> hypotheses;
  TermPtr statement;
  std::vector<std::string> attributes;
  std::optional<std::string> doc;
  Position pos;
};

// goal <name> [tactic] : <statement>; class-atom goals use the resolve tactic.
struct GoalDecl {
  std::string name;
  std::string tactic;  // resolve | ring | abel | linarith | norm_num | ...
  std::vector<Hypothesis> hypotheses;
  TermPtr statement;                  // term goals
  std::optional<ClassAtom> class_goal;  // resolve goals
  std::optional<std::string> doc;
  Position pos;
};

struct OpDecl {
  std::string symbol;
  int arity = 0;
  bool assoc = false;
  std::optional<std::string> doc;
  Position pos;
};

struct SortDecl {
  std::string name;
  std::optional<std::string> doc;
  Position pos;
};

struct CoeDecl {
  std::string source;
  std::string target;
  Position pos;
};

using Declaration = std::variant<SortDecl, OpDecl, CoeDecl, ClassDecl,
                                 InstanceRule, RewriteRule, Lemma, GoalDecl>;

const std::string& decl_name(const Declaration& d);

// Immutable after seal(); referential integrity checked there.
class Env {
public:
  Env();

  void add(Declaration d);  // throws EnvError on redeclaration / bad refs
  void seal() { sealed_ = true; }
  bool sealed() const { return sealed_; }

  bool has_sort(const std::string& name) const;
  const OpDecl* find_op(const std::string& symbol) const;
  const ClassDecl* find_class(const std::string& name) const;
  const RewriteRule* find_rule(const std::string& name) const;
  const InstanceRule* find_instance(const std::string& name) const;
  const Lemma* find_lemma(const std::string& name) const;
  bool has_coe(const std::string& src, const std::string& tgt) const;
  bool has_name(const std::string& name) const;

  const std::vector<SortDecl>& sorts() const { return sorts_; }
  const std::vector<OpDecl>& ops() const { return ops_; }
  const std::vector<CoeDecl>& coes() const { return coes_; }
  const std::vector<ClassDecl>& classes() const { return classes_; }
  const std::vector<InstanceRule>& instances() const { return instances_; }
  const std::vector<RewriteRule>& rules() const { return rules_; }
  const std::vector<Lemma>& lemmas() const { return lemmas_; }
  const std::vector<GoalDecl>& goals() const { return goals_; }

  std::vector<const RewriteRule*> rules_of_kind(RuleKind k) const;

private:
  bool sealed_ = false;
  std::vector<SortDecl> sorts_;
  std::vector<OpDecl> ops_;
  std::vector<CoeDecl> coes_;
  std::vector<ClassDecl> classes_;
  std::vector<InstanceRule> instances_;
  std::vector<RewriteRule> rules_;
  std::vector<Lemma> lemmas_;
  std::vector<GoalDecl> goals_;
  std::map<std::string, int> names_;  // declaration name -> kind tag
};

struct EnvError : std::runtime_error {
  Position pos;
  EnvError(std::string msg, Position p)
      : std::runtime_error(std::move(msg)), pos(p) {}
};

Env env_of_decls(const std::vector<Declaration>& decls);

}  // namespace hl
