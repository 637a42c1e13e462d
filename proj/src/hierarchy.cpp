#include "hl/hierarchy.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hl {

std::vector<ClassEdge> class_edges(const Env& env) {
  std::vector<ClassEdge> edges;
  for (const auto& inst : env.instances()) {
    const ClassDecl* head_cls = env.find_class(inst.head.cls);
    if (!head_cls || head_cls->arity != 1) continue;
    for (const auto& body : inst.body) {
      const ClassDecl* body_cls = env.find_class(body.cls);
      if (!body_cls || body_cls->arity != 1) continue;
      if (!(body.args[0] == inst.head.args[0])) continue;
      edges.push_back({body.cls, inst.head.cls, inst.name});
    }
  }
  return edges;
}

namespace {

using AdjMap = std::map<std::string, std::vector<std::string>>;

AdjMap adjacency(const std::vector<ClassEdge>& edges) {
  AdjMap adj;
  for (const auto& e : edges) {
    auto& outs = adj[e.from];
    if (std::find(outs.begin(), outs.end(), e.to) == outs.end())
      outs.push_back(e.to);
  }
  return adj;
}

// Elementary cycle enumeration: DFS restricted to cycles whose
// lexicographically smallest node is the start node.
void cycle_dfs(const AdjMap& adj, const std::string& start,
               std::vector<std::string>& path, std::set<std::string>& on_path,
               std::vector<std::vector<std::string>>& out) {
  const auto it = adj.find(path.back());
  if (it == adj.end()) return;
  for (const auto& next : it->second) {
    if (next == start) {
      out.push_back(path);
      continue;
    }
    if (next < start || on_path.count(next)) continue;
    path.push_back(next);
    on_path.insert(next);
    cycle_dfs(adj, start, path, on_path, out);
    on_path.erase(next);
    path.pop_back();
  }
}

}  // namespace

CycleReport check_acyclic(const Env& env) {
  CycleReport report;
  AdjMap adj = adjacency(class_edges(env));
  std::set<std::string> nodes;
  for (const auto& [n, outs] : adj) {
    nodes.insert(n);
    nodes.insert(outs.begin(), outs.end());
  }
  for (const auto& start : nodes) {
    std::vector<std::string> path = {start};
    std::set<std::string> on_path = {start};
    cycle_dfs(adj, start, path, on_path, report.cycles);
  }
  report.acyclic = report.cycles.empty();
  return report;
}

std::vector<Diamond> diamond_report(const Env& env) {
  AdjMap adj = adjacency(class_edges(env));
  std::set<std::string> nodes;
  for (const auto& [n, outs] : adj) {
    nodes.insert(n);
    nodes.insert(outs.begin(), outs.end());
  }
  std::vector<Diamond> out;
  for (const auto& src : nodes) {
    // Path counts from src by memoized DFS (env must be acyclic).
    std::map<std::string, unsigned long long> counts;
    std::vector<std::string> order;
    // simple post-order accumulation
    std::function<unsigned long long(const std::string&, const std::string&)>
        paths = [&](const std::string& from,
                    const std::string& to) -> unsigned long long {
      if (from == to) return 1;
      auto key = from;
      auto c = counts.find(key);
      if (c != counts.end()) return c->second;
      unsigned long long total = 0;
      auto it = adj.find(from);
      if (it != adj.end())
        for (const auto& n : it->second) total += paths(n, to);
      counts[key] = total;
      return total;
    };
    for (const auto& dst : nodes) {
      if (src == dst) continue;
      counts.clear();
      unsigned long long c = paths(src, dst);
      if (c >= 2) out.push_back({src, dst, c});
    }
  }
  return out;
}

HierarchyStats stats(const Env& env) {
  HierarchyStats s;
  s.class_count = env.classes().size();
  s.instance_count = env.instances().size();
  for (const auto& c : env.classes())
    if (c.arity == 1) ++s.unary_count;
  for (const auto& inst : env.instances()) {
    const ClassDecl* hc = env.find_class(inst.head.cls);
    if (hc && hc->arity == 1 && inst.body.size() == 1) {
      const ClassDecl* bc = env.find_class(inst.body[0].cls);
      if (bc && bc->arity == 1 && inst.body[0].args[0] == inst.head.args[0])
        ++s.class_to_class_count;
    }
  }
  std::map<std::string, std::set<std::string>> outs;
  for (const auto& e : class_edges(env)) outs[e.from].insert(e.to);
  for (const auto& [n, o] : outs)
    s.max_out_degree = std::max(s.max_out_degree, o.size());
  return s;
}

PiInstance pi_instance(const Env& env, const std::string& cls,
                       const Carrier& base_arg, const Carrier& fn_domain) {
  const ClassDecl* c = env.find_class(cls);
  if (!c) throw PiError("unknown class '" + cls + "'");
  if (c->arity != 1)
    throw PiError("pi_instance requires a unary class, '" + cls +
                  "' is binary");
  PiInstance out;
  Carrier fn_carrier = Carrier::arrow(fn_domain, base_arg);
  out.instance.name = cls + "_pi";
  out.instance.head = {cls, {fn_carrier}};
  out.instance.body = {{cls, {base_arg}}};

  // Pointwise definitional rules. Projections over the base carrier only;
  // the carrier names double as sort names when they are ground.
  Sort alpha = base_arg.is_ground() ? base_arg.to_sort() : Sort::carrier("alpha");
  Sort beta =
      fn_domain.is_ground() ? fn_domain.to_sort() : Sort::carrier("beta");
  Sort fn_sort = Sort::arrow(beta, alpha);
  TermPtr x = Term::var("x", beta);
  for (const auto& proj : c->projections) {
    RewriteRule r;
    std::string sym_name = proj.symbol;
    if (sym_name == "*") sym_name = "mul";
    else if (sym_name == "+") sym_name = "add";
    else if (sym_name == "-") sym_name = "sub";
    r.name = cls + "_pi_" + sym_name;
    r.kind = RuleKind::Def;
    std::vector<TermPtr> fn_args, val_args;
    for (int i = 0; i < proj.arity; ++i) {
      TermPtr g = Term::var(std::string(1, static_cast<char>('f' + i)), fn_sort);
      fn_args.push_back(g);
      val_args.push_back(Term::op("app", {g, x}, alpha));
    }
    TermPtr lifted = Term::op(proj.symbol, fn_args, fn_sort);
    r.lhs = Term::op("app", {lifted, x}, alpha);
    r.rhs = Term::op(proj.symbol, val_args, alpha);
    out.def_rules.push_back(std::move(r));
  }
  return out;
}

RewriteRule reassoc(const Env& env, const Lemma& lemma) {
  const TermPtr& st = lemma.statement;
  if (st->kind() != Term::Kind::Rel || st->symbol() != "=")
    throw ReassocError("lemma '" + lemma.name + "' is not an equation");
  const TermPtr& lhs = st->args()[0];
  const TermPtr& rhs = st->args()[1];
  if (lhs->kind() != Term::Kind::Op || lhs->args().size() != 2)
    throw ReassocError("LHS of '" + lemma.name + "' is not a composition");
  const OpDecl* op = env.find_op(lhs->symbol());
  if (!op || !op->assoc)
    throw ReassocError("operator '" + lhs->symbol() +
                       "' is not declared [assoc]");
  // Fresh variable not used in the statement.
  std::vector<std::string> used;
  std::function<void(const TermPtr&)> collect = [&](const TermPtr& t) {
    if (t->is_var()) used.push_back(t->symbol());
    for (const auto& a : t->args()) collect(a);
  };
  collect(st);
  std::string fresh = "X";
  while (std::find(used.begin(), used.end(), fresh) != used.end())
    fresh += "'";
  TermPtr x = Term::var(fresh, lhs->sort());
  RewriteRule r;
  r.name = lemma.name + "_assoc";
  r.kind = RuleKind::Simp;
  const std::string& sym = lhs->symbol();
  r.lhs = Term::op(sym,
                   {lhs->args()[0],
                    Term::op(sym, {lhs->args()[1], x}, lhs->sort())},
                   lhs->sort());
  r.rhs = Term::op(sym, {rhs, x}, rhs->sort());
  return r;
}

std::string gen_chain(int n, bool with_fact) {
  std::ostringstream out;
  out << "# chain hierarchy, n = " << n << "\n";
  for (int i = 0; i <= n; ++i) out << "class c" << i << " (a)\n";
  for (int i = 0; i < n; ++i)
    out << "instance c" << i << "_to_c" << i + 1 << " : c" << i + 1
        << "(a) <- c" << i << "(a)\n";
  out << "sort Z\n";
  if (with_fact) out << "instance fact_c0 : c0(Z)\n";
  return out.str();
}

std::string gen_diamond_ladder(int n, bool with_fact) {
  std::ostringstream out;
  out << "# ladder of " << n << " diamonds\n";
  for (int i = 0; i <= n; ++i)
    out << "class u" << i << " (a)\nclass v" << i << " (a)\n";
  for (int i = 0; i < n; ++i)
    for (const char* from : {"u", "v"})
      for (const char* to : {"u", "v"})
        out << "instance " << from << i << "_to_" << to << i + 1 << " : " << to
            << i + 1 << "(a) <- " << from << i << "(a)\n";
  out << "sort Z\n";
  if (with_fact) out << "instance fact_u0 : u0(Z)\n";
  return out.str();
}

}  // namespace hl
