#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hl/hierarchy.hpp"
#include "hl/parse.hpp"
#include "testutil.hpp"

using namespace hl;
using namespace hl::testutil;

namespace {

// Render a directed graph over nodes n0..n{k-1} as class/instance text.
std::string graph_source(int n, const std::set<std::pair<int, int>>& edges) {
  std::ostringstream out;
  for (int i = 0; i < n; ++i) out << "class n" << i << " (a)\n";
  int k = 0;
  for (auto [from, to] : edges)
    out << "instance e" << k++ << " : n" << to << "(a) <- n" << from
        << "(a)\n";
  return out.str();
}

// Rotate a cycle so its smallest node comes first; used to compare cycle
// sets independent of starting point.
std::vector<std::string> canon_cycle(std::vector<std::string> c) {
  auto min_it = std::min_element(c.begin(), c.end());
  std::rotate(c.begin(), min_it, c.end());
  return c;
}

// Oracle: enumerate every simple cycle by brute force over all simple paths
// from every start node (feasible for graphs with <= 8 nodes).
void oracle_cycles(const std::set<std::pair<int, int>>& edges, int start,
                   int node, std::vector<int>& path, std::set<int>& seen,
                   std::set<std::vector<int>>& out) {
  for (auto [from, to] : edges) {
    if (from != node) continue;
    if (to == start) {
      std::vector<int> c = path;
      auto min_it = std::min_element(c.begin(), c.end());
      std::rotate(c.begin(), min_it, c.end());
      out.insert(c);
      continue;
    }
    if (seen.count(to)) continue;
    path.push_back(to);
    seen.insert(to);
    oracle_cycles(edges, start, to, path, seen, out);
    seen.erase(to);
    path.pop_back();
  }
}

// Oracle: count directed paths from src to dst by literal path enumeration.
unsigned long long oracle_paths(const std::set<std::pair<int, int>>& edges,
                                int src, int dst) {
  if (src == dst) return 1;
  unsigned long long total = 0;
  for (auto [from, to] : edges)
    if (from == src) total += oracle_paths(edges, to, dst);
  return total;
}

std::set<std::pair<int, int>> random_dag(Rng& rng, int n, double density) {
  std::set<std::pair<int, int>> edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) < density) edges.insert({i, j});
  return edges;
}

std::set<std::pair<int, int>> random_graph(Rng& rng, int n, double density) {
  std::set<std::pair<int, int>> edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && coin(rng) < density) edges.insert({i, j});
  return edges;
}

}  // namespace

TEST_CASE("self-loop instance reports a one-node cycle") {
  Env env = parse_env("class C (a)\ninstance selfloop : C(a) <- C(a)\n");
  CycleReport r = check_acyclic(env);
  REQUIRE_FALSE(r.acyclic);
  REQUIRE(r.cycles.size() == 1);
  CHECK(r.cycles[0] == std::vector<std::string>{"C"});
}

TEST_CASE("mutual instances report a two-node cycle") {
  Env env = parse_env(
      "class C (a)\nclass D (a)\n"
      "instance cd : D(a) <- C(a)\ninstance dc : C(a) <- D(a)\n");
  CycleReport r = check_acyclic(env);
  REQUIRE_FALSE(r.acyclic);
  REQUIRE(r.cycles.size() == 1);
  CHECK(canon_cycle(r.cycles[0]) == std::vector<std::string>{"C", "D"});
}

TEST_CASE("cycle enumeration matches brute-force oracle on small graphs") {
  Rng rng(2026);
  for (int trial = 0; trial < 150; ++trial) {
    int n = 2 + static_cast<int>(rng() % 7);  // up to 8 nodes
    auto edges = random_graph(rng, n, 0.3);
    Env env = parse_env(graph_source(n, edges));

    std::set<std::vector<int>> expect;
    for (int start = 0; start < n; ++start) {
      std::vector<int> path = {start};
      std::set<int> seen = {start};
      oracle_cycles(edges, start, start, path, seen, expect);
    }
    std::set<std::vector<int>> canon_expect;
    for (auto c : expect) {
      // keep only the canonical representative (smallest node first)
      canon_expect.insert(c);
    }

    CycleReport r = check_acyclic(env);
    std::set<std::vector<int>> got;
    for (const auto& cyc : r.cycles) {
      std::vector<int> ids;
      for (const auto& name : cyc) ids.push_back(std::stoi(name.substr(1)));
      auto min_it = std::min_element(ids.begin(), ids.end());
      std::rotate(ids.begin(), min_it, ids.end());
      got.insert(ids);
    }
    REQUIRE(got == canon_expect);
    CHECK(r.acyclic == expect.empty());
  }
}

TEST_CASE("pure chain has an empty diamond report") {
  Env env = parse_env(gen_chain(5, false));
  CHECK(diamond_report(env).empty());
  CHECK(check_acyclic(env).acyclic);
}

TEST_CASE("diamond counts match exhaustive path enumeration on random DAGs") {
  Rng rng(7);
  for (int trial = 0; trial < 120; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);  // up to 10 nodes
    auto edges = random_dag(rng, n, 0.35);
    Env env = parse_env(graph_source(n, edges));

    std::map<std::pair<int, int>, unsigned long long> expect;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        unsigned long long c = oracle_paths(edges, i, j);
        if (c >= 2) expect[{i, j}] = c;
      }

    std::map<std::pair<int, int>, unsigned long long> got;
    for (const auto& d : diamond_report(env))
      got[{std::stoi(d.from.substr(1)), std::stoi(d.to.substr(1))}] =
          d.path_count;
    REQUIRE(got == expect);
  }
}

TEST_CASE("hierarchy fixture is acyclic with a nonempty diamond report") {
  Env env = parse_env(slurp(FIXTURE_DIR "/fig1.hl"));
  CHECK(check_acyclic(env).acyclic);
  auto diamonds = diamond_report(env);
  CHECK_FALSE(diamonds.empty());
  // discrete_field reaches ring along >= 2 distinct routes
  bool found = false;
  for (const auto& d : diamonds)
    if (d.from == "discrete_field" && d.to == "ring" && d.path_count >= 2)
      found = true;
  CHECK(found);
}

TEST_CASE("stats on fixtures and generated families") {
  Env empty;
  empty.seal();
  HierarchyStats zero = stats(empty);
  CHECK(zero.class_count == 0);
  CHECK(zero.instance_count == 0);
  CHECK(zero.max_out_degree == 0);

  Env fig = parse_env(slurp(FIXTURE_DIR "/fig1.hl"));
  HierarchyStats fs = stats(fig);
  CHECK(fs.class_count == 66);
  CHECK(fs.instance_count == 96);
  CHECK(fs.unary_count == 66);
  CHECK(fs.class_to_class_count == 95);  // all but the ring(Z) fact

  for (int n = 1; n <= 10; ++n) {
    Env ladder = parse_env(gen_diamond_ladder(n, true));
    HierarchyStats ls = stats(ladder);
    CHECK(ls.class_count == static_cast<std::size_t>(2 * n + 2));
    CHECK(ls.class_to_class_count == static_cast<std::size_t>(4 * n));
    CHECK(ls.instance_count == static_cast<std::size_t>(4 * n + 1));
    CHECK(ls.max_out_degree == 2);
  }
}

namespace {

// Evaluate a pointwise-definition term over Z/3. Function-sorted variables
// take table values, base-sorted variables take scalars; `app` is lookup.
struct FnModel {
  std::map<std::string, std::array<int, 3>> tables;
  int x = 0;
  int base_op(const std::string& sym, int a, int b) const {
    if (sym == "*") return (a * b) % 3;
    if (sym == "+") return (a + b) % 3;
    return (a - b + 9) % 3;
  }
  // returns a scalar for base-sorted terms, or evaluates pointwise at x.
  int eval(const TermPtr& t) const {
    if (t->is_var()) {
      auto it = tables.find(t->symbol());
      REQUIRE(it == tables.end());  // only applied functions reach here
      return x;                     // unreachable
    }
    if (t->symbol() == "app") {
      const TermPtr& fn = t->args()[0];
      int arg = eval_scalar(t->args()[1]);
      return eval_fn(fn)[static_cast<std::size_t>(arg)];
    }
    std::vector<int> vals;
    for (const auto& a : t->args()) vals.push_back(eval(a));
    int acc = vals[0];
    for (std::size_t i = 1; i < vals.size(); ++i)
      acc = base_op(t->symbol(), acc, vals[i]);
    return acc;
  }
  int eval_scalar(const TermPtr& t) const {
    REQUIRE(t->is_var());
    return x;
  }
  std::array<int, 3> eval_fn(const TermPtr& t) const {
    if (t->is_var()) return tables.at(t->symbol());
    std::vector<std::array<int, 3>> fns;
    for (const auto& a : t->args()) fns.push_back(eval_fn(a));
    std::array<int, 3> out{};
    for (int i = 0; i < 3; ++i) {
      int acc = fns[0][static_cast<std::size_t>(i)];
      for (std::size_t k = 1; k < fns.size(); ++k)
        acc = base_op(t->symbol(), acc, fns[k][static_cast<std::size_t>(i)]);
      out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
  }
};

}  // namespace

TEST_CASE("pi_instance lifts unary classes to function carriers") {
  Env env = parse_env(
      "class has_mul (a) ops(*/2)\n"
      "class has_one (a) ops(one/0)\n"
      "class monoid (a)\n"
      "instance monoid_mul : has_mul(a) <- monoid(a)\n"
      "sort Z\n");

  Carrier z = Carrier::constant("Z");
  Carrier nat = Carrier::constant("nat");
  PiInstance pi = pi_instance(env, "has_mul", z, nat);
  CHECK(pi.instance.name == "has_mul_pi");
  CHECK(pi.instance.head.cls == "has_mul");
  REQUIRE(pi.instance.head.args.size() == 1);
  CHECK(pi.instance.head.args[0] == Carrier::arrow(nat, z));
  REQUIRE(pi.instance.body.size() == 1);
  CHECK(pi.instance.body[0] == ClassAtom{"has_mul", {z}});
  REQUIRE(pi.def_rules.size() == 1);
  CHECK(pi.def_rules[0].kind == RuleKind::Def);
  // (f * g)(x) = f(x) * g(x)
  CHECK(format_term(pi.def_rules[0].lhs) == "(f * g)(x)");
  CHECK(format_term(pi.def_rules[0].rhs) == "f(x) * g(x)");

  SUBCASE("output passes env well-formedness when re-added") {
    Env env2 = parse_env(
        "class has_mul (a) ops(*/2)\n"
        "sort Z\n");
    // a fresh env accepts the generated instance and def rules
    Env env3;
    env3.add(SortDecl{"Z", std::nullopt, {}});
    env3.add(ClassDecl{"has_mul", 1, {{"*", 2}}, std::nullopt, {}});
    env3.add(pi.instance);
    for (const auto& r : pi.def_rules) env3.add(r);
    env3.seal();
    CHECK(env3.find_instance("has_mul_pi") != nullptr);
  }

  SUBCASE("composable: lifting twice nests the arrow carrier") {
    PiInstance pi2 =
        pi_instance(env, "has_mul", Carrier::arrow(nat, z), nat);
    CHECK(pi2.instance.head.args[0] ==
          Carrier::arrow(nat, Carrier::arrow(nat, z)));
  }

  SUBCASE("binary classes are rejected") {
    Env env2 = parse_env("class module (a, b)\nsort Z\n");
    CHECK_THROWS_AS(pi_instance(env2, "module", z, nat), PiError);
  }

  SUBCASE("pointwise law holds on all 3-element function tables") {
    const RewriteRule& rule = pi.def_rules[0];
    for (int f = 0; f < 27; ++f)
      for (int g = 0; g < 27; ++g)
        for (int x = 0; x < 3; ++x) {
          FnModel m;
          m.tables["f"] = {f % 3, (f / 3) % 3, (f / 9) % 3};
          m.tables["g"] = {g % 3, (g / 3) % 3, (g / 9) % 3};
          m.x = x;
          REQUIRE(m.eval(rule.lhs) == m.eval(rule.rhs));
        }
  }
}

namespace {

// Flatten a composition term to the word it denotes in the free monoid,
// under an assignment of variable names to words.
std::string flatten(const TermPtr& t,
                    const std::map<std::string, std::string>& words) {
  if (t->is_var()) return words.at(t->symbol());
  std::string out;
  for (const auto& a : t->args()) out += flatten(a, words);
  return out;
}

}  // namespace

TEST_CASE("reassoc emits the right-extended companion rule") {
  Env env = parse_env(
      "sort M\n"
      "[assoc] op >> 2\n"
      "[over M] lemma comp_ab : a >> b = d\n");
  const Lemma* lem = env.find_lemma("comp_ab");
  REQUIRE(lem != nullptr);
  RewriteRule r = reassoc(env, *lem);
  CHECK(r.name == "comp_ab_assoc");
  CHECK(r.kind == RuleKind::Simp);
  TermContext mctx;
  mctx.ambient = Sort::carrier("M");
  CHECK(term_eq(r.lhs, parse_term("a >> (b >> X)", env, mctx)));
  CHECK(term_eq(r.rhs, parse_term("d >> X", env, mctx)));

  SUBCASE("companion is valid in the free monoid whenever the input is") {
    Rng rng(99);
    const std::string alphabet = "pqr";
    for (int trial = 0; trial < 200; ++trial) {
      std::map<std::string, std::string> words;
      auto word = [&](int max_len) {
        std::string w;
        int len = static_cast<int>(rng() % static_cast<unsigned>(max_len + 1));
        for (int i = 0; i < len; ++i)
          w += alphabet[rng() % alphabet.size()];
        return w;
      };
      words["a"] = word(3);
      words["b"] = word(3);
      words["d"] = words["a"] + words["b"];  // makes the input equation valid
      words["X"] = word(5);
      const Lemma& l = *lem;
      REQUIRE(flatten(l.statement->args()[0], words) ==
              flatten(l.statement->args()[1], words));
      CHECK(flatten(r.lhs, words) == flatten(r.rhs, words));
    }
  }

  SUBCASE("non-assoc operator rejected") {
    Sort m = Sort::carrier("M");
    Lemma bad;
    bad.name = "bad";
    bad.statement =
        Term::rel("=", Term::op("*", {Term::var("a", m), Term::var("b", m)}, m),
                  Term::var("d", m));
    CHECK_THROWS_AS(reassoc(env, bad), ReassocError);
  }

  SUBCASE("non-composition LHS rejected") {
    Env env2 = parse_env(
        "sort M\n"
        "[assoc] op >> 2\n"
        "[over M] lemma bad : a = d\n");
    CHECK_THROWS_AS(reassoc(env2, *env2.find_lemma("bad")), ReassocError);
  }
}

TEST_CASE("generators emit parseable families") {
  for (int n : {0, 1, 4}) {
    Env chain = parse_env(gen_chain(n, true));
    CHECK(chain.classes().size() == static_cast<std::size_t>(n + 1));
    CHECK(check_acyclic(chain).acyclic);
  }
  Env ladder = parse_env(gen_diamond_ladder(3, false));
  CHECK(check_acyclic(ladder).acyclic);
  auto ds = diamond_report(ladder);
  CHECK_FALSE(ds.empty());
  // u0 -> u3: two rung choices at each of the two intermediate levels
  bool found = false;
  for (const auto& d : ds)
    if (d.from == "u0" && d.to == "u3") {
      found = true;
      CHECK(d.path_count == 4);
    }
  CHECK(found);
}
