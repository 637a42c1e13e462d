#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>

#include "hl/arith.hpp"
#include "hl/parse.hpp"
#include "testutil.hpp"

using namespace hl;
using namespace hl::testutil;

namespace {

const Sort INT = Sort::carrier("int");
const Sort NAT = Sort::carrier("nat");

TermPtr parse_int(const std::string& s) {
  static Env env = parse_env("");
  TermContext ctx;
  ctx.ambient = INT;
  return parse_term(s, env, ctx);
}

// ---- oracle 1: sparse multivariate expansion with exact coefficients -------
// exponent vector (one slot per pool variable) -> coefficient
using Expo = std::vector<int>;
using Sparse = std::map<Expo, mpq_class>;

Sparse sp_const(const mpq_class& c, std::size_t nvars) {
  Sparse s;
  if (c != 0) s[Expo(nvars, 0)] = c;
  return s;
}

Sparse sp_add(const Sparse& a, const Sparse& b) {
  Sparse out = a;
  for (const auto& [k, c] : b) {
    out[k] += c;
    if (out[k] == 0) out.erase(k);
  }
  return out;
}

Sparse sp_neg(const Sparse& a) {
  Sparse out;
  for (const auto& [k, c] : a) out[k] = -c;
  return out;
}

Sparse sp_mul(const Sparse& a, const Sparse& b) {
  Sparse out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      Expo k = ka;
      for (std::size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
      out[k] += ca * cb;
      if (out[k] == 0) out.erase(k);
    }
  return out;
}

Sparse oracle_expand(const TermPtr& t, const std::vector<std::string>& pool) {
  switch (t->kind()) {
    case Term::Kind::Numeral:
      return sp_const(mpq_class(t->value()), pool.size());
    case Term::Kind::Var: {
      Expo k(pool.size(), 0);
      auto it = std::find(pool.begin(), pool.end(), t->symbol());
      REQUIRE(it != pool.end());
      k[static_cast<std::size_t>(it - pool.begin())] = 1;
      Sparse s;
      s[k] = 1;
      return s;
    }
    default:
      break;
  }
  const std::string& s = t->symbol();
  if (s == "+")
    return sp_add(oracle_expand(t->args()[0], pool),
                  oracle_expand(t->args()[1], pool));
  if (s == "-")
    return sp_add(oracle_expand(t->args()[0], pool),
                  sp_neg(oracle_expand(t->args()[1], pool)));
  if (s == "neg") return sp_neg(oracle_expand(t->args()[0], pool));
  if (s == "*")
    return sp_mul(oracle_expand(t->args()[0], pool),
                  oracle_expand(t->args()[1], pool));
  if (s == "^") {
    Sparse base = oracle_expand(t->args()[0], pool);
    long e = t->args()[1]->value().get_si();
    Sparse out = sp_const(1, pool.size());
    for (long i = 0; i < e; ++i) out = sp_mul(out, base);
    return out;
  }
  FAIL("oracle: unexpected op ", s);
  return {};
}

mpq_class sp_eval(const Sparse& s, const std::vector<mpq_class>& vals) {
  mpq_class out = 0;
  for (const auto& [k, c] : s) {
    mpq_class m = c;
    for (std::size_t i = 0; i < k.size(); ++i)
      for (int j = 0; j < k[i]; ++j) m *= vals[i];
    out += m;
  }
  return out;
}

const std::vector<std::string> POOL = {"v", "w", "x", "y", "z"};

// random ring expression: + - * neg ^(0..4), numerals 0..9, <=5 vars
TermPtr ring_term(Rng& rng, int depth, bool semiring = false) {
  if (depth == 0 || pick(rng, 0, 3) == 0) {
    if (pick(rng, 0, 1) == 0)
      return Term::numeral(mpz_class(pick(rng, 0, 9)), INT);
    return Term::var(POOL[static_cast<std::size_t>(pick(rng, 0, 4))], INT);
  }
  int op = pick(rng, 0, semiring ? 3 : 5);
  switch (op) {
    case 0:
      return Term::op(
          "+", {ring_term(rng, depth - 1, semiring),
                ring_term(rng, depth - 1, semiring)},
          INT);
    case 1:
    case 2:
      return Term::op(
          "*", {ring_term(rng, depth - 1, semiring),
                ring_term(rng, depth - 1, semiring)},
          INT);
    case 3:
      return Term::op("^",
                      {ring_term(rng, depth - 1, semiring),
                       Term::numeral(mpz_class(pick(rng, 0, 4)), NAT)},
                      INT);
    case 4:
      return Term::op("-",
                      {ring_term(rng, depth - 1), ring_term(rng, depth - 1)},
                      INT);
    default:
      return Term::op("neg", {ring_term(rng, depth - 1)}, INT);
  }
}

// algebra-preserving structural shuffle: commute/reassociate +- and *
TermPtr shuffle(const TermPtr& t, Rng& rng) {
  if (t->kind() != Term::Kind::Op) return t;
  std::vector<TermPtr> args;
  for (const auto& a : t->args()) args.push_back(shuffle(a, rng));
  TermPtr out = Term::op(t->symbol(), args, t->sort());
  const std::string& s = t->symbol();
  if ((s == "+" || s == "*") && pick(rng, 0, 1) == 0)
    out = Term::op(s, {args[1], args[0]}, t->sort());
  // rotate ((a . b) . c) -> (a . (b . c))
  if ((s == "+" || s == "*") && out->args()[0]->is_op(s) &&
      pick(rng, 0, 1) == 0) {
    const TermPtr& l = out->args()[0];
    out = Term::op(s,
                   {l->args()[0],
                    Term::op(s, {l->args()[1], out->args()[1]}, t->sort())},
                   t->sort());
  }
  return out;
}

// ---- oracle 2: evaluation modulo a 61-bit prime ------------------------------
constexpr std::uint64_t P61 = 2305843009213693951ull;  // 2^61 - 1

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % P61);
}

std::uint64_t eval_mod(const TermPtr& t,
                       const std::map<std::string, std::uint64_t>& vals) {
  switch (t->kind()) {
    case Term::Kind::Numeral:
      return mpz_class(t->value() % P61).get_ui();
    case Term::Kind::Var:
      return vals.at(t->symbol());
    default:
      break;
  }
  const std::string& s = t->symbol();
  std::uint64_t a = eval_mod(t->args()[0], vals);
  if (s == "neg") return (P61 - a) % P61;
  if (s == "^") {
    std::uint64_t r = 1, e = t->args()[1]->value().get_ui();
    while (e) {
      if (e & 1) r = mulmod(r, a);
      a = mulmod(a, a);
      e >>= 1;
    }
    return r;
  }
  std::uint64_t b = eval_mod(t->args()[1], vals);
  if (s == "+") return (a + b) % P61;
  if (s == "-") return (a + P61 - b) % P61;
  return mulmod(a, b);
}

// ---- trace replay against the axiom checker ----------------------------------
TermPtr subterm_at(const TermPtr& t, const std::vector<int>& path,
                   std::size_t i = 0) {
  if (i == path.size()) return t;
  std::size_t k = static_cast<std::size_t>(path[i]);
  REQUIRE(k < t->args().size());
  return subterm_at(t->args()[k], path, i + 1);
}

TermPtr replace_at(const TermPtr& t, const std::vector<int>& path,
                   const TermPtr& repl, std::size_t i = 0) {
  if (i == path.size()) return repl;
  std::vector<TermPtr> args = t->args();
  std::size_t k = static_cast<std::size_t>(path[i]);
  args[k] = replace_at(args[k], path, repl, i + 1);
  if (t->kind() == Term::Kind::Rel)
    return Term::rel(t->symbol(), args[0], args[1]);
  return Term::op(t->symbol(), std::move(args), t->sort());
}

// replays each step of a ring/abel trace; returns the final term
TermPtr replay_ring_trace(const ProofTrace& tr) {
  TermPtr cur = tr.goal;
  for (const auto& st : tr.steps) {
    CHECK(term_eq(subterm_at(cur, st.position), st.before));
    CHECK(check_ring_axiom(st.rule, st.reversed, st.before, st.after));
    cur = replace_at(cur, st.position, st.after);
  }
  return cur;
}

bool horner_canonical(const HornerPtr& p, int min_var = -1) {
  if (p->is_const) return true;
  if (p->var < min_var || p->exp < 1) return false;
  if (p->base->is_const && p->base->constant == 0) return false;
  // unmerged exponent: base = horner(_, same var, _, const 0)
  if (!p->base->is_const && p->base->var == p->var &&
      p->base->addend->is_const && p->base->addend->constant == 0)
    return false;
  return horner_canonical(p->base, p->var) &&
         horner_canonical(p->addend, p->var + 1);
}

// ---- oracle 3: free-abelian coefficient counting ------------------------------
void abel_count(const TermPtr& t, const mpz_class& scale,
                std::map<std::string, mpz_class>& coeffs, mpz_class& konst) {
  switch (t->kind()) {
    case Term::Kind::Numeral:
      konst += scale * t->value();
      return;
    case Term::Kind::Var:
      coeffs[t->symbol()] += scale;
      return;
    default:
      break;
  }
  const std::string& s = t->symbol();
  if (s == "+") {
    abel_count(t->args()[0], scale, coeffs, konst);
    abel_count(t->args()[1], scale, coeffs, konst);
  } else if (s == "-") {
    abel_count(t->args()[0], scale, coeffs, konst);
    abel_count(t->args()[1], mpz_class(-scale), coeffs, konst);
  } else if (s == "neg") {
    abel_count(t->args()[0], mpz_class(-scale), coeffs, konst);
  } else {  // *.
    abel_count(t->args()[1], mpz_class(scale * t->args()[0]->value()), coeffs,
               konst);
  }
}

TermPtr abel_term(Rng& rng, int depth) {
  if (depth == 0 || pick(rng, 0, 3) == 0) {
    if (pick(rng, 0, 2) == 0)
      return Term::numeral(mpz_class(pick(rng, 0, 9)), INT);
    return Term::var(POOL[static_cast<std::size_t>(pick(rng, 0, 4))], INT);
  }
  switch (pick(rng, 0, 3)) {
    case 0:
      return Term::op(
          "+", {abel_term(rng, depth - 1), abel_term(rng, depth - 1)}, INT);
    case 1:
      return Term::op(
          "-", {abel_term(rng, depth - 1), abel_term(rng, depth - 1)}, INT);
    case 2:
      return Term::op("neg", {abel_term(rng, depth - 1)}, INT);
    default:
      return Term::op("*.",
                      {Term::numeral(mpz_class(pick(rng, 0, 6)), INT),
                       abel_term(rng, depth - 1)},
                      INT);
  }
}

// ---- oracle 4: exact bignum evaluation -----------------------------------------
mpz_class gmp_eval(const TermPtr& t) {
  switch (t->kind()) {
    case Term::Kind::Numeral:
      return t->value();
    default:
      break;
  }
  const std::string& s = t->symbol();
  mpz_class a = gmp_eval(t->args()[0]);
  if (s == "neg") return -a;
  if (s == "^") {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), a.get_mpz_t(), t->args()[1]->value().get_ui());
    return r;
  }
  mpz_class b = gmp_eval(t->args()[1]);
  if (s == "+") return a + b;
  if (s == "*") return a * b;
  // subtraction truncates at zero on nat
  if (t->sort().is_carrier() && t->sort().name() == "nat")
    return a >= b ? mpz_class(a - b) : mpz_class(0);
  return a - b;
}

mpz_class rand_big(Rng& rng, int max_bits) {
  int bits = pick(rng, 0, max_bits);
  mpz_class v = 0;
  for (int i = 0; i < bits; ++i) {
    v <<= 1;
    v += pick(rng, 0, 1);
  }
  return v;
}

// random literal-only expression over a given sort
TermPtr lit_term(Rng& rng, const Sort& sort, int depth, int leaf_bits) {
  bool is_nat = sort.name() == "nat";
  if (depth == 0 || pick(rng, 0, 3) == 0)
    return Term::numeral(rand_big(rng, leaf_bits), sort);
  switch (pick(rng, 0, is_nat ? 3 : 4)) {
    case 0:
      return Term::op("+",
                      {lit_term(rng, sort, depth - 1, leaf_bits),
                       lit_term(rng, sort, depth - 1, leaf_bits)},
                      sort);
    case 1:
      return Term::op("-",
                      {lit_term(rng, sort, depth - 1, leaf_bits),
                       lit_term(rng, sort, depth - 1, leaf_bits)},
                      sort);
    case 2:
      return Term::op("*",
                      {lit_term(rng, sort, depth - 1, leaf_bits),
                       lit_term(rng, sort, depth - 1, leaf_bits)},
                      sort);
    case 3:
      return Term::op("^",
                      {lit_term(rng, sort, depth - 1, std::min(leaf_bits, 8)),
                       Term::numeral(mpz_class(pick(rng, 0, 5)), NAT)},
                      sort);
    default:
      return Term::op("neg", {lit_term(rng, sort, depth - 1, leaf_bits)},
                      sort);
  }
}

TermPtr lit_of(const mpz_class& v, const Sort& sort) {
  if (v < 0) return Term::op("neg", {Term::numeral(mpz_class(-v), sort)}, sort);
  return Term::numeral(v, sort);
}

}  // namespace

TEST_CASE("ring normalization matches sparse polynomial expansion") {
  Rng rng(1101);
  for (int trial = 0; trial < 400; ++trial) {
    TermPtr t = ring_term(rng, 4);
    Sparse want = oracle_expand(t, POOL);
    RingNormal rn = ring_normalize(t);
    CHECK(horner_canonical(rn.poly));

    // evaluation agreement at 12 random rational points kills any mismatch
    // for polynomials of this size with overwhelming probability
    for (int pt = 0; pt < 12; ++pt) {
      std::vector<mpq_class> pool_vals;
      for (std::size_t i = 0; i < POOL.size(); ++i)
        pool_vals.emplace_back(pick(rng, -50, 50), pick(rng, 1, 9));
      // the normal form indexes atoms by first occurrence, not pool order
      std::vector<mpq_class> atom_vals;
      for (const auto& name : rn.atoms) {
        auto it = std::find(POOL.begin(), POOL.end(), name);
        REQUIRE(it != POOL.end());
        atom_vals.push_back(pool_vals[static_cast<std::size_t>(
            it - POOL.begin())]);
      }
      mpq_class a = horner_eval(rn.poly, atom_vals);
      mpq_class b = sp_eval(want, pool_vals);
      a.canonicalize();
      b.canonicalize();
      CHECK(a == b);
    }

    // idempotence: the canonical term normalizes to itself with no steps
    RingNormal again = ring_normalize(rn.canonical);
    CHECK(term_eq(again.canonical, rn.canonical));
    CHECK(again.trace.steps.empty());
    // atom indices may shift when a variable vanished from the canonical
    // form, so compare the named rendering rather than raw indices
    CHECK(horner_str(again.poly, again.atoms) == horner_str(rn.poly, rn.atoms));
  }
}

TEST_CASE("ring equality decision agrees with mod-p evaluation") {
  Rng rng(1102);
  int equal_seen = 0, distinct_seen = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    TermPtr lhs = ring_term(rng, 3);
    TermPtr rhs = trial % 2 == 0 ? shuffle(lhs, rng) : ring_term(rng, 3);
    RingProof pf = ring_prove_eq(lhs, rhs);

    bool agree_everywhere = true;
    for (int pt = 0; pt < 20 && agree_everywhere; ++pt) {
      std::map<std::string, std::uint64_t> vals;
      for (const auto& v : POOL)
        vals[v] = static_cast<std::uint64_t>(rng()) % P61;
      if (eval_mod(lhs, vals) != eval_mod(rhs, vals)) agree_everywhere = false;
    }
    CHECK(pf.equal == agree_everywhere);
    if (trial % 2 == 0) CHECK(pf.equal);  // shuffles preserve the polynomial
    (pf.equal ? equal_seen : distinct_seen)++;
  }
  CHECK(equal_seen >= 5000);
  CHECK(distinct_seen >= 1000);
}

TEST_CASE("ring traces replay step by step and resist mutation") {
  Rng rng(1103);
  int mutations_rejected = 0, mutations_total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    TermPtr lhs = ring_term(rng, 3);
    TermPtr rhs = shuffle(lhs, rng);
    RingProof pf = ring_prove_eq(lhs, rhs);
    REQUIRE(pf.equal);
    TermPtr final = replay_ring_trace(pf.trace);
    CHECK(term_eq(final->args()[0], final->args()[1]));
    CHECK(pf.trace.terminal == "reflexivity");

    if (pf.trace.steps.empty()) continue;
    // mutate one step: swapping before/after must break the axiom check
    // unless the axiom happens to be its own inverse on this instance
    const ProofStep& st =
        pf.trace.steps[static_cast<std::size_t>(pick(
            rng, 0, static_cast<int>(pf.trace.steps.size()) - 1))];
    ++mutations_total;
    bool still_ok =
        check_ring_axiom(st.rule, st.reversed, st.after, st.before) &&
        term_eq(st.before, st.after);
    if (!still_ok) ++mutations_rejected;
    // renaming the axiom to an unrelated one is always rejected
    const char* other = st.rule == "pow_zero" ? "neg_neg" : "pow_zero";
    CHECK_FALSE(check_ring_axiom(other, false, st.before, st.after));
  }
  CHECK(mutations_rejected == mutations_total);
}

TEST_CASE("ring worked examples") {
  TermPtr t = parse_int("x + 0");
  RingNormal rn = ring_normalize(t);
  REQUIRE(rn.trace.steps.size() == 1);
  CHECK(rn.trace.steps[0].rule == "add_zero");
  CHECK(format_term(rn.canonical) == "x");

  RingProof sq = ring_prove_eq(parse_int("(x + y)^2"),
                               parse_int("x^2 + 2 * x * y + y^2"));
  CHECK(sq.equal);
  // x^2 + 2xy + y^2 with x before y: keys [x,x] < [x,y] < [y,y]
  CHECK(format_term(sq.lhs_canonical) ==
        "x * x + (2 * (x * y) + y * y)");
  replay_ring_trace(sq.trace);

  RingProof comm = ring_prove_eq(parse_int("x * y"), parse_int("y * x"));
  CHECK(comm.equal);
  CHECK(!comm.trace.steps.empty());
  replay_ring_trace(comm.trace);

  CHECK_FALSE(ring_prove_eq(parse_int("x + 1"), parse_int("x + 2")).equal);

  RingNormal z = ring_normalize(parse_int("0 * x"));
  CHECK(z.canonical->is_numeral());
  CHECK(z.canonical->value() == 0);
  CHECK(z.poly->is_const);
  CHECK(z.poly->constant == 0);

  RingNormal five = ring_normalize(parse_int("2 + 3"));
  REQUIRE(five.canonical->is_numeral());
  CHECK(five.canonical->value() == 5);
  CHECK(bits_canonical(five.canonical->bits()));

  // x^3 and x*y + x in Horner form
  RingNormal cube = ring_normalize(parse_int("x^3"));
  CHECK(horner_eq(cube.poly,
                  HornerPoly::horner(HornerPoly::of_const(1), 0, 3,
                                     HornerPoly::of_const(0))));
  RingNormal fact = ring_normalize(parse_int("x * y + x"));
  CHECK(horner_eq(
      fact.poly,
      HornerPoly::horner(HornerPoly::horner(HornerPoly::of_const(1), 1, 1,
                                            HornerPoly::of_const(1)),
                         0, 1, HornerPoly::of_const(0))));
}

TEST_CASE("ring rejects unsupported input") {
  CHECK_THROWS_AS(ring_normalize(parse_int("x - y"), /*semiring=*/true),
                  ArithError);
  CHECK_THROWS_AS(
      ring_normalize(Term::op("neg", {Term::var("x", INT)}, INT), true),
      ArithError);
  CHECK_THROWS_AS(ring_normalize(Term::op("norm", {Term::var("x", INT)}, INT)),
                  ArithError);
  // non-literal and oversized exponents
  CHECK_THROWS_AS(ring_normalize(Term::op(
                      "^", {Term::var("x", INT), Term::var("n", NAT)}, INT)),
                  ArithError);
  CHECK_THROWS_AS(ring_normalize(Term::op("^",
                                          {Term::var("x", INT),
                                           Term::numeral(mpz_class(70000),
                                                         NAT)},
                                          INT)),
                  ArithError);
  // semiring mode still handles +, *, ^
  CHECK(ring_prove_eq(parse_int("(x + 1) * (x + 1)"),
                      parse_int("x^2 + 2 * x + 1"), true)
            .equal);
}

TEST_CASE("abel normalization matches coefficient counting") {
  Rng rng(1104);
  for (int trial = 0; trial < 500; ++trial) {
    TermPtr t = abel_term(rng, 4);
    std::map<std::string, mpz_class> coeffs;
    mpz_class konst = 0;
    abel_count(t, 1, coeffs, konst);
    for (auto it = coeffs.begin(); it != coeffs.end();)
      it = it->second == 0 ? coeffs.erase(it) : std::next(it);

    AbelNormal an = abel_normalize(t);
    CHECK(an.form.coeffs == coeffs);
    CHECK(an.form.constant == konst);

    // idempotent, and every step passes the axiom checker
    AbelNormal again = abel_normalize(an.canonical);
    CHECK(term_eq(again.canonical, an.canonical));
    CHECK(again.trace.steps.empty());
    TermPtr replayed = replay_ring_trace(an.trace);
    CHECK(term_eq(replayed, an.canonical));
  }
}

TEST_CASE("abel worked examples") {
  TermPtr a = Term::var("a", INT), b = Term::var("b", INT);
  AbelNormal d = abel_normalize(
      Term::op("-", {Term::op("+", {a, b}, INT), a}, INT));
  CHECK(d.form.coeffs == std::map<std::string, mpz_class>{{"b", 1}});
  CHECK(d.form.constant == 0);
  CHECK(format_term(d.canonical) == "b");

  AbelNormal s = abel_normalize(Term::op(
      "+", {Term::op("*.", {Term::numeral(mpz_class(2), INT), a}, INT), a},
      INT));
  CHECK(s.form.coeffs == std::map<std::string, mpz_class>{{"a", 3}});
  CHECK(format_term(s.canonical) == "3 *. a");

  // multiplication is not an abelian-group operation
  CHECK_THROWS_AS(abel_normalize(Term::op("*", {a, b}, INT)), ArithError);
  // scalar must be a literal
  CHECK_THROWS_AS(abel_normalize(Term::op("*.", {a, b}, INT)), ArithError);
}

TEST_CASE("literal evaluation matches exact bignum arithmetic") {
  Rng rng(1105);
  for (int trial = 0; trial < 1000; ++trial) {
    const Sort& sort = trial % 3 == 0 ? NAT : INT;
    TermPtr t = lit_term(rng, sort, 3, 256);
    mpz_class want = gmp_eval(t);
    NumResult r = norm_num_eval(t);
    CHECK(r.value.value() == want);
    std::string why;
    CHECK_MESSAGE(check_num_trace(r.trace, &why), why);
  }
  // variables and casts are not literal expressions
  CHECK_THROWS_AS(norm_num_eval(Term::op(
                      "*", {Term::numeral(mpz_class(0), INT),
                            Term::var("x", INT)},
                      INT)),
                  ArithError);
  CHECK_THROWS_AS(norm_num_eval(Term::op("^",
                                         {Term::numeral(mpz_class(2), INT),
                                          Term::numeral(mpz_class(70000),
                                                        NAT)},
                                         INT)),
                  ArithError);
}

TEST_CASE("literal relation decisions match exact comparison") {
  Rng rng(1106);
  const char* rels[] = {"=", "<", "<=", "!="};
  for (int trial = 0; trial < 100000; ++trial) {
    int bits = trial % 100 == 0 ? 256 : 12;
    mpz_class x = rand_big(rng, bits);
    mpz_class y = pick(rng, 0, 3) == 0 ? x : rand_big(rng, bits);
    if (pick(rng, 0, 1)) x = -x;
    if (pick(rng, 0, 1)) y = -y;
    const char* r = rels[trial % 4];
    bool want = r[0] == '=' ? x == y
                : r[0] == '!'
                    ? x != y
                    : (r[1] == '=' ? x <= y : x < y);
    NumProof pf = norm_num_prove(
        Term::rel(r, lit_of(x, INT), lit_of(y, INT)));
    CHECK(pf.proved == want);
    CHECK(pf.falsified == !want);
    CHECK(pf.lhs.value() == x);
    CHECK(pf.rhs.value() == y);
  }
}

TEST_CASE("numeral traces resist mutation and round-trip through JSON") {
  Rng rng(1107);
  int rejected = 0, total = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    TermPtr t = lit_term(rng, trial % 2 ? INT : NAT, 3, 24);
    NumResult r = norm_num_eval(t);
    REQUIRE(check_num_trace(r.trace));
    if (r.trace.judgments.empty()) continue;

    NumTrace bad = r.trace;
    std::size_t j = static_cast<std::size_t>(
        pick(rng, 0, static_cast<int>(bad.judgments.size()) - 1));
    NumJudgment& g = bad.judgments[j];
    ++total;
    switch (pick(rng, 0, 3)) {
      case 0:  // flip one result/operand bit
        if (g.op == "lt" || g.op == "le" || g.op == "eq")
          g.truth = !g.truth;
        else
          g.result[static_cast<std::size_t>(pick(
              rng, 0, static_cast<int>(g.result.size()) - 1))] =
              !g.result[static_cast<std::size_t>(pick(
                  rng, 0, static_cast<int>(g.result.size()) - 1))];
        break;
      case 1:
        g.lemma = "mul_zero";
        break;
      case 2:
        if (g.premises.empty())
          g.a[static_cast<std::size_t>(
              pick(rng, 0, static_cast<int>(g.a.size()) - 1))].flip();
        else
          g.premises.clear();
        break;
      default:
        std::swap(g.a, g.b);
        break;
    }
    // mutations that change nothing observable are skipped
    bool changed = !(g.lemma == r.trace.judgments[j].lemma &&
                     g.a == r.trace.judgments[j].a &&
                     g.b == r.trace.judgments[j].b &&
                     g.result == r.trace.judgments[j].result &&
                     g.truth == r.trace.judgments[j].truth &&
                     g.premises == r.trace.judgments[j].premises);
    if (!changed) {
      --total;
      continue;
    }
    if (!check_num_trace(bad)) ++rejected;
  }
  CHECK(total > 1000);
  // a few mutations can land on another valid derivation (e.g. swapping the
  // operands of a symmetric zero case); the vast majority must be caught
  CHECK(rejected * 100 >= total * 95);

  // JSON round-trip is loss-free
  NumProof pf = norm_num_prove(parse_int("100000000000000000001 * 3 = "
                                         "300000000000000000003"));
  CHECK(pf.proved);
  std::string text = num_trace_json(pf.trace);
  auto back = num_trace_of_json(text);
  REQUIRE(back.has_value());
  CHECK(num_trace_json(*back) == text);
  CHECK(check_num_trace(*back));
  CHECK_FALSE(num_trace_of_json("{ not json").has_value());
  CHECK_FALSE(num_trace_of_json("{\"judgments\":[]}").has_value());
}

TEST_CASE("norm_num worked examples") {
  NumResult three = norm_num_eval(parse_int("1 + 2"));
  CHECK(three.value.value() == 3);
  bool saw_add = false;
  for (const auto& g : three.trace.judgments)
    if (g.op == "add" && mpz_of_bits(g.result) == 3) saw_add = true;
  CHECK(saw_add);

  NumProof lt = norm_num_prove(parse_int("1 + 2 < 4"));
  CHECK(lt.proved);
  CHECK(lt.envelope.kind == "norm_num");
  CHECK(lt.envelope.terminal == "literal_truth");
  auto payload = num_trace_of_json(lt.envelope.payload);
  REQUIRE(payload.has_value());
  CHECK(check_num_trace(*payload));
  CHECK(payload->rel_truth);

  CHECK(norm_num_prove(parse_int("1 + 2 = 4")).falsified);

  // nat subtraction truncates at zero
  TermPtr monus = Term::op("-",
                           {Term::numeral(mpz_class(3), NAT),
                            Term::numeral(mpz_class(7), NAT)},
                           NAT);
  CHECK(norm_num_eval(monus).value.value() == 0);
  // same shape over int goes negative
  TermPtr isub = Term::op("-",
                          {Term::numeral(mpz_class(3), INT),
                           Term::numeral(mpz_class(7), INT)},
                          INT);
  NumResult neg = norm_num_eval(isub);
  CHECK(neg.value.value() == -4);
  CHECK(neg.value.negative);
}
