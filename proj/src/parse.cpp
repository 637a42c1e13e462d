#include "hl/parse.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

namespace hl {

namespace {

// ASCII aliases for the unicode notation; applied before lexing.
const std::pair<const char*, const char*> kAliases[] = {
    {"↑", "^^"},  // ↑
    {"≤", "<="},  // ≤
    {"≥", ">="},  // ≥
    {"≠", "!="},  // ≠
    {"∣", "|"},   // ∣
    {"≫", ">>"},  // ≫  (mathematical much-greater-than)
    {"≧", ">>"},
    {"⪰", ">>"},
    {"•", "*."},  // •
    {"∥", "||"},  // ∥
    {"→", "->"},  // →
    {"←", "<-"},  // ←
};

std::string apply_aliases(std::string s) {
  for (const auto& [from, to] : kAliases) {
    std::size_t pos = 0;
    std::string f = from;
    while ((pos = s.find(f, pos)) != std::string::npos) {
      s.replace(pos, f.size(), to);
      pos += std::string(to).size();
    }
  }
  return s;
}

struct Token {
  enum Kind { Ident, Number, Sym, End } kind = End;
  std::string text;
  Position pos;
};

class Lexer {
public:
  Lexer(const std::string& text, int line) : text_(text), line_(line) { next(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    next();
    return t;
  }
  bool at_end() const { return tok_.kind == Token::End; }
  Position pos() const { return tok_.pos; }

private:
  void next() {
    while (i_ < text_.size() &&
           (std::isspace(static_cast<unsigned char>(text_[i_])) ||
            text_[i_] == '{' || text_[i_] == '}'))
      ++i_;
    tok_.pos = {line_, static_cast<int>(i_) + 1};
    if (i_ >= text_.size()) {
      tok_ = {Token::End, "", tok_.pos};
      return;
    }
    char c = text_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[j])) ||
              text_[j] == '_' || text_[j] == '\''))
        ++j;
      tok_ = {Token::Ident, text_.substr(i_, j - i_), tok_.pos};
      i_ = j;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j])))
        ++j;
      tok_ = {Token::Number, text_.substr(i_, j - i_), tok_.pos};
      i_ = j;
      return;
    }
    static const char* two[] = {"->", "<-", "<=", ">=", "!=", "||",
                                "^^", ">>", "*."};
    for (const char* s : two) {
      if (text_.compare(i_, 2, s) == 0) {
        tok_ = {Token::Sym, s, tok_.pos};
        i_ += 2;
        return;
      }
    }
    static const std::string singles = "()[]:,=<>|^+-*/";
    if (singles.find(c) != std::string::npos) {
      tok_ = {Token::Sym, std::string(1, c), tok_.pos};
      ++i_;
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'",
                     tok_.pos);
  }

  std::string text_;
  std::size_t i_ = 0;
  int line_;
  Token tok_;
};

struct Attr {
  std::string name;
  std::vector<Token> args;
};

class DeclParser {
public:
  DeclParser(Lexer& lx, Env& env) : lx_(lx), env_(env) {}

  // ---- terms -------------------------------------------------------------

  TermPtr parse_relation(const std::optional<Sort>& expected, TermContext& ctx) {
    TermPtr lhs = parse_add(expected, ctx);
    if (lx_.peek().kind == Token::Sym) {
      std::string s = lx_.peek().text;
      if (s == "=" || s == "<=" || s == "<" || s == ">=" || s == ">" ||
          s == "!=" || s == "|") {
        lx_.take();
        // prop-sorted sides (iff-style equations) put no expectation on the
        // other side; carrier sides expect a matching carrier.
        std::optional<Sort> rhs_expect;
        if (!lhs->sort().is_prop()) rhs_expect = lhs->sort();
        TermPtr rhs = parse_add(rhs_expect, ctx);
        if (s == ">") return Term::rel("<", rhs, lhs);
        if (s == ">=") return Term::rel("<=", rhs, lhs);
        return Term::rel(s, lhs, rhs);
      }
    }
    return lhs;
  }

  TermPtr parse_add(const std::optional<Sort>& expected, TermContext& ctx) {
    TermPtr t = parse_comp(expected, ctx);
    while (lx_.peek().kind == Token::Sym &&
           (lx_.peek().text == "+" || lx_.peek().text == "-")) {
      std::string s = lx_.take().text;
      TermPtr rhs = parse_comp(t->sort(), ctx);
      t = Term::op(s, {t, rhs}, t->sort());
    }
    return t;
  }

  TermPtr parse_comp(const std::optional<Sort>& expected, TermContext& ctx) {
    TermPtr t = parse_mul(expected, ctx);
    if (lx_.peek().kind == Token::Sym && lx_.peek().text == ">>") {
      Position p = lx_.pos();
      lx_.take();
      if (!comp_op_) throw ParseError("no operator declared [assoc]", p);
      TermPtr rhs = parse_comp(t->sort(), ctx);
      return Term::op(*comp_op_, {t, rhs}, t->sort());
    }
    return t;
  }

  TermPtr parse_mul(const std::optional<Sort>& expected, TermContext& ctx) {
    TermPtr t = parse_prefix(expected, ctx);
    while (lx_.peek().kind == Token::Sym &&
           (lx_.peek().text == "*" || lx_.peek().text == "*.")) {
      std::string s = lx_.take().text;
      TermPtr rhs = parse_prefix(t->sort(), ctx);
      t = Term::op(s, {t, rhs}, s == "*." ? rhs->sort() : t->sort());
    }
    return t;
  }

  TermPtr parse_prefix(const std::optional<Sort>& expected, TermContext& ctx) {
    if (lx_.peek().kind == Token::Sym && lx_.peek().text == "-") {
      lx_.take();
      TermPtr a = parse_prefix(expected, ctx);
      return Term::op("neg", {a}, a->sort());
    }
    if (lx_.peek().kind == Token::Sym && lx_.peek().text == "^^") {
      Position p = lx_.pos();
      lx_.take();
      Sort target = expected.value_or(ctx.ambient);
      // When exactly one coercion lands on the target sort, its source is
      // the default expectation for the operand.
      std::optional<Sort> operand_expected;
      if (target.is_carrier()) {
        std::string src;
        int count = 0;
        for (const auto& c : env_.coes())
          if (c.target == target.name()) {
            src = c.source;
            ++count;
          }
        if (count == 1) operand_expected = Sort::carrier(src);
      }
      TermPtr a = parse_prefix(operand_expected, ctx);
      if (target == a->sort())
        throw ParseError("coercion from a sort to itself", p);
      if (target.is_carrier() && a->sort().is_carrier() &&
          !env_.has_coe(a->sort().name(), target.name()))
        throw ParseError("no coercion " + a->sort().str() + " -> " +
                             target.str(),
                         p);
      return Term::coerce(target, a);
    }
    return parse_pow(expected, ctx);
  }

  TermPtr parse_pow(const std::optional<Sort>& expected, TermContext& ctx) {
    TermPtr base = parse_app(expected, ctx);
    if (lx_.peek().kind == Token::Sym && lx_.peek().text == "^") {
      lx_.take();
      // Exponents live in nat regardless of the base sort.
      TermPtr exp = parse_prefix(Sort::carrier("nat"), ctx);
      return Term::op("^", {base, exp}, base->sort());
    }
    return base;
  }

  TermPtr parse_app(const std::optional<Sort>& expected, TermContext& ctx) {
    TermPtr t = parse_primary(expected, ctx);
    while (lx_.peek().kind == Token::Sym && lx_.peek().text == "(") {
      Position p = lx_.pos();
      lx_.take();
      TermPtr arg;
      if (t->sort().is_arrow()) {
        arg = parse_relation(t->sort().domain(), ctx);
      } else {
        arg = parse_relation(std::nullopt, ctx);
      }
      expect(")", "function application");
      Sort fs = t->sort();
      if (!fs.is_arrow()) {
        // Nullary projections applied pointwise: c(x) where c has a carrier
        // sort denotes the application of the constant function.
        if (t->kind() == Term::Kind::Op && t->args().empty()) {
          t = Term::op("app", {t, arg}, t->sort());
          continue;
        }
        throw ParseError("applied term has sort " + fs.str() +
                             ", not a function sort",
                         p);
      }
      if (!(fs.domain() == arg->sort()))
        throw ParseError("argument sort " + arg->sort().str() +
                             " does not match domain " + fs.domain().str(),
                         p);
      t = Term::op("app", {t, arg}, fs.codomain());
    }
    return t;
  }

  TermPtr parse_primary(const std::optional<Sort>& expected, TermContext& ctx) {
    Token tok = lx_.peek();
    if (tok.kind == Token::Number) {
      lx_.take();
      Sort s = expected.value_or(ctx.ambient);
      if (!s.is_carrier())
        throw ParseError("numeral at non-carrier sort " + s.str(), tok.pos);
      return Term::numeral(mpz_class(tok.text), s);
    }
    if (tok.kind == Token::Sym && tok.text == "||") {
      lx_.take();
      TermPtr a = parse_add(expected, ctx);
      expect("||", "norm");
      return Term::op("norm", {a}, a->sort());
    }
    if (tok.kind == Token::Sym && tok.text == "(") {
      lx_.take();
      TermPtr t = parse_relation(expected, ctx);
      if (lx_.peek().kind == Token::Sym && lx_.peek().text == ":") {
        Position p = lx_.take().pos;
        if (!t->is_var())
          throw ParseError("sort annotation on a non-variable", p);
        Sort s = parse_sort();
        auto it = ctx.bound.find(t->symbol());
        if (it != ctx.bound.end() && !(it->second == s))
          throw ParseError("conflicting sorts for variable '" + t->symbol() +
                               "'",
                           p);
        ctx.bound.insert_or_assign(t->symbol(), s);
        t = Term::var(t->symbol(), s);
      }
      expect(")", "parenthesized term");
      return t;
    }
    if (tok.kind == Token::Ident) {
      lx_.take();
      const std::string& name = tok.text;
      if (const OpDecl* op = env_.find_op(name)) {
        if (op->arity == 0)
          return Term::op(name, {}, expected.value_or(ctx.ambient));
        if (lx_.peek().kind == Token::Sym && lx_.peek().text == "(") {
          lx_.take();
          std::vector<TermPtr> args;
          Sort result = expected.value_or(ctx.ambient);
          for (int i = 0; i < op->arity; ++i) {
            if (i) expect(",", "operator arguments");
            args.push_back(parse_relation(result, ctx));
          }
          expect(")", "operator arguments");
          return Term::op(name, std::move(args), result);
        }
        throw ParseError("operator '" + name + "' expects " +
                             std::to_string(op->arity) + " argument(s)",
                         tok.pos);
      }
      auto it = ctx.bound.find(name);
      if (it != ctx.bound.end()) {
        if (expected && !(*expected == it->second) &&
            !(lx_.peek().kind == Token::Sym && lx_.peek().text == ":"))
          throw ParseError("variable '" + name + "' has sort " +
                               it->second.str() + ", expected " +
                               expected->str(),
                           tok.pos);
        return Term::var(name, it->second);
      }
      if (!ctx.pattern_mode)
        throw ParseError("unbound variable '" + name + "'", tok.pos);
      Sort s = expected.value_or(ctx.ambient);
      ctx.bound.emplace(name, s);
      return Term::var(name, s);
    }
    throw ParseError("expected a term", tok.pos);
  }

  Sort parse_sort() {
    Sort s = parse_sort_primary();
    if (lx_.peek().kind == Token::Sym && lx_.peek().text == "->") {
      lx_.take();
      return Sort::arrow(s, parse_sort());
    }
    return s;
  }

  Sort parse_sort_primary() {
    Token tok = lx_.take();
    if (tok.kind == Token::Sym && tok.text == "(") {
      Sort s = parse_sort();
      expect(")", "sort");
      return s;
    }
    if (tok.kind != Token::Ident)
      throw ParseError("expected a sort", tok.pos);
    if (tok.text == "prop") return Sort::prop();
    if (!env_.has_sort(tok.text))
      throw ParseError("unknown sort '" + tok.text + "'", tok.pos);
    return Sort::carrier(tok.text);
  }

  // ---- class atoms -------------------------------------------------------

  Carrier parse_carrier() {
    Carrier c = parse_carrier_primary();
    if (lx_.peek().kind == Token::Sym && lx_.peek().text == "->") {
      lx_.take();
      return Carrier::arrow(c, parse_carrier());
    }
    return c;
  }

  Carrier parse_carrier_primary() {
    Token tok = lx_.take();
    if (tok.kind == Token::Sym && tok.text == "(") {
      Carrier c = parse_carrier();
      expect(")", "carrier");
      return c;
    }
    if (tok.kind != Token::Ident)
      throw ParseError("expected a carrier", tok.pos);
    if (env_.has_sort(tok.text)) return Carrier::constant(tok.text);
    return Carrier::var(tok.text);
  }

  ClassAtom parse_atom() {
    Token tok = lx_.take();
    if (tok.kind != Token::Ident)
      throw ParseError("expected a class name", tok.pos);
    ClassAtom atom;
    atom.cls = tok.text;
    expect("(", "class atom");
    atom.args.push_back(parse_carrier());
    while (lx_.peek().kind == Token::Sym && lx_.peek().text == ",") {
      lx_.take();
      atom.args.push_back(parse_carrier());
    }
    expect(")", "class atom");
    return atom;
  }

  // ---- helpers -----------------------------------------------------------

  void expect(const std::string& sym, const std::string& what) {
    Token tok = lx_.take();
    if (tok.kind == Token::End || tok.text != sym)
      throw ParseError("expected '" + sym + "' in " + what +
                           (tok.kind == Token::End ? " (line end)"
                                                   : ", got '" + tok.text + "'"),
                       tok.pos);
  }

  std::string expect_ident(const std::string& what) {
    Token tok = lx_.take();
    if (tok.kind != Token::Ident)
      throw ParseError("expected identifier in " + what, tok.pos);
    return tok.text;
  }

  void set_comp_op(std::optional<std::string> op) { comp_op_ = std::move(op); }
  const std::optional<std::string>& comp_op() const { return comp_op_; }

  Lexer& lx_;
  Env& env_;
  std::optional<std::string> comp_op_;
};

struct LogicalLine {
  std::string text;
  int line = 0;
  std::optional<std::string> doc;
};

std::vector<LogicalLine> assemble(const std::string& source) {
  std::vector<LogicalLine> out;
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : source) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    lines.push_back(cur);
  }
  std::optional<std::string> pending_doc;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string t = apply_aliases(lines[i]);
    if (auto h = t.find('#'); h != std::string::npos) t = t.substr(0, h);
    std::string trimmed = t;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.rfind("///", 0) == 0) {
      std::string d = trimmed.substr(3);
      if (!d.empty() && d[0] == ' ') d = d.substr(1);
      pending_doc = pending_doc ? *pending_doc + "\n" + d : d;
      continue;
    }
    if (trimmed.find_first_not_of(" \t") == std::string::npos) continue;
    LogicalLine ll;
    ll.line = static_cast<int>(i) + 1;
    ll.text = t;
    ll.doc = pending_doc;
    pending_doc.reset();
    long depth = std::count(t.begin(), t.end(), '{') -
                 std::count(t.begin(), t.end(), '}');
    while (depth > 0 && i + 1 < lines.size()) {
      ++i;
      std::string cont = apply_aliases(lines[i]);
      if (auto h = cont.find('#'); h != std::string::npos)
        cont = cont.substr(0, h);
      depth += std::count(cont.begin(), cont.end(), '{') -
               std::count(cont.begin(), cont.end(), '}');
      ll.text += " " + cont;
    }
    if (depth != 0)
      throw ParseError("unbalanced braces", Position{ll.line, 1});
    out.push_back(std::move(ll));
  }
  return out;
}

const char* kTactics[] = {"resolve",  "ring",     "abel", "linarith",
                          "norm_num", "norm_cast", "simp", "dsimp",
                          "dec_trivial"};

bool is_tactic(const std::string& s) {
  for (const char* t : kTactics)
    if (s == t) return true;
  return false;
}

}  // namespace

std::vector<Declaration> parse_decls(const std::string& source) {
  std::vector<Declaration> decls;
  Env env;  // grows as we parse so later lines can reference earlier names
  std::optional<std::string> assoc_op;
  for (const auto& ll : assemble(source)) {
    Lexer lx(ll.text, ll.line);
    DeclParser p(lx, env);
    p.set_comp_op(assoc_op);

    std::vector<Attr> attrs;
    if (lx.peek().kind == Token::Sym && lx.peek().text == "[") {
      lx.take();
      while (true) {
        Attr a;
        a.name = p.expect_ident("attribute");
        while (!(lx.peek().kind == Token::Sym &&
                 (lx.peek().text == "," || lx.peek().text == "]")))
          a.args.push_back(lx.take());
        attrs.push_back(std::move(a));
        if (lx.peek().text == ",") {
          lx.take();
          continue;
        }
        p.expect("]", "attributes");
        break;
      }
    }
    auto find_attr = [&](const std::string& n) -> const Attr* {
      for (const auto& a : attrs)
        if (a.name == n) return &a;
      return nullptr;
    };

    TermContext ctx;
    if (const Attr* over = find_attr("over")) {
      if (over->args.size() != 1 || over->args[0].kind != Token::Ident)
        throw ParseError("[over S] expects one sort name", Position{ll.line, 1});
      if (over->args[0].text == "prop")
        throw ParseError("[over S] expects a carrier sort", Position{ll.line, 1});
      if (!env.has_sort(over->args[0].text))
        throw ParseError("unknown sort '" + over->args[0].text + "'",
                         Position{ll.line, 1});
      ctx.ambient = Sort::carrier(over->args[0].text);
    }

    Token kw = lx.take();
    if (kw.kind != Token::Ident)
      throw ParseError("expected a declaration keyword", kw.pos);

    auto parse_hyps = [&](std::vector<Hypothesis>& hyps) {
      while (lx.peek().kind == Token::Sym && lx.peek().text == "(") {
        lx.take();
        Hypothesis h;
        h.name = p.expect_ident("hypothesis");
        p.expect(":", "hypothesis");
        h.statement = p.parse_relation(std::nullopt, ctx);
        p.expect(")", "hypothesis");
        hyps.push_back(std::move(h));
      }
    };

    auto finish = [&](Declaration d) {
      env.add(d);
      decls.push_back(std::move(d));
    };

    if (kw.text == "sort") {
      SortDecl d{p.expect_ident("sort declaration"), ll.doc, kw.pos};
      finish(d);
    } else if (kw.text == "op") {
      OpDecl d;
      Token sym = lx.take();
      if (sym.kind == Token::End)
        throw ParseError("expected operator symbol", sym.pos);
      d.symbol = sym.text;
      Token ar = lx.take();
      if (ar.kind != Token::Number)
        throw ParseError("expected operator arity", ar.pos);
      d.arity = std::stoi(ar.text);
      d.assoc = find_attr("assoc") != nullptr;
      d.doc = ll.doc;
      d.pos = kw.pos;
      if (d.assoc) {
        if (d.arity != 2)
          throw ParseError("[assoc] operator must be binary", kw.pos);
        assoc_op = d.symbol;
      }
      finish(d);
    } else if (kw.text == "coe") {
      CoeDecl d;
      d.source = p.expect_ident("coercion");
      d.target = p.expect_ident("coercion");
      d.pos = kw.pos;
      finish(d);
    } else if (kw.text == "class") {
      ClassDecl d;
      d.name = p.expect_ident("class declaration");
      d.doc = ll.doc;
      d.pos = kw.pos;
      p.expect("(", "class parameters");
      int arity = 1;
      p.expect_ident("class parameters");
      while (lx.peek().kind == Token::Sym && lx.peek().text == ",") {
        lx.take();
        p.expect_ident("class parameters");
        ++arity;
      }
      p.expect(")", "class parameters");
      d.arity = arity;
      if (lx.peek().kind == Token::Ident && lx.peek().text == "ops") {
        lx.take();
        p.expect("(", "projections");
        while (true) {
          Projection proj;
          Token sym = lx.take();
          if (sym.kind == Token::End)
            throw ParseError("expected projection symbol", sym.pos);
          proj.symbol = sym.text;
          p.expect("/", "projection arity");
          Token ar = lx.take();
          if (ar.kind != Token::Number)
            throw ParseError("expected projection arity", ar.pos);
          proj.arity = std::stoi(ar.text);
          d.projections.push_back(std::move(proj));
          if (lx.peek().text == ",") {
            lx.take();
            continue;
          }
          p.expect(")", "projections");
          break;
        }
      }
      finish(d);
    } else if (kw.text == "instance") {
      InstanceRule d;
      d.name = p.expect_ident("instance declaration");
      d.doc = ll.doc;
      d.pos = kw.pos;
      if (const Attr* pr = find_attr("priority")) {
        if (pr->args.size() != 1 || pr->args[0].kind != Token::Number)
          throw ParseError("[priority N] expects a number", kw.pos);
        d.priority = std::stoi(pr->args[0].text);
      }
      p.expect(":", "instance declaration");
      d.head = p.parse_atom();
      if (lx.peek().kind == Token::Sym && lx.peek().text == "<-") {
        lx.take();
        d.body.push_back(p.parse_atom());
        while (lx.peek().kind == Token::Sym && lx.peek().text == ",") {
          lx.take();
          d.body.push_back(p.parse_atom());
        }
      }
      finish(d);
    } else if (kw.text == "simp" || kw.text == "def" ||
               (kw.text == "lemma" &&
                (find_attr("norm_cast_move") || find_attr("norm_cast_elim") ||
                 find_attr("simp") || find_attr("def")))) {
      RuleKind kind = RuleKind::Simp;
      if (kw.text == "simp" || kw.text == "def") {
        Token lm = lx.take();
        if (lm.kind != Token::Ident || lm.text != "lemma")
          throw ParseError("expected 'lemma' after '" + kw.text + "'", lm.pos);
        kind = kw.text == "def" ? RuleKind::Def : RuleKind::Simp;
      } else if (find_attr("norm_cast_move")) {
        kind = RuleKind::CastMove;
      } else if (find_attr("norm_cast_elim")) {
        kind = RuleKind::CastElim;
      } else if (find_attr("def")) {
        kind = RuleKind::Def;
      }
      RewriteRule d;
      d.kind = kind;
      d.name = p.expect_ident("rewrite rule");
      d.doc = ll.doc;
      d.pos = kw.pos;
      p.expect(":", "rewrite rule");
      TermPtr eq = p.parse_relation(std::nullopt, ctx);
      if (eq->kind() != Term::Kind::Rel || eq->symbol() != "=")
        throw ParseError("rewrite rule statement must be an equation", kw.pos);
      d.lhs = eq->args()[0];
      d.rhs = eq->args()[1];
      if (lx.peek().kind == Token::Ident && lx.peek().text == "if") {
        lx.take();
        d.conditions.push_back(p.parse_atom());
        while (lx.peek().kind == Token::Sym && lx.peek().text == ",") {
          lx.take();
          d.conditions.push_back(p.parse_atom());
        }
      }
      finish(d);
    } else if (kw.text == "lemma") {
      Lemma d;
      d.name = p.expect_ident("lemma");
      d.doc = ll.doc;
      d.pos = kw.pos;
      for (const auto& a : attrs) d.attributes.push_back(a.name);
      parse_hyps(d.hypotheses);
      p.expect(":", "lemma");
      d.statement = p.parse_relation(std::nullopt, ctx);
      finish(d);
    } else if (kw.text == "goal") {
      GoalDecl d;
      d.name = p.expect_ident("goal");
      d.doc = ll.doc;
      d.pos = kw.pos;
      d.tactic = "resolve";
      for (const auto& a : attrs)
        if (is_tactic(a.name)) d.tactic = a.name;
      parse_hyps(d.hypotheses);
      p.expect(":", "goal");
      // Class-atom goals: "name(carrier, ...)" with name a declared class.
      if (lx.peek().kind == Token::Ident && env.find_class(lx.peek().text)) {
        d.class_goal = p.parse_atom();
        d.tactic = "resolve";
      } else {
        d.statement = p.parse_relation(std::nullopt, ctx);
      }
      finish(d);
    } else {
      throw ParseError("unknown declaration keyword '" + kw.text + "'", kw.pos);
    }
    if (!lx.at_end())
      throw ParseError("trailing input after declaration: '" +
                           lx.peek().text + "'",
                       lx.pos());
  }
  return decls;
}

Env parse_env(const std::string& source) {
  return env_of_decls(parse_decls(source));
}

TermPtr parse_term(const std::string& source, const Env& env, TermContext& ctx) {
  Lexer lx(apply_aliases(source), 1);
  Env& e = const_cast<Env&>(env);  // parser only reads
  DeclParser p(lx, e);
  for (const auto& o : env.ops())
    if (o.assoc) p.set_comp_op(o.symbol);
  TermPtr t = p.parse_relation(std::nullopt, ctx);
  if (!lx.at_end())
    throw ParseError("trailing input after term: '" + lx.peek().text + "'",
                     lx.pos());
  return t;
}

TermPtr parse_term(const std::string& source, const Env& env) {
  TermContext ctx;
  return parse_term(source, env, ctx);
}

ClassAtom parse_class_atom(const std::string& source, const Env& env) {
  Lexer lx(apply_aliases(source), 1);
  Env& e = const_cast<Env&>(env);
  DeclParser p(lx, e);
  ClassAtom a = p.parse_atom();
  if (!lx.at_end())
    throw ParseError("trailing input after class atom", lx.pos());
  if (!env.find_class(a.cls))
    throw ParseError("unknown class '" + a.cls + "'", Position{1, 1});
  return a;
}

}  // namespace hl
