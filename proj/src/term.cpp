#include "hl/term.hpp"

#include <cassert>
#include <functional>
#include <stdexcept>

namespace hl {

Bits bits_of_mpz(const mpz_class& n) {
  assert(n >= 0);
  if (n == 0) return {false};
  Bits bits;
  mpz_class v = n;
  while (v > 0) {
    bits.push_back(mpz_odd_p(v.get_mpz_t()) != 0);
    v >>= 1;
  }
  return bits;
}

mpz_class mpz_of_bits(const Bits& bits) {
  mpz_class v = 0;
  for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
    v <<= 1;
    if (*it) v += 1;
  }
  return v;
}

bool bits_canonical(const Bits& bits) {
  if (bits.empty()) return false;
  if (bits.size() == 1) return true;
  return bits.back();
}

Bits canonicalize_bits(Bits bits) {
  while (bits.size() > 1 && !bits.back()) bits.pop_back();
  if (bits.empty()) bits.push_back(false);
  return bits;
}

namespace {

std::size_t combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t sort_hash(const Sort& s) {
  switch (s.kind()) {
    case Sort::Kind::Prop: return 3;
    case Sort::Kind::Carrier: return combine(5, std::hash<std::string>{}(s.name()));
    case Sort::Kind::Arrow:
      return combine(combine(7, sort_hash(s.domain())), sort_hash(s.codomain()));
  }
  return 0;
}

}  // namespace

TermPtr Term::finish(std::unique_ptr<Term> t) {
  std::size_t h = combine(static_cast<std::size_t>(t->kind_) + 11,
                          std::hash<std::string>{}(t->symbol_));
  for (const auto& a : t->args_) h = combine(h, a->hash());
  for (bool b : t->bits_) h = combine(h, b ? 2 : 1);
  h = combine(h, sort_hash(t->sort_));
  t->hash_ = h;
  return TermPtr(t.release());
}

TermPtr Term::var(std::string name, Sort sort) {
  auto t = std::unique_ptr<Term>(new Term());
  t->kind_ = Kind::Var;
  t->symbol_ = std::move(name);
  t->sort_ = std::move(sort);
  return finish(std::move(t));
}

TermPtr Term::op(std::string symbol, std::vector<TermPtr> args, Sort sort) {
  auto t = std::unique_ptr<Term>(new Term());
  t->kind_ = Kind::Op;
  t->symbol_ = std::move(symbol);
  t->args_ = std::move(args);
  t->sort_ = std::move(sort);
  return finish(std::move(t));
}

TermPtr Term::numeral(Bits bits, Sort sort) {
  if (!bits_canonical(bits)) throw std::invalid_argument("non-canonical numeral");
  auto t = std::unique_ptr<Term>(new Term());
  t->kind_ = Kind::Numeral;
  t->bits_ = std::move(bits);
  t->sort_ = std::move(sort);
  return finish(std::move(t));
}

TermPtr Term::numeral(const mpz_class& value, Sort sort) {
  return numeral(bits_of_mpz(value), std::move(sort));
}

TermPtr Term::coerce(Sort target, TermPtr arg) {
  if (target == arg->sort()) throw std::invalid_argument("trivial coercion");
  auto t = std::unique_ptr<Term>(new Term());
  t->kind_ = Kind::Coerce;
  t->args_ = {std::move(arg)};
  t->sort_ = std::move(target);
  return finish(std::move(t));
}

TermPtr Term::rel(std::string symbol, TermPtr lhs, TermPtr rhs) {
  if (!is_rel_symbol(symbol)) throw std::invalid_argument("bad relation " + symbol);
  auto t = std::unique_ptr<Term>(new Term());
  t->kind_ = Kind::Rel;
  t->symbol_ = std::move(symbol);
  t->args_ = {std::move(lhs), std::move(rhs)};
  t->sort_ = Sort::prop();
  return finish(std::move(t));
}

bool is_rel_symbol(const std::string& s) {
  return s == "=" || s == "<=" || s == "<" || s == "!=" || s == "|";
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->hash() != b->hash()) return false;
  if (a->kind() != b->kind() || a->symbol() != b->symbol()) return false;
  if (a->bits() != b->bits()) return false;
  if (!(a->sort() == b->sort())) return false;
  if (a->args().size() != b->args().size()) return false;
  for (std::size_t i = 0; i < a->args().size(); ++i)
    if (!term_eq(a->args()[i], b->args()[i])) return false;
  return true;
}

namespace {

// Precedence levels; see docs/grammar.md.
constexpr int kRel = 10;
constexpr int kAdd = 30;
constexpr int kComp = 35;
constexpr int kMul = 40;
constexpr int kPrefix = 50;
constexpr int kPow = 60;
constexpr int kApp = 70;

struct InfixInfo {
  int prec;
  bool right_assoc;
};

bool infix_info(const std::string& sym, InfixInfo& out) {
  if (sym == "+" || sym == "-") { out = {kAdd, false}; return true; }
  if (sym == ">>") { out = {kComp, true}; return true; }
  if (sym == "*" || sym == "*.") { out = {kMul, false}; return true; }
  if (sym == "^") { out = {kPow, true}; return true; }
  return false;
}

void fmt(const TermPtr& t, int parent_prec, std::string& out);

void fmt_infix(const TermPtr& t, const InfixInfo& info, int parent_prec,
               std::string& out) {
  bool paren = info.prec < parent_prec;
  if (paren) out += "(";
  fmt(t->args()[0], info.right_assoc ? info.prec + 1 : info.prec, out);
  out += " " + t->symbol() + " ";
  fmt(t->args()[1], info.right_assoc ? info.prec : info.prec + 1, out);
  if (paren) out += ")";
}

void fmt(const TermPtr& t, int parent_prec, std::string& out) {
  switch (t->kind()) {
    case Term::Kind::Var:
      out += t->symbol();
      return;
    case Term::Kind::Numeral:
      out += mpz_of_bits(t->bits()).get_str();
      return;
    case Term::Kind::Coerce: {
      bool paren = kPrefix < parent_prec;
      if (paren) out += "(";
      out += "^^";
      fmt(t->args()[0], kPrefix + 1, out);
      if (paren) out += ")";
      return;
    }
    case Term::Kind::Rel: {
      bool paren = kRel < parent_prec;
      if (paren) out += "(";
      fmt(t->args()[0], kRel + 1, out);
      out += " " + t->symbol() + " ";
      fmt(t->args()[1], kRel + 1, out);
      if (paren) out += ")";
      return;
    }
    case Term::Kind::Op: {
      InfixInfo info;
      if (t->args().size() == 2 && infix_info(t->symbol(), info)) {
        fmt_infix(t, info, parent_prec, out);
        return;
      }
      if (t->symbol() == "neg" && t->args().size() == 1) {
        bool paren = kPrefix < parent_prec;
        if (paren) out += "(";
        out += "-";
        fmt(t->args()[0], kPrefix + 1, out);
        if (paren) out += ")";
        return;
      }
      if (t->symbol() == "norm" && t->args().size() == 1) {
        out += "||";
        fmt(t->args()[0], 0, out);
        out += "||";
        return;
      }
      if (t->symbol() == "app" && t->args().size() == 2) {
        fmt(t->args()[0], kApp, out);
        out += "(";
        fmt(t->args()[1], 0, out);
        out += ")";
        return;
      }
      out += t->symbol();
      if (!t->args().empty()) {
        out += "(";
        for (std::size_t i = 0; i < t->args().size(); ++i) {
          if (i) out += ", ";
          fmt(t->args()[i], 0, out);
        }
        out += ")";
      }
      return;
    }
  }
}

}  // namespace

std::string format_term(const TermPtr& t) {
  std::string out;
  fmt(t, 0, out);
  return out;
}

}  // namespace hl
