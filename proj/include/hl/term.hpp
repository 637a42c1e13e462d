#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

#include "hl/sort.hpp"

namespace hl {

// Little-endian bit list, canonical: no trailing (most significant) zero bit,
// except the single-bit representation of zero.
using Bits = std::vector<bool>;

Bits bits_of_mpz(const mpz_class& n);     // n >= 0
mpz_class mpz_of_bits(const Bits& bits);
bool bits_canonical(const Bits& bits);
Bits canonicalize_bits(Bits bits);

class Term;
using TermPtr = std::shared_ptr<const Term>;

// First-order term: variables, operator applications, binary numerals,
// coercions between sorts, and relational atoms.
class Term {
public:
  enum class Kind { Var, Op, Numeral, Coerce, Rel };

  static TermPtr var(std::string name, Sort sort);
  static TermPtr op(std::string symbol, std::vector<TermPtr> args, Sort sort);
  static TermPtr numeral(Bits bits, Sort sort);
  static TermPtr numeral(const mpz_class& value, Sort sort);
  // source sort is arg->sort(); requires source != target.
  static TermPtr coerce(Sort target, TermPtr arg);
  static TermPtr rel(std::string symbol, TermPtr lhs, TermPtr rhs);

  Kind kind() const { return kind_; }
  const std::string& symbol() const { return symbol_; }  // Var name / Op / Rel
  const std::vector<TermPtr>& args() const { return args_; }
  const Bits& bits() const { return bits_; }
  mpz_class value() const { return mpz_of_bits(bits_); }
  const Sort& sort() const { return sort_; }
  const Sort& coerce_source() const { return args_[0]->sort(); }
  const Sort& coerce_target() const { return sort_; }

  bool is_var() const { return kind_ == Kind::Var; }
  bool is_op(const std::string& sym) const {
    return kind_ == Kind::Op && symbol_ == sym;
  }
  bool is_numeral() const { return kind_ == Kind::Numeral; }

  std::size_t hash() const { return hash_; }

private:
  Term() = default;
  Kind kind_{};
  std::string symbol_;
  std::vector<TermPtr> args_;
  Bits bits_;
  Sort sort_ = Sort::prop();
  std::size_t hash_ = 0;
  static TermPtr finish(std::unique_ptr<Term> t);
};

bool term_eq(const TermPtr& a, const TermPtr& b);

// Deterministic textual form; parse_term inverts it on well-sorted terms.
std::string format_term(const TermPtr& t);

// Relation symbols. ">" and ">=" are parsed but normalized away by flipping.
bool is_rel_symbol(const std::string& s);

struct TermHash {
  std::size_t operator()(const TermPtr& t) const { return t->hash(); }
};
struct TermEq {
  bool operator()(const TermPtr& a, const TermPtr& b) const {
    return term_eq(a, b);
  }
};

}  // namespace hl
