#pragma once

#include <map>
#include <string>
#include <vector>

#include "hl/decl.hpp"

namespace hl {

struct ParseError : std::runtime_error {
  Position pos;
  ParseError(std::string msg, Position p)
      : std::runtime_error(msg + " (line " + std::to_string(p.line) +
                           ", column " + std::to_string(p.column) + ")"),
        pos(p) {}
};

// Parses a .hl source text into declarations, in source order.
std::vector<Declaration> parse_decls(const std::string& source);

// Convenience: parse and seal in one step.
Env parse_env(const std::string& source);

struct TermContext {
  Sort ambient = Sort::carrier("nat");
  bool pattern_mode = true;  // unbound identifiers become variables
  std::map<std::string, Sort> bound;  // known variable sorts (in & out)
};

TermPtr parse_term(const std::string& source, const Env& env, TermContext& ctx);
TermPtr parse_term(const std::string& source, const Env& env);

ClassAtom parse_class_atom(const std::string& source, const Env& env);

}  // namespace hl
