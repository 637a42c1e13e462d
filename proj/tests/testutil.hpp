#pragma once

#include <random>
#include <string>
#include <vector>

#include "hl/decl.hpp"
#include "hl/parse.hpp"
#include "hl/term.hpp"

namespace hl::testutil {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Random well-sorted term over a single carrier sort, from a fixed variable
// pool; numerals kept small. ops: + - * neg ^ norm.
inline TermPtr random_term(Rng& rng, const Sort& sort, int depth,
                           const std::vector<std::string>& vars) {
  if (depth == 0 || pick(rng, 0, 4) == 0) {
    if (pick(rng, 0, 1) == 0)
      return Term::numeral(mpz_class(pick(rng, 0, 9)), sort);
    return Term::var(vars[pick(rng, 0, static_cast<int>(vars.size()) - 1)],
                     sort);
  }
  switch (pick(rng, 0, 6)) {
    case 0:
      return Term::op("+", {random_term(rng, sort, depth - 1, vars),
                            random_term(rng, sort, depth - 1, vars)},
                      sort);
    case 1:
      return Term::op("-", {random_term(rng, sort, depth - 1, vars),
                            random_term(rng, sort, depth - 1, vars)},
                      sort);
    case 2:
    case 3:
      return Term::op("*", {random_term(rng, sort, depth - 1, vars),
                            random_term(rng, sort, depth - 1, vars)},
                      sort);
    case 4:
      return Term::op("neg", {random_term(rng, sort, depth - 1, vars)}, sort);
    case 5:
      return Term::op("^",
                      {random_term(rng, sort, depth - 1, vars),
                       Term::numeral(mpz_class(pick(rng, 0, 3)),
                                     Sort::carrier("nat"))},
                      sort);
    default:
      return Term::op("norm", {random_term(rng, sort, depth - 1, vars)}, sort);
  }
}

inline std::string slurp(const std::string& path);

}  // namespace hl::testutil

#include <fstream>
#include <sstream>

inline std::string hl::testutil::slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
