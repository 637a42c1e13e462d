#include "hl/trace.hpp"

#include <nlohmann/json.hpp>

namespace hl {

namespace {

using nlohmann::json;

json sort_json(const Sort& s) {
  switch (s.kind()) {
    case Sort::Kind::Carrier:
      return json{{"k", "carrier"}, {"name", s.name()}};
    case Sort::Kind::Arrow:
      return json{{"k", "arrow"},
                  {"dom", sort_json(s.domain())},
                  {"cod", sort_json(s.codomain())}};
    case Sort::Kind::Prop:
      return json{{"k", "prop"}};
  }
  return json{};
}

Sort sort_of_json(const json& j) {
  std::string k = j.at("k").get<std::string>();
  if (k == "carrier") return Sort::carrier(j.at("name").get<std::string>());
  if (k == "arrow")
    return Sort::arrow(sort_of_json(j.at("dom")), sort_of_json(j.at("cod")));
  if (k == "prop") return Sort::prop();
  throw json::other_error::create(501, "unknown sort kind", nullptr);
}

std::string bits_str(const Bits& b) {
  std::string s;
  for (bool x : b) s += x ? '1' : '0';
  return s;
}

Bits bits_of_str(const std::string& s) {
  if (s.empty()) throw json::other_error::create(501, "empty bits", nullptr);
  Bits b;
  for (char c : s) {
    if (c != '0' && c != '1')
      throw json::other_error::create(501, "bad bit", nullptr);
    b.push_back(c == '1');
  }
  if (!bits_canonical(b))
    throw json::other_error::create(501, "non-canonical bits", nullptr);
  return b;
}

json term_json(const TermPtr& t) {
  switch (t->kind()) {
    case Term::Kind::Var:
      return json{{"k", "var"},
                  {"name", t->symbol()},
                  {"sort", sort_json(t->sort())}};
    case Term::Kind::Numeral:
      return json{{"k", "num"},
                  {"bits", bits_str(t->bits())},
                  {"sort", sort_json(t->sort())}};
    case Term::Kind::Op: {
      json args = json::array();
      for (const auto& a : t->args()) args.push_back(term_json(a));
      return json{{"k", "op"},
                  {"sym", t->symbol()},
                  {"args", std::move(args)},
                  {"sort", sort_json(t->sort())}};
    }
    case Term::Kind::Coerce:
      return json{{"k", "coe"},
                  {"target", sort_json(t->coerce_target())},
                  {"arg", term_json(t->args()[0])}};
    case Term::Kind::Rel:
      return json{{"k", "rel"},
                  {"sym", t->symbol()},
                  {"lhs", term_json(t->args()[0])},
                  {"rhs", term_json(t->args()[1])}};
  }
  return json{};
}

TermPtr term_of_json(const json& j) {
  std::string k = j.at("k").get<std::string>();
  if (k == "var")
    return Term::var(j.at("name").get<std::string>(),
                     sort_of_json(j.at("sort")));
  if (k == "num")
    return Term::numeral(bits_of_str(j.at("bits").get<std::string>()),
                         sort_of_json(j.at("sort")));
  if (k == "op") {
    std::vector<TermPtr> args;
    for (const auto& a : j.at("args")) args.push_back(term_of_json(a));
    return Term::op(j.at("sym").get<std::string>(), std::move(args),
                    sort_of_json(j.at("sort")));
  }
  if (k == "coe")
    return Term::coerce(sort_of_json(j.at("target")),
                        term_of_json(j.at("arg")));
  if (k == "rel") {
    std::string sym = j.at("sym").get<std::string>();
    if (!is_rel_symbol(sym))
      throw json::other_error::create(501, "bad relation symbol", nullptr);
    return Term::rel(std::move(sym), term_of_json(j.at("lhs")),
                     term_of_json(j.at("rhs")));
  }
  throw json::other_error::create(501, "unknown term kind", nullptr);
}

}  // namespace

std::string term_json_str(const TermPtr& t) {
  return term_json(t).dump();
}

TermPtr term_of_json_str(const std::string& text) {
  try {
    return term_of_json(json::parse(text));
  } catch (const std::exception&) {
    return nullptr;
  }
}

}  // namespace hl
