#include "hl/sort.hpp"

namespace hl {

Sort Sort::carrier(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Carrier;
  n->name = std::move(name);
  return Sort(std::move(n));
}

Sort Sort::arrow(Sort domain, Sort codomain) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Arrow;
  n->dom = domain.node_;
  n->cod = codomain.node_;
  return Sort(std::move(n));
}

Sort Sort::prop() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Prop;
  return Sort(std::move(n));
}

bool Sort::eq(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Carrier: return a.name == b.name;
    case Kind::Prop: return true;
    case Kind::Arrow: return eq(*a.dom, *b.dom) && eq(*a.cod, *b.cod);
  }
  return false;
}

bool operator==(const Sort& a, const Sort& b) {
  if (a.node_ == b.node_) return true;
  return Sort::eq(*a.node_, *b.node_);
}

std::string Sort::str() const {
  switch (kind()) {
    case Kind::Carrier: return name();
    case Kind::Prop: return "prop";
    case Kind::Arrow: {
      std::string d = domain().str();
      if (domain().is_arrow()) d = "(" + d + ")";
      return d + " -> " + codomain().str();
    }
  }
  return "?";
}

}  // namespace hl
