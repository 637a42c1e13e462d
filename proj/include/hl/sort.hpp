#pragma once

#include <memory>
#include <string>

namespace hl {

// Sorts are carriers (named), function sorts, or the sort of propositions.
class Sort {
public:
  enum class Kind { Carrier, Arrow, Prop };

  static Sort carrier(std::string name);
  static Sort arrow(Sort domain, Sort codomain);
  static Sort prop();

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  Sort domain() const { return Sort(node_->dom); }
  Sort codomain() const { return Sort(node_->cod); }

  bool is_carrier() const { return kind() == Kind::Carrier; }
  bool is_arrow() const { return kind() == Kind::Arrow; }
  bool is_prop() const { return kind() == Kind::Prop; }

  std::string str() const;

  friend bool operator==(const Sort& a, const Sort& b);
  friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }

private:
  struct Node {
    Kind kind;
    std::string name;                 // Carrier only
    std::shared_ptr<const Node> dom;  // Arrow only
    std::shared_ptr<const Node> cod;  // Arrow only
  };
  explicit Sort(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  static bool eq(const Node& a, const Node& b);
};

}  // namespace hl
