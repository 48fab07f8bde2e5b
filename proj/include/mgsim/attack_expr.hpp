#pragma once

#include <memory>
#include <string>

#include "mgsim/common.hpp"

namespace mgsim {

// Small arithmetic expression over the single variable t: numbers, + - * /,
// ^ (right associative), unary minus, parentheses and exp(). No other names
// are accepted, so profiles stay data.
class TimeExpr {
 public:
  TimeExpr() = default;
  static TimeExpr parse(const std::string& text);  // throws ParseError

  double eval(double t) const;
  const std::string& text() const { return text_; }
  bool empty() const { return root_ == nullptr; }
  bool operator==(const TimeExpr& other) const { return text_ == other.text_; }

 private:
  struct Node;
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace mgsim
