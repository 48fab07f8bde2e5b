#include "mgsim/attack_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace mgsim {

struct TimeExpr::Node {
  enum class Op { constant, time, add, sub, mul, div, pow, neg, exp };
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  double eval(double t) const {
    switch (op) {
      case Op::constant: return value;
      case Op::time: return t;
      case Op::add: return a->eval(t) + b->eval(t);
      case Op::sub: return a->eval(t) - b->eval(t);
      case Op::mul: return a->eval(t) * b->eval(t);
      case Op::div: return a->eval(t) / b->eval(t);
      case Op::pow: return std::pow(a->eval(t), b->eval(t));
      case Op::neg: return -a->eval(t);
      case Op::exp: return std::exp(a->eval(t));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const TimeExpr::Node>;
using Op = TimeExpr::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0) {
  auto n = std::make_shared<TimeExpr::Node>();
  n->op = op;
  n->value = value;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr root = parse_sum(0);
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  static constexpr int kMaxDepth = 64;

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("attack expression '" + text_ + "': " + why + " at offset " +
                     std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_sum(int depth) {
    guard(depth);
    NodePtr left = parse_product(depth + 1);
    while (true) {
      if (eat('+')) {
        left = make(Op::add, left, parse_product(depth + 1));
      } else if (eat('-')) {
        left = make(Op::sub, left, parse_product(depth + 1));
      } else {
        return left;
      }
    }
  }

  NodePtr parse_product(int depth) {
    guard(depth);
    NodePtr left = parse_unary(depth + 1);
    while (true) {
      if (eat('*')) {
        left = make(Op::mul, left, parse_unary(depth + 1));
      } else if (eat('/')) {
        left = make(Op::div, left, parse_unary(depth + 1));
      } else {
        return left;
      }
    }
  }

  NodePtr parse_unary(int depth) {
    guard(depth);
    if (eat('-')) return make(Op::neg, parse_unary(depth + 1));
    return parse_power(depth + 1);
  }

  NodePtr parse_power(int depth) {
    guard(depth);
    NodePtr base = parse_primary(depth + 1);
    if (eat('^')) {
      // right associative; the exponent may itself be signed
      return make(Op::pow, base, parse_unary(depth + 1));
    }
    return base;
  }

  NodePtr parse_primary(int depth) {
    guard(depth);
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum(depth + 1);
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string name = parse_name();
      if (name == "t") return make(Op::time);
      if (name == "exp") {
        if (!eat('(')) fail("exp needs '('");
        NodePtr arg = parse_sum(depth + 1);
        if (!eat(')')) fail("missing ')'");
        return make(Op::exp, arg);
      }
      fail("unknown name '" + name + "' (only t and exp are allowed)");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<size_t>(end - begin);
    return make(Op::constant, nullptr, nullptr, value);
  }

  std::string parse_name() {
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  void guard(int depth) const {
    if (depth > kMaxDepth) throw ParseError("attack expression '" + text_ + "': too deep");
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

TimeExpr TimeExpr::parse(const std::string& text) {
  TimeExpr e;
  e.text_ = text;
  e.root_ = Parser(text).run();
  return e;
}

double TimeExpr::eval(double t) const {
  if (!root_) throw ValidationError("evaluating an empty attack expression");
  return root_->eval(t);
}

}  // namespace mgsim
