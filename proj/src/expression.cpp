#include "surfcert/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include "surfcert/error.hpp"

namespace surfcert {

struct Expression::Node {
  enum class Op { constant, var_u, var_v, add, sub, mul, div, neg, sin, cos };
  Op op = Op::constant;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->value = value;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::config_error,
                "expression \"" + std::string(text_) + "\" at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Op::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Op::neg, unary());
    if (accept('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "u") return make(Node::Op::var_u);
      if (word == "v") return make(Node::Op::var_v);
      if (word == "pi") return make(Node::Op::constant, nullptr, nullptr, std::numbers::pi);
      if (word == "sin" || word == "cos") {
        if (!accept('(')) fail("expected '(' after " + std::string(word));
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(word == "sin" ? Node::Op::sin : Node::Op::cos, arg);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return make(Node::Op::constant, nullptr, nullptr, value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

template <class T>
T evaluate(const Node& n, const T& u, const T& v) {
  using std::cos;
  using std::sin;
  switch (n.op) {
    case Node::Op::constant: return T(n.value);
    case Node::Op::var_u: return u;
    case Node::Op::var_v: return v;
    case Node::Op::add: return evaluate(*n.lhs, u, v) + evaluate(*n.rhs, u, v);
    case Node::Op::sub: return evaluate(*n.lhs, u, v) - evaluate(*n.rhs, u, v);
    case Node::Op::mul: return evaluate(*n.lhs, u, v) * evaluate(*n.rhs, u, v);
    case Node::Op::div: return evaluate(*n.lhs, u, v) / evaluate(*n.rhs, u, v);
    case Node::Op::neg: return -evaluate(*n.lhs, u, v);
    case Node::Op::sin: return sin(evaluate(*n.lhs, u, v));
    case Node::Op::cos: return cos(evaluate(*n.lhs, u, v));
  }
  return T(0.0);
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = std::string(text);
  return e;
}

double Expression::operator()(double u, double v) const { return evaluate(*root_, u, v); }

Jet<1> Expression::operator()(const Jet<1>& u, const Jet<1>& v) const { return evaluate(*root_, u, v); }

TangentField field_from_expressions(const Expression& coeff_u, const Expression& coeff_v) {
  return TangentField::from_generic([coeff_u, coeff_v](const auto& u, const auto& v) {
    using T = std::decay_t<decltype(u)>;
    return std::array<T, 2>{coeff_u(u, v), coeff_v(u, v)};
  });
}

TangentField parse_field_expression(std::string_view text) {
  int depth = 0;
  std::vector<std::size_t> commas;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (text[i] == ',' && depth == 0) commas.push_back(i);
  }
  if (commas.size() != 1) {
    throw Error(ErrorKind::config_error, "field expression needs exactly two components \"expr_u,expr_v\"");
  }
  const std::size_t c = commas.front();
  return field_from_expressions(Expression::parse(text.substr(0, c)), Expression::parse(text.substr(c + 1)));
}

}  // namespace surfcert
