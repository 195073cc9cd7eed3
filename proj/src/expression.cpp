#include "crowdlens/expression.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "crowdlens/error.hpp"
#include "crowdlens/geometric_features.hpp"
#include "text_util.hpp"

namespace crowdlens {

enum class Field { Speed, Alpha, Isolation, Socialization, Collectivity, X, Y };

struct Expression::Node {
  enum class Kind { Constant, Field, Negate, Add, Sub, Mul, Div, Recip } kind;
  double value = 0.0;
  Field field = Field::Speed;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

double guard(double v) {
  if (std::abs(v) < Expression::kEpsilon) {
    return v < 0.0 ? -Expression::kEpsilon : Expression::kEpsilon;
  }
  return v;
}

double field_value(Field f, const FeatureVector& v) {
  switch (f) {
    case Field::Speed: return v.s;
    case Field::Alpha: return v.alpha;
    case Field::Isolation: return v.isolation;
    case Field::Socialization: return v.socialization;
    case Field::Collectivity: return v.collectivity;
    case Field::X: return v.x.x();
    case Field::Y: return v.x.y();
  }
  return 0.0;
}

double eval(const Node& n, const FeatureVector& v) {
  switch (n.kind) {
    case Node::Kind::Constant: return n.value;
    case Node::Kind::Field: return field_value(n.field, v);
    case Node::Kind::Negate: return -eval(*n.lhs, v);
    case Node::Kind::Add: return eval(*n.lhs, v) + eval(*n.rhs, v);
    case Node::Kind::Sub: return eval(*n.lhs, v) - eval(*n.rhs, v);
    case Node::Kind::Mul: return eval(*n.lhs, v) * eval(*n.rhs, v);
    case Node::Kind::Div: return eval(*n.lhs, v) / guard(eval(*n.rhs, v));
    case Node::Kind::Recip: return 1.0 / guard(eval(*n.lhs, v));
  }
  return 0.0;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    auto root = expr();
    skip_ws();
    if (pos_ != src_.size()) {
      fail("unexpected trailing input");
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::RegistryParse,
                what + " at offset " + std::to_string(pos_) + " in '" + std::string(src_) + "'");
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  /// Consumes one operator and returns its ASCII form, or 0.
  char peek_operator() {
    skip_ws();
    if (pos_ >= src_.size()) {
      return 0;
    }
    const auto rest = src_.substr(pos_);
    if (rest.starts_with("\xE2\x88\x92")) return '-';  // U+2212
    if (rest.starts_with("\xC3\x97")) return '*';      // U+00D7
    if (rest.starts_with("\xC3\xB7")) return '/';      // U+00F7
    const char c = src_[pos_];
    return (c == '+' || c == '-' || c == '*' || c == '/') ? c : 0;
  }

  void consume_operator() {
    const auto rest = src_.substr(pos_);
    pos_ += rest.starts_with("\xE2\x88\x92") ? 3 : (rest.starts_with("\xC3") ? 2 : 1);
  }

  static NodePtr binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  NodePtr expr() {
    auto lhs = term();
    while (true) {
      const char op = peek_operator();
      if (op != '+' && op != '-') {
        return lhs;
      }
      consume_operator();
      lhs = binary(op == '+' ? Node::Kind::Add : Node::Kind::Sub, std::move(lhs), term());
    }
  }

  NodePtr term() {
    auto lhs = unary();
    while (true) {
      const char op = peek_operator();
      if (op != '*' && op != '/') {
        return lhs;
      }
      consume_operator();
      lhs = binary(op == '*' ? Node::Kind::Mul : Node::Kind::Div, std::move(lhs), unary());
    }
  }

  NodePtr unary() {
    if (peek_operator() == '-') {
      consume_operator();
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::Negate;
      n->lhs = unary();
      return n;
    }
    return primary();
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) {
      fail("unexpected end of expression");
    }
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const auto start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' || src_[pos_] == 'e' ||
              src_[pos_] == 'E' ||
              ((src_[pos_] == '-' || src_[pos_] == '+') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
        ++pos_;
      }
      const auto v = detail::parse_double(src_.substr(start, pos_ - start));
      if (!v || !std::isfinite(*v)) {
        pos_ = start;
        fail("bad number");
      }
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::Constant;
      n->value = *v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const auto name = src_.substr(start, pos_ - start);
      if (name == "recip") {
        expect('(');
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Recip;
        n->lhs = expr();
        expect(')');
        return n;
      }
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::Field;
      if (name == "s") {
        n->field = Field::Speed;
      } else if (name == "alpha") {
        n->field = Field::Alpha;
      } else if (name == "isolation") {
        n->field = Field::Isolation;
      } else if (name == "socialization") {
        n->field = Field::Socialization;
      } else if (name == "collectivity") {
        n->field = Field::Collectivity;
      } else if (name == "x") {
        n->field = Field::X;
      } else if (name == "y") {
        n->field = Field::Y;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view source) {
  auto root = Parser(source).parse();
  return Expression(std::string(source), std::shared_ptr<const Node>(std::move(root)));
}

double Expression::evaluate(const FeatureVector& v) const { return eval(*root_, v); }

}  // namespace crowdlens
