#include "decoq/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "decoq/builders.hpp"

namespace decoq::expr {

namespace {

struct Token {
  enum class Kind { number, imag_number, string, ident, lparen, rparen, comma, plus, minus, end };
  Kind kind = Kind::end;
  size_t pos = 0;
  double value = 0.0;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(uint8_t(src_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.pos = pos_;
    if (pos_ >= src_.size()) return;  // end
    char c = src_[pos_];
    if (c == '(') return single(Token::Kind::lparen);
    if (c == ')') return single(Token::Kind::rparen);
    if (c == ',') return single(Token::Kind::comma);
    if (c == '+') return single(Token::Kind::plus);
    if (c == '-') return single(Token::Kind::minus);
    if (c == '"') return lex_string();
    if (std::isdigit(uint8_t(c)) || c == '.') return lex_number();
    if (std::isalpha(uint8_t(c)) || c == '_') return lex_ident();
    throw ExprError(std::string("unexpected character '") + c + "'", pos_);
  }

  void single(Token::Kind k) {
    tok_.kind = k;
    ++pos_;
  }

  void lex_string() {
    size_t start = ++pos_;
    while (pos_ < src_.size() && src_[pos_] != '"') ++pos_;
    if (pos_ >= src_.size()) throw ExprError("unterminated string literal", start - 1);
    tok_.kind = Token::Kind::string;
    tok_.text = src_.substr(start, pos_ - start);
    ++pos_;
  }

  void lex_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{}) throw ExprError("malformed number", pos_);
    pos_ = size_t(ptr - src_.data());
    tok_.value = value;
    tok_.kind = Token::Kind::number;
    if (pos_ < src_.size() && src_[pos_] == 'i') {
      bool ident_tail = pos_ + 1 < src_.size() &&
                        (std::isalnum(uint8_t(src_[pos_ + 1])) || src_[pos_ + 1] == '_');
      if (!ident_tail) {
        tok_.kind = Token::Kind::imag_number;
        ++pos_;
      }
    }
  }

  void lex_ident() {
    size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(uint8_t(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    tok_.kind = Token::Kind::ident;
    tok_.text = src_.substr(start, pos_ - start);
  }

  const std::string& src_;
  size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  std::unique_ptr<Node> parse() {
    auto node = expression();
    if (lex_.peek().kind != Token::Kind::end)
      throw ExprError("unexpected trailing input", lex_.peek().pos);
    return node;
  }

 private:
  std::unique_ptr<Node> expression() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::minus:
      case Token::Kind::number:
      case Token::Kind::imag_number:
        return number();
      case Token::Kind::string: {
        auto node = std::make_unique<Node>();
        Token tok = lex_.take();
        node->kind = Node::Kind::string;
        node->pos = tok.pos;
        node->text = tok.text;
        return node;
      }
      case Token::Kind::ident:
        return identifier_or_call();
      default:
        throw ExprError("expected expression", t.pos);
    }
  }

  // ['-'] FLOAT [('+'|'-') FLOAT 'i'] | ['-'] FLOAT 'i'
  std::unique_ptr<Node> number() {
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::number;
    node->pos = lex_.peek().pos;
    double sign = 1.0;
    if (lex_.peek().kind == Token::Kind::minus) {
      lex_.take();
      sign = -1.0;
    }
    Token first = lex_.take();
    if (first.kind == Token::Kind::imag_number) {
      node->number = Complex(0.0, sign * first.value);
      return node;
    }
    if (first.kind != Token::Kind::number) throw ExprError("expected number", first.pos);
    node->number = Complex(sign * first.value, 0.0);
    if (lex_.peek().kind == Token::Kind::plus || lex_.peek().kind == Token::Kind::minus) {
      double imag_sign = lex_.take().kind == Token::Kind::plus ? 1.0 : -1.0;
      Token imag = lex_.take();
      if (imag.kind != Token::Kind::imag_number)
        throw ExprError("expected imaginary part like 2i", imag.pos);
      node->number += Complex(0.0, imag_sign * imag.value);
    }
    return node;
  }

  std::unique_ptr<Node> identifier_or_call() {
    Token name = lex_.take();
    auto node = std::make_unique<Node>();
    node->pos = name.pos;
    node->text = name.text;
    if (lex_.peek().kind != Token::Kind::lparen) {
      node->kind = Node::Kind::identifier;
      return node;
    }
    lex_.take();
    node->kind = Node::Kind::call;
    if (lex_.peek().kind == Token::Kind::rparen)
      throw ExprError("call needs at least one argument", lex_.peek().pos);
    node->args.push_back(expression());
    while (lex_.peek().kind == Token::Kind::comma) {
      lex_.take();
      node->args.push_back(expression());
    }
    if (lex_.peek().kind != Token::Kind::rparen)
      throw ExprError("expected ',' or ')'", lex_.peek().pos);
    lex_.take();
    return node;
  }

  Lexer lex_;
};

void expect_args(const Node& node, size_t lo, size_t hi) {
  if (node.args.size() < lo || node.args.size() > hi) {
    std::string want = hi == lo ? std::to_string(lo)
                               : (hi == SIZE_MAX ? "at least " + std::to_string(lo)
                                                 : std::to_string(lo) + ".." + std::to_string(hi));
    throw ExprError(node.text + ": expected " + want + " argument(s), got " +
                        std::to_string(node.args.size()),
                    node.pos);
  }
}

Complex arg_number(const Node& node, size_t k) {
  const Node& a = *node.args[k];
  if (a.kind != Node::Kind::number)
    throw ExprError(node.text + ": argument " + std::to_string(k + 1) + " must be a number",
                    a.pos);
  return a.number;
}

double arg_real(const Node& node, size_t k) {
  Complex z = arg_number(node, k);
  if (z.imag() != 0.0)
    throw ExprError(node.text + ": argument " + std::to_string(k + 1) + " must be real",
                    node.args[k]->pos);
  return z.real();
}

int arg_int(const Node& node, size_t k) {
  double v = arg_real(node, k);
  int i = int(std::lround(v));
  if (std::abs(v - i) > 1e-12)
    throw ExprError(node.text + ": argument " + std::to_string(k + 1) + " must be an integer",
                    node.args[k]->pos);
  return i;
}

std::string arg_string(const Node& node, size_t k) {
  const Node& a = *node.args[k];
  if (a.kind != Node::Kind::string)
    throw ExprError(node.text + ": argument " + std::to_string(k + 1) + " must be a string",
                    a.pos);
  return a.text;
}

}  // namespace

std::unique_ptr<Node> parse(const std::string& src) { return Parser(src).parse(); }

HarmonicOperator eval_operator(const Node& node, const OperatorEnv& env) {
  switch (node.kind) {
    case Node::Kind::number:
      throw ExprError("bare number where an operator is required", node.pos);
    case Node::Kind::string:
      throw ExprError("bare string where an operator is required", node.pos);
    case Node::Kind::identifier: {
      auto it = env.find(node.text);
      if (it == env.end()) throw ExprError("unknown operator '" + node.text + "'", node.pos);
      return it->second;
    }
    case Node::Kind::call:
      break;
  }

  const std::string& fn = node.text;
  auto op_arg = [&](size_t k) { return eval_operator(*node.args[k], env); };
  try {
    if (fn == "pauli") {
      expect_args(node, 1, 1);
      return HarmonicOperator::constant(pauli_string(arg_string(node, 0)));
    }
    if (fn == "boson_a") {
      expect_args(node, 1, 1);
      return HarmonicOperator::constant(boson_annihilate(arg_int(node, 0)));
    }
    if (fn == "identity") {
      expect_args(node, 1, 1);
      int d = arg_int(node, 0);
      if (d < 1) throw ExprError("identity: dimension must be positive", node.pos);
      return HarmonicOperator::constant(ComplexMatrix::Identity(d, d));
    }
    if (fn == "ketbra") {
      expect_args(node, 3, 3);
      return HarmonicOperator::constant(
          ketbra(arg_int(node, 0), arg_int(node, 1), arg_int(node, 2)));
    }
    if (fn == "dag") {
      expect_args(node, 1, 1);
      return op_arg(0).adjoint();
    }
    if (fn == "scale") {
      expect_args(node, 2, 2);
      return op_arg(1).scaled(arg_number(node, 0));
    }
    if (fn == "sum") {
      expect_args(node, 1, SIZE_MAX);
      HarmonicOperator acc = op_arg(0);
      for (size_t k = 1; k < node.args.size(); ++k) acc = acc + op_arg(k);
      return acc;
    }
    if (fn == "prod") {
      expect_args(node, 2, SIZE_MAX);
      HarmonicOperator acc = op_arg(0);
      for (size_t k = 1; k < node.args.size(); ++k) acc = harmonic_product(acc, op_arg(k));
      return acc;
    }
    if (fn == "tensor") {
      expect_args(node, 2, SIZE_MAX);
      HarmonicOperator acc = op_arg(0);
      for (size_t k = 1; k < node.args.size(); ++k) acc = harmonic_tensor(acc, op_arg(k));
      return acc;
    }
    if (fn == "harmonic") {
      expect_args(node, 2, 2);
      return op_arg(1).frequency_shifted(arg_real(node, 0));
    }
  } catch (const ExprError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExprError(fn + ": " + e.what(), node.pos);
  }
  throw ExprError("unknown function '" + fn + "'", node.pos);
}

StateVector eval_state(const Node& node) {
  if (node.kind != Node::Kind::call)
    throw ExprError("expected a state expression (ket, tensor, sum, scale, normalize)", node.pos);
  const std::string& fn = node.text;
  try {
    if (fn == "ket") {
      expect_args(node, 2, 2);
      return basis_ket(arg_int(node, 0), arg_int(node, 1));
    }
    if (fn == "tensor") {
      expect_args(node, 2, SIZE_MAX);
      StateVector acc = eval_state(*node.args[0]);
      for (size_t k = 1; k < node.args.size(); ++k)
        acc = tensor(acc, StateVector(eval_state(*node.args[k])));
      return acc;
    }
    if (fn == "sum") {
      expect_args(node, 1, SIZE_MAX);
      StateVector acc = eval_state(*node.args[0]);
      for (size_t k = 1; k < node.args.size(); ++k) {
        StateVector b = eval_state(*node.args[k]);
        if (b.size() != acc.size())
          throw ExprError("sum: state dimension mismatch", node.args[k]->pos);
        acc += b;
      }
      return acc;
    }
    if (fn == "scale") {
      expect_args(node, 2, 2);
      return arg_number(node, 0) * eval_state(*node.args[1]);
    }
    if (fn == "normalize") {
      expect_args(node, 1, 1);
      StateVector v = eval_state(*node.args[0]);
      double n = v.norm();
      if (n < 1e-300) throw ExprError("normalize: zero state", node.pos);
      return v / n;
    }
  } catch (const ExprError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExprError(fn + ": " + e.what(), node.pos);
  }
  throw ExprError("unknown state function '" + fn + "'", node.pos);
}

HarmonicOperator eval_operator(const std::string& src, const OperatorEnv& env) {
  return eval_operator(*parse(src), env);
}

StateVector eval_state(const std::string& src) { return eval_state(*parse(src)); }

}  // namespace decoq::expr
