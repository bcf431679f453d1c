#ifndef DECOQ_EXPR_HPP
#define DECOQ_EXPR_HPP

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "decoq/harmonic.hpp"

namespace decoq::expr {

/// Parse or evaluation failure, with a 0-based character offset into the expression.
class ExprError : public std::runtime_error {
 public:
  ExprError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos + 1)), pos_(pos) {}
  size_t position() const { return pos_; }

 private:
  size_t pos_;
};

struct Node {
  enum class Kind { number, string, identifier, call };
  Kind kind = Kind::number;
  size_t pos = 0;
  Complex number;
  std::string text;  // string literal, identifier, or call name
  std::vector<std::unique_ptr<Node>> args;
};

/// Recursive-descent parser for the operator builder grammar:
///   expr    := number | STRING | IDENT | IDENT '(' expr (',' expr)* ')'
///   number  := ['-'] FLOAT [('+'|'-') FLOAT 'i'] | ['-'] FLOAT 'i'
/// Complex scalars are written re+imi, e.g. 0.5-1.2i.
std::unique_ptr<Node> parse(const std::string& src);

using OperatorEnv = std::map<std::string, HarmonicOperator>;

/// Builders: pauli("ZZI"), boson_a(d), identity(d), ketbra(i,j,d), dag(A),
/// tensor(A,B,...), scale(c,A), sum(A,...), prod(A,B,...), harmonic(freq,A).
/// Identifiers refer to previously defined operators in env.
HarmonicOperator eval_operator(const Node& node, const OperatorEnv& env);

/// State grammar: ket(i,d), tensor(a,b,...), sum(a,...), scale(c,a), normalize(a).
StateVector eval_state(const Node& node);

HarmonicOperator eval_operator(const std::string& src, const OperatorEnv& env);
StateVector eval_state(const std::string& src);

}  // namespace decoq::expr

#endif
