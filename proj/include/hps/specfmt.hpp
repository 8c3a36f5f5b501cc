#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hps/construction.hpp"

namespace hps::specfmt {

/// First syntax error in a .hps source. Positions are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, std::string expected, std::string found);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  int line_;
  int column_;
  std::string expected_;
  std::string found_;
};

enum class CmpOp { Eq, Lt, Le, Gt, Ge };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression node. Source positions are carried for diagnostics but are not
/// part of node equality.
struct Expr {
  enum class Kind { Int, Sqrt2, Var, Call, Floor, Add, Sub, Mul, Div, Pow, Neg, If };

  Kind kind;
  mpz_class value;            ///< Int
  std::string name;           ///< Var, Call
  std::vector<ExprPtr> args;  ///< operands; If holds {lhs, rhs, then, else}
  CmpOp cmp = CmpOp::Eq;      ///< If
  int line = 0;
  int column = 0;
};

bool equal(const Expr& a, const Expr& b);

struct LetDef {
  std::string name;
  std::vector<std::string> params;
  ExprPtr body;
};

struct Rule {
  ExprPtr body;
  int line = 0;
  int column = 0;
};

struct SpecAst {
  std::string family;
  std::vector<LetDef> lets;
  std::optional<Rule> n;
  std::optional<Rule> c;
  std::optional<Rule> eta;

  std::size_t rule_count() const { return (n ? 1 : 0) + (c ? 1 : 0) + (eta ? 1 : 0); }
};

bool equal(const SpecAst& a, const SpecAst& b);

/// Parse .hps source text. Throws ParseError on the first violation.
SpecAst parse(std::string_view source);

/// Canonical source text; parse(pretty_print(ast)) reproduces ast.
std::string pretty_print(const SpecAst& ast);
std::string pretty_print(const Expr& e);

/// Bind the rules into a ConstructionSpec and evaluate every level up to
/// max_depth eagerly. Throws EvalError (with a (k, l) witness) for a missing
/// rule, a non-integer or too small n_k, c_k outside (0, 1) or a negative gap.
ConstructionSpec eval_spec(const SpecAst& ast, int max_depth);

/// Value of a closed expression in the rule syntax, e.g. "1/3" or "sqrt2/2".
/// Throws ParseError on bad syntax or free variables, EvalError on division by zero.
QSqrt2 eval_constant(std::string_view text);

/// Read a file and parse it.
SpecAst parse_file(const std::string& path);

}  // namespace hps::specfmt
