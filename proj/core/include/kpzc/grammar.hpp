#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kpzc {

/// Parsed form of the small call grammar shared by weight and set specs:
///   expr := number | ident | '[' expr (',' expr)* ']' | ident '(' arg (',' arg)* ')'
///   arg  := ident '=' expr | expr
struct Expr;

struct Arg {
  std::string key;  // empty for positional arguments
  std::vector<Expr> value;  // exactly one element; vector only to allow recursion
};

struct Expr {
  enum class Kind { number, ident, list, call };

  Kind kind = Kind::number;
  double number = 0.0;
  std::string name;        // ident or call name
  std::vector<Expr> items;  // list elements
  std::vector<Arg> args;    // call arguments

  const Expr& arg(std::string_view key) const;
  bool has_arg(std::string_view key) const;
  double number_arg(std::string_view key) const { return arg(key).as_number(); }
  double as_number() const;
};

Expr parse_expr(std::string_view text);

/// A call or bare identifier at the top level, e.g. "fullcube" or "lognormal(sigma2=0.5)".
struct CallExpr {
  std::string name;
  Expr expr;

  double number(std::string_view key) const { return expr.number_arg(key); }
};

CallExpr parse_call(std::string_view text);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double value);

}  // namespace kpzc
