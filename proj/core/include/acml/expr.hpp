#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acml/jet.hpp"

namespace acml {

/// Syntax diagnostic: byte offset of the first error plus the token set
/// that would have been accepted there.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int offset, std::vector<std::string> expected)
      : std::runtime_error(std::move(message)),
        offset_(offset),
        expected_(std::move(expected)) {}
  int offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int offset_;
  std::vector<std::string> expected_;
};

/// Domain failure during evaluation, annotated with the offending
/// subexpression.
class EvalError : public std::runtime_error {
 public:
  EvalError(std::string message, int offset, std::string subexpr)
      : std::runtime_error(std::move(message)),
        offset_(offset),
        subexpr_(std::move(subexpr)) {}
  int offset() const { return offset_; }
  const std::string& subexpr() const { return subexpr_; }

 private:
  int offset_;
  std::string subexpr_;
};

namespace detail {
struct ExprNode;
}

/// Immutable arithmetic expression over coordinates x1..x<dim>.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' integer)?
///   atom   := number | ident | func '(' expr ')' | '(' expr ')' | '-' atom
///   ident  := 'x' integer      func := sin | cos | exp | sqrt
class Expr {
 public:
  Expr() = default;

  /// Parses `source`; coordinate indices must be within [1, dim].
  static Expr parse(std::string_view source, int dim);

  bool valid() const { return root_ != nullptr; }
  int dim() const { return dim_; }

  /// Re-parseable rendering; parse(print()) is structurally identical.
  std::string print() const;
  /// Lisp-style tree dump, for diagnostics.
  std::string sexpr() const;

  double value(const Point& p) const;
  Jet jet(const Point& p, int order) const;

  /// Constant value when the tree is a literal (possibly negated).
  std::optional<double> as_constant() const;
  /// 0-based coordinate index when the tree is a bare coordinate.
  std::optional<int> as_coordinate() const;

  bool structurally_equal(const Expr& other) const;

 private:
  std::shared_ptr<const detail::ExprNode> root_;
  int dim_ = 0;
};

/// Central finite difference (f(p+h e_i) - f(p-h e_i)) / 2h; the
/// independent oracle for jet partials. `coord` is 0-based.
double fd_partial(const Expr& e, const Point& p, int coord, double h);

}  // namespace acml
