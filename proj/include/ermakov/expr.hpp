#pragma once

// Closed-form functions of the time variable `t`.
//
// Expr is an immutable expression tree with shared nodes. Values are cheap to
// copy and safe to evaluate concurrently. The arithmetic operators fold the
// trivial identities (0 + e, 1 * e, e / 1, ...) so that symbolic derivatives
// stay readable, but no further simplification is attempted.

#include <memory>
#include <string>
#include <string_view>

namespace ermakov {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt, Tanh, Sinh, Cosh };

enum class NamedConstant { Pi, E };

class Expr {
 public:
  enum class Kind { Constant, Named, Variable, Negate, Binary, Call };

  struct Node;

  /// The zero constant.
  Expr();

  static Expr constant(double value);
  static Expr named(NamedConstant c);
  static Expr variable();
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(Function f, Expr arg);

  Kind kind() const noexcept;
  /// Only meaningful for Kind::Constant.
  double constant_value() const noexcept;
  bool is_constant(double value) const noexcept;
  /// True when the expression mentions `t`.
  bool depends_on_t() const noexcept;

  /// Evaluates at t. Throws DomainError naming the offending subexpression
  /// when a node leaves its domain or produces a non-finite value.
  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  /// Grammar-valid text; re-parsing yields a structurally identical tree.
  std::string to_string() const;

  /// Structural equality of trees.
  friend bool operator==(const Expr& a, const Expr& b);

  // Structure accessors; valid for the kinds noted.
  NamedConstant named_constant() const noexcept;  // Named
  BinaryOp op() const noexcept;                   // Binary
  Function function() const noexcept;             // Call
  Expr operand() const;                           // Negate, Call, Binary lhs
  Expr rhs() const;                               // Binary

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  NamedConstant named = NamedConstant::Pi;
  BinaryOp op = BinaryOp::Add;
  Function function = Function::Sin;
  std::shared_ptr<const Node> first;   // operand of Negate/Call, lhs of Binary
  std::shared_ptr<const Node> second;  // rhs of Binary
  bool has_t = false;
};

// Raw constructors build exactly the requested node. These operators fold
// identities with literal 0 and 1 operands.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, double exponent);
Expr operator+(const Expr& a, double b);
Expr operator*(double a, const Expr& b);

Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);

/// Parses the coefficient language:
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?
///   atom   := number | 't' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'
/// so '^' binds tighter than unary minus and is right-associative.
Expr parse_expr(std::string_view source);

/// Exact derivative with respect to t by structural recursion.
Expr derivative(const Expr& e);

std::string_view function_name(Function f) noexcept;

}  // namespace ermakov
