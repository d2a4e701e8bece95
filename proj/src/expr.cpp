#include "ermakov/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "ermakov/error.hpp"

namespace ermakov {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_constant(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::Constant;
  n->value = v;
  return n;
}

const NodePtr& zero_node() {
  static const NodePtr zero = make_constant(0.0);
  return zero;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

constexpr std::array<std::pair<std::string_view, Function>, 9> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sqrt", Function::Sqrt},
    {"tanh", Function::Tanh},
    {"sinh", Function::Sinh},
    {"cosh", Function::Cosh},
}};

char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

[[noreturn]] void domain_violation(const Expr& where, double t, const std::string& why) {
  std::ostringstream os;
  os.precision(17);
  os << "domain violation in '" << where.to_string() << "' at t=" << t << ": " << why;
  throw DomainError(os.str());
}

double apply(Function f, double x) {
  switch (f) {
    case Function::Sin: return std::sin(x);
    case Function::Cos: return std::cos(x);
    case Function::Tan: return std::tan(x);
    case Function::Exp: return std::exp(x);
    case Function::Log: return std::log(x);
    case Function::Sqrt: return std::sqrt(x);
    case Function::Tanh: return std::tanh(x);
    case Function::Sinh: return std::sinh(x);
    case Function::Cosh: return std::cosh(x);
  }
  return 0.0;
}

double eval_node(const Expr& e, double t) {
  double result = 0.0;
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e.constant_value();
    case Expr::Kind::Named:
      return e.named_constant() == NamedConstant::Pi ? std::numbers::pi : std::numbers::e;
    case Expr::Kind::Variable:
      return t;
    case Expr::Kind::Negate:
      return -eval_node(e.operand(), t);
    case Expr::Kind::Call: {
      const double x = eval_node(e.operand(), t);
      if (e.function() == Function::Log && x <= 0.0) domain_violation(e, t, "log of non-positive value");
      if (e.function() == Function::Sqrt && x < 0.0) domain_violation(e, t, "sqrt of negative value");
      result = apply(e.function(), x);
      break;
    }
    case Expr::Kind::Binary: {
      const double a = eval_node(e.operand(), t);
      const double b = eval_node(e.rhs(), t);
      switch (e.op()) {
        case BinaryOp::Add: result = a + b; break;
        case BinaryOp::Sub: result = a - b; break;
        case BinaryOp::Mul: result = a * b; break;
        case BinaryOp::Div:
          if (b == 0.0) domain_violation(e, t, "division by zero");
          result = a / b;
          break;
        case BinaryOp::Pow:
          if (a == 0.0 && b < 0.0) domain_violation(e, t, "zero raised to a negative power");
          if (a < 0.0 && b != std::nearbyint(b)) domain_violation(e, t, "negative base with non-integer exponent");
          result = std::pow(a, b);
          break;
      }
      break;
    }
  }
  if (!std::isfinite(result)) domain_violation(e, t, "non-finite result");
  return result;
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant: {
      const double v = e.constant_value();
      if (v < 0.0 || std::signbit(v)) {
        out += "(-";
        out += format_double(-v);
        out += ')';
      } else {
        out += format_double(v);
      }
      return;
    }
    case Expr::Kind::Named:
      out += e.named_constant() == NamedConstant::Pi ? "pi" : "e";
      return;
    case Expr::Kind::Variable:
      out += 't';
      return;
    case Expr::Kind::Negate:
      out += "(-";
      print(e.operand(), out);
      out += ')';
      return;
    case Expr::Kind::Call:
      out += function_name(e.function());
      out += '(';
      print(e.operand(), out);
      out += ')';
      return;
    case Expr::Kind::Binary:
      out += '(';
      print(e.operand(), out);
      out += op_char(e.op());
      print(e.rhs(), out);
      out += ')';
      return;
  }
}

bool equal_nodes(const Expr::Node* a, const Expr::Node* b) {
  if (a == b) return true;
  if (a == nullptr || b == nullptr || a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Constant:
      return a->value == b->value && std::signbit(a->value) == std::signbit(b->value);
    case Expr::Kind::Named:
      return a->named == b->named;
    case Expr::Kind::Variable:
      return true;
    case Expr::Kind::Negate:
      return equal_nodes(a->first.get(), b->first.get());
    case Expr::Kind::Call:
      return a->function == b->function && equal_nodes(a->first.get(), b->first.get());
    case Expr::Kind::Binary:
      return a->op == b->op && equal_nodes(a->first.get(), b->first.get()) &&
             equal_nodes(a->second.get(), b->second.get());
  }
  return false;
}

// Recursive-descent parser over a byte buffer.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    skip_ws();
    if (at_end()) fail("empty expression");
    Expr e = parse_sum();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("syntax error: " + what, pos_); }

  bool at_end() const { return pos_ >= src_.size(); }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (!at_end() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::negate(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return Expr::binary(BinaryOp::Pow, base, parse_unary());
    return base;
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (!at_end() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (!at_end() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail("numeric literal out of range");
    }
    return Expr::constant(value);
  }

  Expr parse_atom() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string_view ident = src_.substr(start, pos_ - start);
      skip_ws();
      const bool call = !at_end() && src_[pos_] == '(';
      if (ident == "t" || ident == "pi" || ident == "e") {
        if (call) {
          pos_ = start;
          fail("'" + std::string(ident) + "' is not a function");
        }
        if (ident == "t") return Expr::variable();
        return Expr::named(ident == "pi" ? NamedConstant::Pi : NamedConstant::E);
      }
      for (const auto& [name, f] : kFunctions) {
        if (name != ident) continue;
        if (!call) {
          pos_ = start;
          throw ParseError("arity mismatch: " + std::string(ident) + " expects 1 argument, got 0", start);
        }
        ++pos_;
        std::vector<Expr> args;
        skip_ws();
        if (!at_end() && src_[pos_] != ')') {
          args.push_back(parse_sum());
          while (accept(',')) args.push_back(parse_sum());
        }
        expect(')');
        if (args.size() != 1) {
          throw ParseError("arity mismatch: " + std::string(ident) + " expects 1 argument, got " +
                               std::to_string(args.size()),
                           start);
        }
        return Expr::call(f, args.front());
      }
      throw ParseError("unknown identifier '" + std::string(ident) + "'", start);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(double value) {
  if (value == 0.0 && !std::signbit(value)) return Expr();
  return Expr(make_constant(value));
}

Expr Expr::named(NamedConstant c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Named;
  n->named = c;
  return Expr(std::move(n));
}

Expr Expr::variable() {
  static const NodePtr var = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->has_t = true;
    return n;
  }();
  return Expr(var);
}

Expr Expr::negate(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Negate;
  n->has_t = operand.depends_on_t();
  n->first = std::move(operand.node_);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->has_t = lhs.depends_on_t() || rhs.depends_on_t();
  n->first = std::move(lhs.node_);
  n->second = std::move(rhs.node_);
  return Expr(std::move(n));
}

Expr Expr::call(Function f, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->function = f;
  n->has_t = arg.depends_on_t();
  n->first = std::move(arg.node_);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::constant_value() const noexcept { return node_->value; }
bool Expr::is_constant(double value) const noexcept {
  return node_->kind == Kind::Constant && node_->value == value;
}
bool Expr::depends_on_t() const noexcept { return node_->has_t; }
NamedConstant Expr::named_constant() const noexcept { return node_->named; }
BinaryOp Expr::op() const noexcept { return node_->op; }
Function Expr::function() const noexcept { return node_->function; }
Expr Expr::operand() const { return Expr(node_->first); }
Expr Expr::rhs() const { return Expr(node_->second); }

double Expr::eval(double t) const { return eval_node(*this, t); }

std::string Expr::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

bool operator==(const Expr& a, const Expr& b) { return equal_nodes(a.node_.get(), b.node_.get()); }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::binary(BinaryOp::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr::binary(BinaryOp::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr();
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return Expr::binary(BinaryOp::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr();
  return Expr::binary(BinaryOp::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant(0.0)) return a;
  if (a.kind() == Expr::Kind::Negate) return a.operand();
  return Expr::negate(a);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant(1.0)) return base;
  if (base.is_constant(1.0) && exponent.kind() == Expr::Kind::Constant) return base;
  return Expr::binary(BinaryOp::Pow, base, exponent);
}

Expr pow(const Expr& base, double exponent) { return pow(base, Expr::constant(exponent)); }
Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }

Expr sin(const Expr& e) { return Expr::call(Function::Sin, e); }
Expr cos(const Expr& e) { return Expr::call(Function::Cos, e); }
Expr exp(const Expr& e) { return Expr::call(Function::Exp, e); }
Expr log(const Expr& e) { return Expr::call(Function::Log, e); }
Expr sqrt(const Expr& e) { return Expr::call(Function::Sqrt, e); }

Expr parse_expr(std::string_view source) { return Parser(source).parse(); }

std::string_view function_name(Function f) noexcept {
  for (const auto& [name, fn] : kFunctions) {
    if (fn == f) return name;
  }
  return "?";
}

Expr derivative(const Expr& e) {
  if (!e.depends_on_t()) return Expr();
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Named:
      return Expr();
    case Expr::Kind::Variable:
      return Expr::constant(1.0);
    case Expr::Kind::Negate:
      return -derivative(e.operand());
    case Expr::Kind::Call: {
      const Expr u = e.operand();
      const Expr du = derivative(u);
      switch (e.function()) {
        case Function::Sin: return cos(u) * du;
        case Function::Cos: return -(sin(u) * du);
        case Function::Tan: return du / pow(cos(u), 2.0);
        case Function::Exp: return e * du;
        case Function::Log: return du / u;
        case Function::Sqrt: return du / (2.0 * e);
        case Function::Tanh: return (Expr::constant(1.0) - pow(e, 2.0)) * du;
        case Function::Sinh: return Expr::call(Function::Cosh, u) * du;
        case Function::Cosh: return Expr::call(Function::Sinh, u) * du;
      }
      return Expr();
    }
    case Expr::Kind::Binary: {
      const Expr u = e.operand();
      const Expr v = e.rhs();
      switch (e.op()) {
        case BinaryOp::Add: return derivative(u) + derivative(v);
        case BinaryOp::Sub: return derivative(u) - derivative(v);
        case BinaryOp::Mul: return derivative(u) * v + u * derivative(v);
        case BinaryOp::Div: {
          if (!v.depends_on_t()) return derivative(u) / v;
          return (derivative(u) * v - u * derivative(v)) / pow(v, 2.0);
        }
        case BinaryOp::Pow: {
          if (!v.depends_on_t()) {
            // n u^(n-1) u'
            const Expr reduced = v.kind() == Expr::Kind::Constant ? Expr::constant(v.constant_value() - 1.0)
                                                                  : v - Expr::constant(1.0);
            return v * pow(u, reduced) * derivative(u);
          }
          if (!u.depends_on_t()) return e * log(u) * derivative(v);
          return e * (derivative(v) * log(u) + v * derivative(u) / u);
        }
      }
    }
  }
  return Expr();
}

}  // namespace ermakov
