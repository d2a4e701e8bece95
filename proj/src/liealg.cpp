#include "ermakov/liealg.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "ermakov/error.hpp"

namespace ermakov::lie {

namespace {

void check_exponents(const Exponents& e) {
  for (int x : e) {
    if (x > kMaxExponent || x < -kMaxExponent) {
      throw DomainError("Laurent exponent " + std::to_string(x) + " exceeds the bound of " +
                        std::to_string(kMaxExponent));
    }
  }
}

}  // namespace

std::string to_string(const Rational& q) { return q.str(); }

VariableSet::VariableSet(std::vector<std::string> phase, std::vector<std::string> parameters)
    : phase_(std::move(phase)), parameters_(std::move(parameters)) {
  std::vector<std::string> all = phase_;
  all.insert(all.end(), parameters_.begin(), parameters_.end());
  std::vector<std::string> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("duplicate symbol in variable set");
  }
  for (const auto& name : all) {
    if (name.empty() || name == "d") throw ConfigError("invalid symbol name '" + name + "'");
  }
}

const std::string& VariableSet::symbol(std::size_t i) const {
  return i < phase_.size() ? phase_.at(i) : parameters_.at(i - phase_.size());
}

std::optional<std::size_t> VariableSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < symbol_count(); ++i) {
    if (symbol(i) == name) return i;
  }
  return std::nullopt;
}

Laurent Laurent::monomial(const Rational& coefficient, Exponents exponents) {
  Laurent l;
  l.add_term(coefficient, exponents);
  return l;
}

void Laurent::add_term(const Rational& coefficient, const Exponents& exponents) {
  if (coefficient == 0) return;
  check_exponents(exponents);
  auto [it, inserted] = terms_.try_emplace(exponents, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0) terms_.erase(it);
  }
}

Laurent Laurent::partial(std::size_t index) const {
  Laurent out;
  for (const auto& [e, q] : terms_) {
    if (e.at(index) == 0) continue;
    Exponents d = e;
    d[index] -= 1;
    out.add_term(q * e[index], d);
  }
  return out;
}

Laurent& Laurent::operator+=(const Laurent& other) {
  for (const auto& [e, q] : other.terms_) add_term(q, e);
  return *this;
}

Laurent& Laurent::operator-=(const Laurent& other) {
  for (const auto& [e, q] : other.terms_) add_term(-q, e);
  return *this;
}

Laurent& Laurent::operator*=(const Rational& q) {
  if (q == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= q;
  return *this;
}

Laurent operator*(const Laurent& a, const Laurent& b) {
  Laurent out;
  for (const auto& [ea, qa] : a.terms_) {
    for (const auto& [eb, qb] : b.terms_) {
      Exponents e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb.at(i);
      out.add_term(qa * qb, e);
    }
  }
  return out;
}

VectorField::VectorField(VariableSet vars) : vars_(std::move(vars)), components_(vars_.phase_count()) {}

void VectorField::add(std::size_t phase_index, const Laurent& coefficient) {
  for (const auto& [e, q] : coefficient.terms()) {
    if (e.size() != vars_.symbol_count()) throw ConfigError("monomial arity does not match variable set");
  }
  components_.at(phase_index) += coefficient;
}

bool VectorField::is_zero() const noexcept {
  return std::all_of(components_.begin(), components_.end(), [](const Laurent& l) { return l.is_zero(); });
}

Laurent VectorField::apply(const Laurent& p) const {
  Laurent out;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    if (components_[j].is_zero()) continue;
    out += components_[j] * p.partial(j);
  }
  return out;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  if (!(vars_ == other.vars_)) throw ConfigError("vector fields over different variable sets");
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += other.components_[i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  if (!(vars_ == other.vars_)) throw ConfigError("vector fields over different variable sets");
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= other.components_[i];
  return *this;
}

VectorField& VectorField::operator*=(const Rational& q) {
  for (auto& c : components_) c *= q;
  return *this;
}

std::string VectorField::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    for (const auto& [e, q] : components_[i].terms()) {
      Rational mag = q < 0 ? Rational(-q) : q;
      if (out.empty()) {
        if (q < 0) out += "-";
      } else {
        out += q < 0 ? " - " : " + ";
      }
      if (mag != 1) out += mag.str() + "*";
      // Parameters first: k*x^-3 rather than x^-3*k.
      const std::size_t np = vars_.phase_count();
      for (std::size_t j = 0; j < e.size(); ++j) {
        const std::size_t s = j < e.size() - np ? np + j : j - (e.size() - np);
        if (e[s] == 0) continue;
        out += vars_.symbol(s);
        if (e[s] != 1) out += "^" + std::to_string(e[s]);
        out += "*";
      }
      out += "d/d" + vars_.symbol(i);
    }
  }
  return out.empty() ? "0" : out;
}

VectorField bracket(const VectorField& a, const VectorField& b) {
  if (!(a.variables() == b.variables())) throw ConfigError("bracket of fields over different variable sets");
  VectorField out(a.variables());
  for (std::size_t i = 0; i < a.variables().phase_count(); ++i) {
    Laurent c = a.apply(b.component(i));
    c -= b.apply(a.component(i));
    out.add(i, c);
  }
  return out;
}

std::optional<std::vector<Rational>> in_span(const VectorField& a, const std::vector<VectorField>& basis) {
  for (const auto& b : basis) {
    if (!(b.variables() == a.variables())) throw ConfigError("span test over different variable sets");
  }
  const std::size_t m = basis.size();

  // One equation per (component, monomial) slot present anywhere.
  using Slot = std::pair<std::size_t, Exponents>;
  std::map<Slot, std::size_t> slots;
  auto collect = [&](const VectorField& f) {
    for (std::size_t i = 0; i < f.variables().phase_count(); ++i) {
      for (const auto& [e, q] : f.component(i).terms()) slots.try_emplace(Slot{i, e}, slots.size());
    }
  };
  collect(a);
  for (const auto& b : basis) collect(b);

  std::vector<std::vector<Rational>> rows(slots.size(), std::vector<Rational>(m + 1));
  auto fill = [&](const VectorField& f, std::size_t col) {
    for (std::size_t i = 0; i < f.variables().phase_count(); ++i) {
      for (const auto& [e, q] : f.component(i).terms()) rows[slots.at(Slot{i, e})][col] = q;
    }
  };
  for (std::size_t j = 0; j < m; ++j) fill(basis[j], j);
  fill(a, m);

  // Gauss-Jordan elimination over the rationals.
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t col = 0; col < m && r < rows.size(); ++col) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][col] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    const Rational inv = 1 / rows[r][col];
    for (auto& x : rows[r]) x *= inv;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == r || rows[k][col] == 0) continue;
      const Rational f = rows[k][col];
      for (std::size_t c = col; c <= m; ++c) rows[k][c] -= f * rows[r][c];
    }
    pivot_cols.push_back(col);
    ++r;
  }
  for (std::size_t k = r; k < rows.size(); ++k) {
    if (rows[k][m] != 0) return std::nullopt;
  }
  std::vector<Rational> coeffs(m, Rational(0));
  for (std::size_t k = 0; k < pivot_cols.size(); ++k) coeffs[pivot_cols[k]] = rows[k][m];
  return coeffs;
}

// ---------------------------------------------------------------------------
// Field notation parser.

namespace {

// A partial product: scalar * monomial, with at most one d/d factor.
struct Term {
  Rational coefficient{1};
  Exponents exponents;
  std::optional<std::size_t> direction;
};

using Sum = std::vector<Term>;

class FieldParser {
 public:
  FieldParser(std::string_view src, const VariableSet& vars) : src_(src), vars_(vars) {}

  VectorField parse() {
    skip_ws();
    if (at_end()) fail("empty vector field");
    Sum sum = parse_sum();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + src_[pos_] + "'");
    VectorField out(vars_);
    for (const auto& term : sum) {
      if (term.coefficient == 0) continue;
      if (!term.direction) fail("term without a d/d<var> factor");
      out.add(*term.direction, Laurent::monomial(term.coefficient, term.exponents));
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("vector field: " + what, pos_); }
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

  Term unit() const {
    Term t;
    t.exponents.assign(vars_.symbol_count(), 0);
    return t;
  }

  Sum parse_sum() {
    Sum out;
    bool negative = accept('-');
    if (!negative) accept('+');
    for (;;) {
      Sum product = parse_product();
      if (negative) {
        for (auto& t : product) t.coefficient = -t.coefficient;
      }
      out.insert(out.end(), product.begin(), product.end());
      if (accept('+')) {
        negative = false;
      } else if (accept('-')) {
        negative = true;
      } else {
        return out;
      }
    }
  }

  Sum multiply(const Sum& a, const Sum& b) {
    Sum out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        if (x.direction && y.direction) fail("more than one d/d factor in a term");
        Term t = unit();
        t.coefficient = x.coefficient * y.coefficient;
        for (std::size_t i = 0; i < t.exponents.size(); ++i) t.exponents[i] = x.exponents[i] + y.exponents[i];
        t.direction = x.direction ? x.direction : y.direction;
        out.push_back(std::move(t));
      }
    }
    return out;
  }

  Sum parse_product() {
    Sum acc{unit()};
    acc = multiply(acc, parse_factor());
    while (accept('*')) acc = multiply(acc, parse_factor());
    return acc;
  }

  long parse_integer() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    if (pos_ - start > 15) fail("integer literal too long");
    return std::strtol(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr, 10);
  }

  Sum parse_factor() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Sum inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Term t = unit();
      t.coefficient = Rational(parse_integer());
      // "p/q" is a rational literal; "/" is not otherwise an operator here.
      skip_ws();
      if (!at_end() && src_[pos_] == '/') {
        ++pos_;
        const long den = parse_integer();
        if (den == 0) fail("zero denominator");
        t.coefficient /= den;
      }
      return {t};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string_view ident = src_.substr(start, pos_ - start);
      if (ident == "d") {
        if (!accept('/')) fail("expected '/' in d/d<var>");
        skip_ws();
        if (at_end() || src_[pos_] != 'd') fail("expected 'd' after 'd/'");
        ++pos_;
        const std::size_t vstart = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string_view var = src_.substr(vstart, pos_ - vstart);
        const auto idx = vars_.index_of(var);
        if (!idx || !vars_.is_phase(*idx)) {
          throw ParseError("vector field: d/d" + std::string(var) + " is not a phase variable", vstart);
        }
        Term t = unit();
        t.direction = *idx;
        return {t};
      }
      const auto idx = vars_.index_of(ident);
      if (!idx) throw ParseError("vector field: unknown symbol '" + std::string(ident) + "'", start);
      int power = 1;
      if (accept('^')) {
        const bool neg = accept('-');
        const long p = parse_integer();
        if (p > kMaxExponent) fail("exponent exceeds bound");
        power = static_cast<int>(neg ? -p : p);
      }
      Term t = unit();
      t.exponents[*idx] = power;
      return {t};
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view src_;
  const VariableSet& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

VectorField parse_vector_field(std::string_view text, const VariableSet& vars) {
  return FieldParser(text, vars).parse();
}

// ---------------------------------------------------------------------------

void FieldAlgebra::define(std::string name, VectorField field) {
  if (!(field.variables() == vars_)) throw ConfigError("field '" + name + "' uses a different variable set");
  for (auto& [n, f] : fields_) {
    if (n == name) {
      f = std::move(field);
      return;
    }
  }
  fields_.emplace_back(std::move(name), std::move(field));
}

void FieldAlgebra::define(std::string name, std::string_view notation) {
  define(std::move(name), parse_vector_field(notation, vars_));
}

const VectorField& FieldAlgebra::get(std::string_view name) const {
  for (const auto& [n, f] : fields_) {
    if (n == name) return f;
  }
  throw ConfigError("undefined vector field '" + std::string(name) + "'");
}

bool FieldAlgebra::contains(std::string_view name) const {
  return std::any_of(fields_.begin(), fields_.end(), [&](const auto& p) { return p.first == name; });
}

std::string format_combination(const Combination& c) {
  std::string out;
  for (const auto& [q, name] : c) {
    if (q == 0) continue;
    const Rational mag = q < 0 ? Rational(-q) : q;
    if (out.empty()) {
      if (q < 0) out += "-";
    } else {
      out += q < 0 ? " - " : " + ";
    }
    if (mag != 1) out += mag.str() + "*";
    out += name;
  }
  return out.empty() ? "0" : out;
}

bool StructureReport::all_pass() const noexcept {
  return std::all_of(relations.begin(), relations.end(), [](const auto& r) { return r.pass; }) &&
         std::all_of(spans.begin(), spans.end(), [](const auto& s) { return s.pass; });
}

std::string StructureReport::to_string() const {
  std::ostringstream os;
  for (const auto& r : relations) {
    os << "[" << r.relation.lhs << "," << r.relation.rhs << "] = " << format_combination(r.relation.expected) << "  ";
    if (r.pass) {
      os << "PASS (exact)\n";
    } else {
      os << "FAIL (computed: " << r.computed.to_string() << ")\n";
    }
  }
  for (const auto& s : spans) {
    std::string basis;
    for (const auto& b : s.claim.basis) basis += (basis.empty() ? "" : ",") + b;
    os << "[" << s.claim.lhs << "," << s.claim.rhs << "] " << (s.claim.member ? "in" : "not in") << " span{" << basis
       << "}  ";
    if (s.pass) {
      os << "PASS (exact)";
      if (s.coefficients) {
        Combination c;
        for (std::size_t i = 0; i < s.coefficients->size(); ++i) c.emplace_back((*s.coefficients)[i], s.claim.basis[i]);
        os << " = " << format_combination(c);
      }
      os << "\n";
    } else {
      os << "FAIL (computed: " << s.computed.to_string() << ")\n";
    }
  }
  return os.str();
}

StructureReport verify_structure(const FieldAlgebra& algebra, const std::vector<Relation>& relations,
                                 const std::vector<SpanClaim>& spans) {
  StructureReport report;
  for (const auto& rel : relations) {
    VectorField computed = bracket(algebra.get(rel.lhs), algebra.get(rel.rhs));
    VectorField expected(algebra.variables());
    for (const auto& [q, name] : rel.expected) expected += q * algebra.get(name);
    const bool pass = computed == expected;
    report.relations.push_back(RelationResult{rel, pass, std::move(computed)});
  }
  for (const auto& claim : spans) {
    VectorField computed = bracket(algebra.get(claim.lhs), algebra.get(claim.rhs));
    std::vector<VectorField> basis;
    for (const auto& b : claim.basis) basis.push_back(algebra.get(b));
    auto coeffs = in_span(computed, basis);
    const bool pass = coeffs.has_value() == claim.member;
    report.spans.push_back(SpanResult{claim, pass, std::move(coeffs), std::move(computed)});
  }
  return report;
}

std::vector<SpanClaim> invariance_claims(const std::vector<std::string>& subalgebra,
                                         const std::vector<std::string>& space) {
  std::vector<SpanClaim> out;
  for (const auto& w : subalgebra) {
    for (const auto& v : space) out.push_back(SpanClaim{w, v, space, true});
  }
  return out;
}

StructureCheck sl2_check() {
  FieldAlgebra alg(VariableSet({"x", "v"}, {"k"}));
  alg.define("X1", "x*d/dv");
  alg.define("X2", "v*d/dx + k*x^-3*d/dv");
  alg.define("X3", "1/2*(x*d/dx - v*d/dv)");
  std::vector<Relation> rels{
      {"X1", "X2", {{Rational(2), "X3"}}},
      {"X3", "X2", {{Rational(-1), "X2"}}},
      {"X3", "X1", {{Rational(1), "X1"}}},
  };
  return {"sl2", std::move(alg), std::move(rels), {}};
}

StructureCheck extended_sl2_check() {
  FieldAlgebra alg(VariableSet({"x", "y", "z", "v_x", "v_y", "v_z"}, {"k"}));
  alg.define("N1", "y*d/dv_y + x*d/dv_x + z*d/dv_z");
  alg.define("N2", "v_x*d/dx + v_y*d/dy + v_z*d/dz + k*x^-3*d/dv_x");
  alg.define("N3", "1/2*(x*d/dx + y*d/dy + z*d/dz - v_x*d/dv_x - v_y*d/dv_y - v_z*d/dv_z)");
  std::vector<Relation> rels{
      {"N1", "N2", {{Rational(2), "N3"}}},
      {"N3", "N1", {{Rational(1), "N1"}}},
      {"N2", "N3", {{Rational(1), "N2"}}},
  };
  return {"sl2-extended", std::move(alg), std::move(rels), {}};
}

StructureCheck quasi_lie_check() {
  FieldAlgebra alg(VariableSet({"x", "v"}));
  alg.define("X1", "v*d/dv");
  alg.define("X2", "x*d/dv");
  alg.define("X3", "x^-3*d/dv");
  alg.define("X4", "v*d/dx");
  alg.define("X5", "x*d/dx");
  alg.define("Y1", alg.get("X1"));
  alg.define("Y2", alg.get("X2"));
  std::vector<Relation> rels{
      {"Y1", "Y2", {{Rational(-1), "Y2"}}},
      {"Y1", "X3", {{Rational(-1), "X3"}}},
      {"Y1", "X4", {{Rational(1), "X4"}}},
      {"Y1", "X5", {}},
      {"Y2", "X3", {}},
      {"Y2", "X4", {{Rational(1), "X5"}, {Rational(-1), "X1"}}},
      {"Y2", "X5", {{Rational(-1), "X2"}}},
  };
  const std::vector<std::string> space{"X1", "X2", "X3", "X4", "X5"};
  std::vector<SpanClaim> spans = invariance_claims({"Y1", "Y2"}, space);
  spans.push_back(SpanClaim{"X3", "X4", space, false});
  return {"quasi-lie", std::move(alg), std::move(rels), std::move(spans)};
}

StructureCheck named_check(std::string_view name) {
  if (name == "sl2") return sl2_check();
  if (name == "sl2-extended") return extended_sl2_check();
  if (name == "quasi-lie") return quasi_lie_check();
  throw ConfigError("unknown structure check '" + std::string(name) + "'");
}

}  // namespace ermakov::lie
