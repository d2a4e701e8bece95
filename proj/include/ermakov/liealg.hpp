#pragma once

// Vector fields with Laurent-polynomial coefficients over exact rationals.
//
// A field lives on an ordered list of phase variables; extra formal symbols
// (parameters such as the Milne-Pinney constant k) may appear in
// coefficients but are never differentiated. Coefficients are kept in
// canonical form: equal exponent multi-indices merged, zero terms dropped.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ermakov::lie {

using Rational = boost::multiprecision::cpp_rational;

/// Exponent bound on every symbol; larger exponents indicate runaway input.
inline constexpr int kMaxExponent = 16;

class VariableSet {
 public:
  VariableSet() = default;
  VariableSet(std::vector<std::string> phase, std::vector<std::string> parameters = {});

  std::size_t phase_count() const noexcept { return phase_.size(); }
  /// Phase variables followed by parameters.
  std::size_t symbol_count() const noexcept { return phase_.size() + parameters_.size(); }
  const std::string& symbol(std::size_t i) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool is_phase(std::size_t i) const noexcept { return i < phase_.size(); }

  const std::vector<std::string>& phase() const noexcept { return phase_; }
  const std::vector<std::string>& parameters() const noexcept { return parameters_; }

  friend bool operator==(const VariableSet&, const VariableSet&) = default;

 private:
  std::vector<std::string> phase_;
  std::vector<std::string> parameters_;
};

using Exponents = std::vector<int>;

/// Finite sum of q * prod(symbol_i ^ e_i); never stores zero coefficients.
class Laurent {
 public:
  Laurent() = default;

  static Laurent monomial(const Rational& coefficient, Exponents exponents);

  void add_term(const Rational& coefficient, const Exponents& exponents);
  bool is_zero() const noexcept { return terms_.empty(); }
  const std::map<Exponents, Rational>& terms() const noexcept { return terms_; }

  /// Partial derivative with respect to symbol `index`.
  Laurent partial(std::size_t index) const;

  Laurent& operator+=(const Laurent& other);
  Laurent& operator-=(const Laurent& other);
  Laurent& operator*=(const Rational& q);

  friend Laurent operator*(const Laurent& a, const Laurent& b);
  friend bool operator==(const Laurent&, const Laurent&) = default;

 private:
  std::map<Exponents, Rational> terms_;
};

class VectorField {
 public:
  explicit VectorField(VariableSet vars);

  const VariableSet& variables() const noexcept { return vars_; }
  const Laurent& component(std::size_t phase_index) const { return components_.at(phase_index); }
  void add(std::size_t phase_index, const Laurent& coefficient);

  bool is_zero() const noexcept;

  /// Applies the field as a derivation to a coefficient: sum_j A^j dP/dx_j.
  Laurent apply(const Laurent& p) const;

  std::string to_string() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(const Rational& q);

  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(const Rational& q, VectorField a) { return a *= q; }
  friend VectorField operator-(VectorField a) { return a *= Rational(-1); }
  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  VariableSet vars_;
  std::vector<Laurent> components_;
};

/// [A, B] = A(B) - B(A). Throws ConfigError on differing variable sets.
VectorField bracket(const VectorField& a, const VectorField& b);

/// Exact rational coefficients c with a = sum c_i basis_i, or nullopt.
/// Dependent bases yield the solution with free coefficients set to zero.
std::optional<std::vector<Rational>> in_span(const VectorField& a, const std::vector<VectorField>& basis);

/// Parses notation such as "v*d/dx + k*x^-3*d/dv" or "1/2*(x*d/dx - v*d/dv)".
VectorField parse_vector_field(std::string_view text, const VariableSet& vars);

std::string to_string(const Rational& q);

// ---------------------------------------------------------------------------
// Named field collections and structure verification.

/// Named fields sharing a variable set.
class FieldAlgebra {
 public:
  explicit FieldAlgebra(VariableSet vars) : vars_(std::move(vars)) {}

  void define(std::string name, VectorField field);
  void define(std::string name, std::string_view notation);
  const VectorField& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  const VariableSet& variables() const noexcept { return vars_; }
  const std::vector<std::pair<std::string, VectorField>>& fields() const noexcept { return fields_; }

 private:
  VariableSet vars_;
  std::vector<std::pair<std::string, VectorField>> fields_;
};

using Combination = std::vector<std::pair<Rational, std::string>>;

/// Claim [lhs, rhs] = sum of expected terms.
struct Relation {
  std::string lhs;
  std::string rhs;
  Combination expected;
};

/// Claim that [lhs, rhs] lies (member = true) or does not lie in span(basis).
struct SpanClaim {
  std::string lhs;
  std::string rhs;
  std::vector<std::string> basis;
  bool member = true;
};

struct RelationResult {
  Relation relation;
  bool pass = false;
  VectorField computed;
};

struct SpanResult {
  SpanClaim claim;
  bool pass = false;
  std::optional<std::vector<Rational>> coefficients;
  VectorField computed;
};

struct StructureReport {
  std::vector<RelationResult> relations;
  std::vector<SpanResult> spans;

  bool all_pass() const noexcept;
  /// One line per check, e.g. "[X1,X2] = 2*X3  PASS (exact)".
  std::string to_string() const;
};

StructureReport verify_structure(const FieldAlgebra& algebra, const std::vector<Relation>& relations,
                                 const std::vector<SpanClaim>& spans = {});

/// Claims [w, v] in span(V) for every w in `subalgebra` and v in `space`.
std::vector<SpanClaim> invariance_claims(const std::vector<std::string>& subalgebra,
                                         const std::vector<std::string>& space);

std::string format_combination(const Combination& c);

/// A ready-made check: fields, relations, span claims.
struct StructureCheck {
  std::string name;
  FieldAlgebra algebra;
  std::vector<Relation> relations;
  std::vector<SpanClaim> spans;
};

/// X1 = x d/dv, X2 = v d/dx + k x^-3 d/dv, X3 = (x d/dx - v d/dv)/2.
StructureCheck sl2_check();
/// N1, N2, N3 on (x, y, z, v_x, v_y, v_z) with symbolic k.
StructureCheck extended_sl2_check();
/// X1..X5 on (x, v), the Lie subalgebra Y1 = X1, Y2 = X2 and [W, V] in V,
/// plus [X3, X4] outside V.
StructureCheck quasi_lie_check();

/// "sl2", "sl2-extended", "quasi-lie". Throws ConfigError otherwise.
StructureCheck named_check(std::string_view name);

}  // namespace ermakov::lie
