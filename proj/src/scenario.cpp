#include "ermakov/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ermakov/error.hpp"

namespace ermakov::cli {

namespace {

const std::set<std::string, std::less<>> kSections{"system", "time", "action", "output"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view text, const std::string& what) {
  double v = 0.0;
  const auto s = trim(text);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    throw ConfigError(what + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

/// Key lookup over one section that remembers which keys were consumed.
class Keys {
 public:
  Keys(const ConfigFile& file, std::string section) : name_(std::move(section)) {
    const auto it = file.sections().find(name_);
    if (it != file.sections().end()) entries_ = &it->second;
  }

  bool present() const noexcept { return entries_ != nullptr; }

  bool has(std::string_view key) const { return find(key) != nullptr; }

  std::optional<std::string> take(std::string_view key) {
    const std::string* v = find(key);
    if (v == nullptr) return std::nullopt;
    used_.insert(std::string(key));
    return *v;
  }

  std::string require(std::string_view key) {
    auto v = take(key);
    if (!v) throw ConfigError("missing [" + name_ + "] " + std::string(key));
    return *v;
  }

  std::optional<double> number(std::string_view key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    return parse_number(*v, label(key));
  }

  double number_or(std::string_view key, double fallback) { return number(key).value_or(fallback); }

  double require_number(std::string_view key) { return parse_number(require(key), label(key)); }

  std::optional<Expr> expr(std::string_view key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    return parse_expr(*v);
  }

  Expr expr_or(std::string_view key, const char* fallback) {
    auto e = expr(key);
    return e ? *e : parse_expr(fallback);
  }

  Expr require_expr(std::string_view key) { return parse_expr(require(key)); }

  std::optional<bool> boolean(std::string_view key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError(label(key) + ": expected true or false, got '" + *v + "'");
  }

  /// Entries "prefix.name = value" in file order, as (name, value).
  std::vector<std::pair<std::string, std::string>> prefixed(std::string_view prefix) {
    std::vector<std::pair<std::string, std::string>> out;
    if (entries_ == nullptr) return out;
    for (const auto& [k, v] : *entries_) {
      if (k.size() > prefix.size() + 1 && k.compare(0, prefix.size(), prefix) == 0 && k[prefix.size()] == '.') {
        out.emplace_back(k.substr(prefix.size() + 1), v);
        used_.insert(k);
      }
    }
    return out;
  }

  /// Rejects keys nobody asked for.
  void finish() const {
    if (entries_ == nullptr) return;
    for (const auto& [k, v] : *entries_) {
      if (!used_.count(k)) throw ConfigError("unexpected key [" + name_ + "] " + k);
    }
  }

 private:
  const std::string* find(std::string_view key) const {
    if (entries_ == nullptr) return nullptr;
    for (const auto& [k, v] : *entries_) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  std::string label(std::string_view key) const { return "[" + name_ + "] " + std::string(key); }

  std::string name_;
  const ConfigFile::Section* entries_ = nullptr;
  std::set<std::string> used_;
};

Action parse_action(const std::string& s) {
  if (s == "integrate") return Action::Integrate;
  if (s == "reduce") return Action::Reduce;
  if (s == "reparametrize") return Action::Reparametrize;
  if (s == "superpose") return Action::Superpose;
  if (s == "verify") return Action::Verify;
  if (s == "algebra-check") return Action::AlgebraCheck;
  throw ConfigError("unknown action '" + s + "'");
}

Branch parse_branch(const std::string& s) {
  if (s == "plus" || s == "+") return Branch::Plus;
  if (s == "minus" || s == "-") return Branch::Minus;
  if (s == "both") return Branch::Both;
  throw ConfigError("branch must be plus, minus or both, got '" + s + "'");
}

NamedParams named_params(Keys& sys, const std::string& name) {
  NamedParams np;
  if (name == "caldirola-kanai") {
    np.gamma0 = sys.require_number("gamma0");
    np.omega = sys.expr_or("omega", "1");
    np.k0 = sys.number_or("k0", 1.0);
  } else {
    np.p = sys.expr_or("p", "1");
    np.q = sys.expr_or("q", "1");
    np.k = sys.number_or("k", 1.0);
  }
  return np;
}

SecondOrderSystem second_order_system(Keys& sys) {
  if (auto name = sys.take("name")) return named_system(*name, named_params(sys, *name));
  return {sys.expr_or("a", "0"), sys.require_expr("b"), sys.expr_or("c", "0")};
}

std::optional<PhasePoint> initial_data(Keys& act, bool required) {
  const bool hx = act.has("x0");
  const bool hv = act.has("v0");
  if (!hx && !hv) {
    if (required) throw ConfigError("missing [action] x0 and v0");
    return std::nullopt;
  }
  if (hx != hv) throw ConfigError("[action] x0 and v0 must be given together");
  return PhasePoint{act.require_number("x0"), act.require_number("v0")};
}

// "2*X3 - X2 + 1/2*X1", or "0".
lie::Combination parse_combination(std::string_view text) {
  lie::Combination out;
  const std::string_view s = trim(text);
  if (s == "0") return out;
  std::size_t i = 0;
  bool first = true;
  auto fail = [&](const std::string& why) {
    throw ConfigError("bad combination '" + std::string(text) + "': " + why);
  };
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    int sign = 1;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      fail("expected + or -");
    }
    while (i < s.size() && s[i] == ' ') ++i;
    lie::Rational coeff(1);
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      long long num = 0;
      long long den = 1;
      auto r = std::from_chars(s.data() + i, s.data() + s.size(), num);
      i = static_cast<std::size_t>(r.ptr - s.data());
      if (i < s.size() && s[i] == '/') {
        r = std::from_chars(s.data() + i + 1, s.data() + s.size(), den);
        if (r.ec != std::errc() || den == 0) fail("bad denominator");
        i = static_cast<std::size_t>(r.ptr - s.data());
      }
      coeff = lie::Rational(num, den);
      while (i < s.size() && s[i] == ' ') ++i;
      if (i >= s.size() || s[i] != '*') fail("expected '*' after coefficient");
      ++i;
      while (i < s.size() && s[i] == ' ') ++i;
    }
    const std::size_t start = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    if (i == start) fail("expected a field name");
    out.emplace_back(sign < 0 ? lie::Rational(-coeff) : coeff, std::string(s.substr(start, i - start)));
    first = false;
    while (i < s.size() && s[i] == ' ') ++i;
  }
  if (out.empty()) fail("empty");
  return out;
}

// "[A,B]" at the front of a claim; returns the rest.
std::string_view parse_bracket(std::string_view s, std::string& lhs, std::string& rhs) {
  s = trim(s);
  const auto close = s.find(']');
  if (s.empty() || s[0] != '[' || close == std::string_view::npos) {
    throw ConfigError("expected '[A,B]' in '" + std::string(s) + "'");
  }
  const auto names = split_list(s.substr(1, close - 1));
  if (names.size() != 2) throw ConfigError("bracket needs exactly two fields in '" + std::string(s) + "'");
  lhs = names[0];
  rhs = names[1];
  return trim(s.substr(close + 1));
}

lie::Relation parse_relation(std::string_view text) {
  lie::Relation r;
  std::string_view rest = parse_bracket(text, r.lhs, r.rhs);
  if (rest.empty() || rest[0] != '=') throw ConfigError("relation needs '=' in '" + std::string(text) + "'");
  r.expected = parse_combination(rest.substr(1));
  return r;
}

// "[A,B] in X1,X2" or "[A,B] not in span{X1,X2}".
lie::SpanClaim parse_span(std::string_view text) {
  lie::SpanClaim c;
  std::string_view rest = parse_bracket(text, c.lhs, c.rhs);
  if (rest.substr(0, 6) == "not in") {
    c.member = false;
    rest = trim(rest.substr(6));
  } else if (rest.substr(0, 2) == "in") {
    rest = trim(rest.substr(2));
  } else {
    throw ConfigError("span claim needs 'in' or 'not in' in '" + std::string(text) + "'");
  }
  if (rest.substr(0, 5) == "span{" && !rest.empty() && rest.back() == '}') rest = rest.substr(5, rest.size() - 6);
  c.basis = split_list(rest);
  if (c.basis.empty()) throw ConfigError("empty span in '" + std::string(text) + "'");
  return c;
}

void load_time(Keys& time, Scenario& sc, const Overrides& ov) {
  if (!time.present()) throw ConfigError("missing [time] section");
  sc.time.t0 = time.number_or("t0", 0.0);
  sc.time.t1 = time.require_number("t1");
  sc.time.step = ov.step.value_or(time.number_or("step", kDefaultStep));
  if (!(sc.time.t1 > sc.time.t0)) throw ConfigError("[time] requires t1 > t0");
  if (!(sc.time.step > 0.0)) throw ConfigError("[time] step must be positive");
}

// ---------------------------------------------------------------------------
// Output.

class Csv {
 public:
  Csv(const std::vector<std::string>& header, int precision) : precision_(precision) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) text_ += ',';
      text_ += header[i];
    }
    text_ += '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ',';
      text_ += format_number(v, precision_);
      first = false;
    }
    text_ += '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) text_ += ',';
      text_ += format_number(values[i], precision_);
    }
    text_ += '\n';
  }

  std::string str() && { return std::move(text_); }

 private:
  int precision_;
  std::string text_;
};

std::vector<double> time_grid(const TimeWindow& w) { return grid_times(w.t0, w.t1, w.step); }

std::string describe(const ReducibilityReport& r) {
  std::string s = "reducibility: ";
  s += r.pass ? "PASS" : "FAIL";
  s += " max residual " + format_number(r.max_residual, 6) + " at t=" + format_number(r.max_residual_at, 6);
  s += " (threshold " + format_number(r.threshold, 6) + ")";
  if (r.k) s += ", k = " + format_number(*r.k, 17);
  s += '\n';
  return s;
}

RunResult run_integrate(const Scenario& sc) {
  const Trajectory tr =
      integrate_system(sc.system, sc.time.t0, sc.time.t1, sc.time.step, sc.initial->x, sc.initial->v, sc.x_min);
  Csv csv({"t", "x", "v"}, sc.precision);
  for (std::size_t i = 0; i < tr.size(); ++i) csv.row({tr.time(i), tr.value(i, 0), tr.value(i, 1)});
  return {std::move(csv).str(), {}, 0};
}

RunResult run_damping(const Scenario& sc) {
  const ReducedPinney r = remove_damping(sc.damped, sc.time.t0, sc.time.t1, sc.time.step, sc.zeta0);
  if (!sc.initial) {
    Csv csv({"t", "zeta", "Omega2", "coupling"}, sc.precision);
    for (double t : time_grid(sc.time)) csv.row({t, r.zeta()(t), r.omega2().eval(t), r.coupling(t)});
    return {std::move(csv).str(), {}, 0};
  }
  const auto [y0, w0] = r.push_forward(sc.time.t0, sc.initial->x, sc.initial->v);
  IntegrateOptions opts;
  opts.singular_components = {0};
  opts.x_min = sc.x_min;
  const double init[] = {y0, w0};
  const Trajectory tr = rk4_integrate(r.field(), sc.time.t0, sc.time.t1, sc.time.step, init, opts);
  Csv csv({"t", "zeta", "Omega2", "coupling", "y", "w", "x", "v"}, sc.precision);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.time(i);
    const auto [x, v] = r.pull_back(t, tr.value(i, 0), tr.value(i, 1));
    csv.row({t, r.zeta()(t), r.omega2().eval(t), r.coupling(t), tr.value(i, 0), tr.value(i, 1), x, v});
  }
  return {std::move(csv).str(), {}, 0};
}

RunResult run_quasi_lie(const Scenario& sc) {
  std::string notes;
  GaugeTransform g;
  if (sc.gauge) {
    g = *sc.gauge;
  } else {
    ReducibilityOptions opts;
    opts.seed = sc.seed;
    const ReducibilityReport rep = reducibility_check(sc.system, sc.time.t0, sc.time.t1, opts);
    notes += describe(rep);
    if (!rep.pass) {
      throw VerificationError("system fails the reducibility condition c'/(2c) = a (max residual " +
                              format_number(rep.max_residual, 6) + ")");
    }
    g = *rep.gauge;
  }
  notes += "gauge: alpha = " + g.alpha.to_string() + ", beta = " + g.beta.to_string() + '\n';
  const TransformedCoefficients tc = quasi_lie_transform(sc.system, g);
  Csv csv({"t", "a", "b", "c", "d", "e"}, sc.precision);
  for (double t : time_grid(sc.time)) csv.row({t, tc.a.eval(t), tc.b.eval(t), tc.c.eval(t), tc.d.eval(t), tc.e.eval(t)});
  return {std::move(csv).str(), std::move(notes), 0};
}

RunResult run_reparametrize(const Scenario& sc) {
  const ReparametrizedSystem r = reparametrize(sc.system, sc.alpha, sc.time.t0, sc.time.t1, sc.time.step);
  const SecondOrderSystem& in_t = r.coefficients_in_t();
  if (!sc.initial) {
    Csv csv({"t", "s", "A", "B", "C"}, sc.precision);
    for (double t : time_grid(sc.time)) csv.row({t, r.s_of_t(t), in_t.a.eval(t), in_t.b.eval(t), in_t.c.eval(t)});
    return {std::move(csv).str(), {}, 0};
  }
  if (!r.map().increasing()) throw DomainError("solution transport requires alpha > 0");
  IntegrateOptions opts;
  opts.singular_components = {0};
  opts.x_min = sc.x_min;
  const double init[] = {sc.initial->x, r.to_s_velocity(sc.time.t0, sc.initial->v)};
  const Trajectory tr = rk4_integrate(r.field(), r.s_begin(), r.s_end(), sc.time.step, init, opts);
  Csv csv({"s", "t", "x", "dxds"}, sc.precision);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double s = tr.time(i);
    csv.row({s, r.t_of_s(s), tr.value(i, 0), tr.value(i, 1)});
  }
  return {std::move(csv).str(), {}, 0};
}

RunResult run_superpose(const Scenario& sc) {
  std::string notes;
  Expr q = sc.q;
  Expr F = sc.F;
  double k = sc.k;
  if (sc.from_named) {
    ReducibilityOptions opts;
    opts.seed = sc.seed;
    const ReducibilityReport rep = reducibility_check(sc.system, sc.time.t0, sc.time.t1, opts);
    notes += describe(rep);
    if (!rep.pass) throw VerificationError("system is not reducible to Ermakov form on the given window");
    const ErmakovSystem e = ermakov_form(sc.system, rep);
    q = e.omega2 * e.f;
    F = -log(e.f);
    k = e.k;
  }

  const LinearPairOptions pair;
  SuperpositionConstants base;
  if (sc.constants) {
    base = *sc.constants;
  } else {
    const double em = std::exp(-F.eval(sc.time.t0));
    base = constants_from_state(*sc.initial, {pair.y0.x, em * pair.y0.v}, {pair.z0.x, em * pair.z0.v}, k,
                                F.eval(sc.time.t0));
    notes += "constants: I1 = " + format_number(base.I1, 17) + ", I2 = " + format_number(base.I2, 17) +
             ", W = " + format_number(base.W, 17) + ", branch " + (base.sign > 0 ? "plus" : "minus") + '\n';
  }

  std::vector<GeneralSolution> solutions;
  std::vector<std::string> suffixes;
  auto add = [&](int sign, const char* suffix) {
    SuperpositionConstants c = base;
    c.sign = sign;
    solutions.push_back(general_solution(q, F, k, c, sc.time.t0, sc.time.t1, sc.time.step, pair));
    suffixes.emplace_back(suffix);
  };
  Branch branch = sc.branch;
  if (!sc.constants && branch != Branch::Both) {
    // The branch is fixed by the initial data unless both were requested.
    branch = base.sign > 0 ? Branch::Plus : Branch::Minus;
  }
  if (branch == Branch::Both) {
    add(+1, "_plus");
    add(-1, "_minus");
  } else {
    add(branch == Branch::Plus ? +1 : -1, "");
  }

  std::vector<std::string> header{"t"};
  for (const auto& s : suffixes) {
    header.push_back("x" + s);
    header.push_back("v" + s);
  }
  if (sc.diagnostics) {
    for (const auto& s : suffixes) {
      header.push_back("I1" + s);
      header.push_back("I2" + s);
    }
    header.emplace_back("W");
  }
  Csv csv(header, sc.precision);
  const GeneralSolution& first = solutions.front();
  std::vector<double> row;
  for (std::size_t i = 0; i < first.x.size(); ++i) {
    row.clear();
    row.push_back(first.x.time(i));
    for (const auto& g : solutions) {
      row.push_back(g.x.value(i, 0));
      row.push_back(g.x.value(i, 1));
    }
    if (sc.diagnostics) {
      for (const auto& g : solutions) {
        row.push_back(g.I1[i]);
        row.push_back(g.I2[i]);
      }
      row.push_back(first.W[i]);
    }
    csv.row(row);
  }
  return {std::move(csv).str(), std::move(notes), 0};
}

RunResult report_of(const std::vector<std::pair<std::string, lie::StructureReport>>& reports) {
  RunResult out;
  for (const auto& [name, rep] : reports) {
    out.output += "# " + name + '\n' + rep.to_string();
    if (!rep.all_pass()) out.status = 4;
  }
  return out;
}

RunResult run_verify(const Scenario& sc) {
  std::vector<std::pair<std::string, lie::StructureReport>> reports;
  for (const auto& name : sc.sets) {
    const lie::StructureCheck c = lie::named_check(name);
    reports.emplace_back(name, lie::verify_structure(c.algebra, c.relations, c.spans));
  }
  return report_of(reports);
}

RunResult run_algebra_check(const Scenario& sc) {
  return report_of({{"algebra-check", lie::verify_structure(*sc.algebra, sc.relations, sc.spans)}});
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile out;
  Section* current = nullptr;
  std::string current_name;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);

    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    if (quoted) throw ConfigError(where + ": unterminated quote");
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      current_name = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSections.count(current_name)) throw ConfigError(where + ": unknown section [" + current_name + "]");
      if (out.sections_.count(current_name)) throw ConfigError(where + ": duplicate section [" + current_name + "]");
      current = &out.sections_[current_name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    if (current == nullptr) throw ConfigError(where + ": key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
        })) {
      throw ConfigError(where + ": invalid key '" + key + "'");
    }
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"' || value.substr(1, value.size() - 2).find('"') != std::string::npos) {
        throw ConfigError(where + ": malformed quoted value");
      }
      value = value.substr(1, value.size() - 2);
    }
    for (const auto& [k, v] : *current) {
      if (k == key) throw ConfigError(where + ": duplicate key '" + key + "' in [" + current_name + "]");
    }
    current->emplace_back(key, std::string(value));
  }
  return out;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ConfigFile f = parse(buf.str());
  f.origin_ = path;
  return f;
}

Scenario load_scenario(const ConfigFile& file, const Overrides& ov) {
  Scenario sc;
  Keys sys(file, "system");
  Keys time(file, "time");
  Keys act(file, "action");
  Keys out(file, "output");

  if (!act.present()) throw ConfigError("missing [action] section");
  sc.action = parse_action(act.require("type"));
  sc.seed = ov.seed.value_or(sc.seed);
  sc.x_min = ov.x_min.value_or(sc.x_min);

  switch (sc.action) {
    case Action::Integrate:
      load_time(time, sc, ov);
      sc.system = second_order_system(sys);
      sc.initial = initial_data(act, true);
      break;

    case Action::Reduce: {
      load_time(time, sc, ov);
      const std::string method = act.require("method");
      if (method == "damping") {
        sc.method = ReduceMethod::Damping;
        if (auto name = sys.take("name")) {
          if (*name != "caldirola-kanai") throw ConfigError("damping removal needs gamma, omega, k or caldirola-kanai");
          const NamedParams np = named_params(sys, *name);
          sc.damped = caldirola_kanai(np.gamma0, np.omega, np.k0);
        } else {
          sc.damped = {sys.require_expr("gamma"), sys.require_expr("omega"), sys.require_expr("k")};
        }
        sc.zeta0 = act.number_or("zeta0", 1.0);
        sc.initial = initial_data(act, false);
      } else if (method == "quasi-lie") {
        sc.method = ReduceMethod::QuasiLie;
        sc.system = second_order_system(sys);
        auto alpha = act.expr("alpha");
        auto beta = act.expr("beta");
        if (beta && !alpha) throw ConfigError("[action] beta given without alpha");
        if (alpha) sc.gauge = GaugeTransform{*alpha, beta.value_or(Expr())};
      } else {
        throw ConfigError("reduce method must be damping or quasi-lie, got '" + method + "'");
      }
      break;
    }

    case Action::Reparametrize:
      load_time(time, sc, ov);
      sc.system = second_order_system(sys);
      sc.alpha = act.require_expr("alpha");
      sc.initial = initial_data(act, false);
      break;

    case Action::Superpose: {
      load_time(time, sc, ov);
      if (auto name = sys.take("name")) {
        sc.from_named = true;
        sc.system = named_system(*name, named_params(sys, *name));
      } else {
        const bool has_omega = sys.has("omega");
        const bool has_omega2 = sys.has("omega2");
        if (has_omega == has_omega2) throw ConfigError("[system] needs exactly one of omega, omega2");
        sc.q = has_omega2 ? sys.require_expr("omega2") : pow(sys.require_expr("omega"), 2.0);
        sc.F = sys.expr_or("F", "0");
        sc.k = sys.require_number("k");
      }
      const bool h1 = act.has("I1");
      const bool h2 = act.has("I2");
      if (h1 != h2) throw ConfigError("[action] I1 and I2 must be given together");
      if (h1) {
        SuperpositionConstants c;
        c.I1 = act.require_number("I1");
        c.I2 = act.require_number("I2");
        sc.constants = c;
        if (act.has("x0") || act.has("v0")) throw ConfigError("[action] give either I1, I2 or x0, v0");
      } else {
        sc.initial = initial_data(act, false);
        if (!sc.initial) throw ConfigError("superpose needs I1, I2 or x0, v0");
      }
      if (auto b = act.take("branch")) sc.branch = parse_branch(*b);
      if (ov.branch) sc.branch = *ov.branch;
      if (sc.constants) sc.constants->sign = sc.branch == Branch::Minus ? -1 : +1;
      sc.diagnostics = act.boolean("diagnostics").value_or(false);
      break;
    }

    case Action::Verify: {
      const std::string set = act.require("set");
      if (set == "all") {
        sc.sets = {"sl2", "sl2-extended", "quasi-lie"};
      } else {
        sc.sets = split_list(set);
        for (const auto& s : sc.sets) lie::named_check(s);
        if (sc.sets.empty()) throw ConfigError("[action] set is empty");
      }
      break;
    }

    case Action::AlgebraCheck: {
      const lie::VariableSet vars(split_list(act.require("phase")), split_list(act.take("parameters").value_or("")));
      lie::FieldAlgebra alg(vars);
      const auto fields = act.prefixed("field");
      if (fields.empty()) throw ConfigError("algebra-check needs field.<name> entries");
      for (const auto& [name, notation] : fields) alg.define(name, notation);
      for (const auto& [label, text] : act.prefixed("relation")) sc.relations.push_back(parse_relation(text));
      for (const auto& [label, text] : act.prefixed("span")) sc.spans.push_back(parse_span(text));
      if (sc.relations.empty() && sc.spans.empty()) throw ConfigError("algebra-check needs relation.* or span.* entries");
      for (const auto& r : sc.relations) {
        for (const auto* n : {&r.lhs, &r.rhs}) {
          if (!alg.contains(*n)) throw ConfigError("unknown field '" + *n + "'");
        }
        for (const auto& [c, n] : r.expected) {
          if (!alg.contains(n)) throw ConfigError("unknown field '" + n + "'");
        }
      }
      for (const auto& s : sc.spans) {
        for (const auto* n : {&s.lhs, &s.rhs}) {
          if (!alg.contains(*n)) throw ConfigError("unknown field '" + *n + "'");
        }
        for (const auto& n : s.basis) {
          if (!alg.contains(n)) throw ConfigError("unknown field '" + n + "'");
        }
      }
      sc.algebra = std::move(alg);
      break;
    }
  }

  if (auto p = out.take("path")) sc.output_path = *p;
  if (ov.out) sc.output_path = *ov.out;
  if (auto p = out.take("precision")) {
    const double v = parse_number(*p, "[output] precision");
    if (v != std::floor(v)) throw ConfigError("[output] precision must be an integer");
    sc.precision = static_cast<int>(v);
  }
  if (ov.precision) sc.precision = *ov.precision;
  if (sc.precision < 1 || sc.precision > 17) throw ConfigError("precision must lie in [1, 17]");

  for (const Keys* k : {&sys, &time, &act, &out}) k->finish();
  return sc;
}

RunResult run(const Scenario& sc) {
  switch (sc.action) {
    case Action::Integrate: return run_integrate(sc);
    case Action::Reduce: return sc.method == ReduceMethod::Damping ? run_damping(sc) : run_quasi_lie(sc);
    case Action::Reparametrize: return run_reparametrize(sc);
    case Action::Superpose: return run_superpose(sc);
    case Action::Verify: return run_verify(sc);
    case Action::AlgebraCheck: return run_algebra_check(sc);
  }
  throw ConfigError("unhandled action");
}

int exit_status(const std::exception& error) noexcept {
  if (dynamic_cast<const ParseError*>(&error) || dynamic_cast<const ConfigError*>(&error)) return 2;
  if (dynamic_cast<const VerificationError*>(&error)) return 4;
  if (dynamic_cast<const DomainError*>(&error)) return 3;
  return 1;
}

std::string format_number(double value, int precision) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, precision);
  return std::string(buf, r.ptr);
}

}  // namespace ermakov::cli
