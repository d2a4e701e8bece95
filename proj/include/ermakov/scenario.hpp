#pragma once

// Scenario files for the command-line front end. A scenario is a sectioned
// key = value text:
//
//   [system]   name = chini, p = "(1+t)^2", q = "1", k = 1   (or a, b, c, ...)
//   [time]     t0 = 0, t1 = 10, step = 1e-3
//   [action]   type = integrate, x0 = 1, v0 = 0
//   [output]   path = out.csv, precision = 17
//
// '#' starts a comment outside quotes. Expression values may be quoted.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ermakov/liealg.hpp"
#include "ermakov/reduce.hpp"
#include "ermakov/superpose.hpp"

namespace ermakov::cli {

/// Raw parsed file: section -> key -> value, in file order per section.
class ConfigFile {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::string& path);

  const std::map<std::string, Section>& sections() const noexcept { return sections_; }
  const std::string& origin() const noexcept { return origin_; }

 private:
  std::map<std::string, Section> sections_;
  std::string origin_ = "<string>";
};

enum class Action { Integrate, Reduce, Reparametrize, Superpose, Verify, AlgebraCheck };
enum class Branch { Plus, Minus, Both };
enum class ReduceMethod { Damping, QuasiLie };

/// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<std::string> out;
  std::optional<double> step;
  std::optional<int> precision;
  std::optional<Branch> branch;
  std::optional<std::uint64_t> seed;
  std::optional<double> x_min;
};

struct TimeWindow {
  double t0 = 0.0;
  double t1 = 0.0;
  double step = kDefaultStep;
};

struct Scenario {
  Action action = Action::Integrate;
  TimeWindow time;

  // integrate, reparametrize, reduce (quasi-lie)
  SecondOrderSystem system;
  // reduce (damping)
  DampedPinney damped;
  double zeta0 = 1.0;
  ReduceMethod method = ReduceMethod::Damping;
  std::optional<GaugeTransform> gauge;
  // reparametrize
  Expr alpha;
  // superpose: either (q, F, k) or an Ermakov system obtained by reduction
  Expr q;
  Expr F;
  double k = 0.0;
  bool from_named = false;
  std::optional<SuperpositionConstants> constants;
  Branch branch = Branch::Plus;
  bool diagnostics = false;

  std::optional<PhasePoint> initial;

  // verify, algebra-check
  std::vector<std::string> sets;
  std::optional<lie::FieldAlgebra> algebra;
  std::vector<lie::Relation> relations;
  std::vector<lie::SpanClaim> spans;

  std::optional<std::string> output_path;
  int precision = 17;
  std::uint64_t seed = ReducibilityOptions{}.seed;
  double x_min = kDefaultXMin;
};

/// Validates a parsed file into a scenario. Unknown sections or keys and
/// missing required parameters raise ConfigError; bad expressions ParseError.
Scenario load_scenario(const ConfigFile& file, const Overrides& overrides = {});

struct RunResult {
  /// CSV for the numeric actions, the report for verify and algebra-check.
  std::string output;
  /// Human-readable summary lines (reducibility outcome etc.).
  std::string notes;
  /// 0 on success, 4 when a verification failed.
  int status = 0;
};

RunResult run(const Scenario& scenario);

/// Exit status mapping for an exception escaping load_scenario or run:
/// 2 config/parse, 3 domain/singularity, 4 verification, 1 otherwise.
int exit_status(const std::exception& error) noexcept;

/// Fixed significant-digit formatting used in all CSV output.
std::string format_number(double value, int precision);

}  // namespace ermakov::cli
