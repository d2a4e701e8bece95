#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ermakov/error.hpp"
#include "ermakov/scenario.hpp"

using namespace ermakov;
using namespace ermakov::cli;

namespace {

RunResult run_text(const std::string& text, const Overrides& ov = {}) {
  return run(load_scenario(ConfigFile::parse(text), ov));
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kChini = R"ini(
[system]
name = chini
p = "(1+t)^2"   # quoted expression
q = "1"
k = 1
[time]
t0 = 0
t1 = 1
step = 0.1
[action]
type = integrate
x0 = 1
v0 = 0
)ini";

const char* kEquilibrium = R"ini(
[system]
omega = "1"
k = 1
[time]
t1 = 10
step = 1e-3
[action]
type = superpose
I1 = 0.5
I2 = 0.5
branch = plus
)ini";

}  // namespace

TEST(ConfigFile, SectionsAndComments) {
  const ConfigFile f = ConfigFile::parse("# header\n[system]\nb = \"-1 # not a comment\"  # comment\n\n[action]\ntype=integrate\n");
  ASSERT_EQ(f.sections().size(), 2u);
  EXPECT_EQ(f.sections().at("system").front().second, "-1 # not a comment");
  EXPECT_EQ(f.sections().at("action").front().second, "integrate");
}

TEST(ConfigFile, Rejections) {
  EXPECT_THROW(ConfigFile::parse("b = 1\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[plot]\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[system]\n[system]\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[system]\nb = 1\nb = 2\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[system]\nb\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[system]\nb = \"1\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[system\n"), ConfigError);
  EXPECT_THROW(ConfigFile::load("/nonexistent/scenario.ini"), ConfigError);
}

TEST(LoadScenario, RequiredParameters) {
  EXPECT_THROW(load_scenario(ConfigFile::parse("[action]\ntype = integrate\n")), ConfigError);
  EXPECT_THROW(load_scenario(ConfigFile::parse("[system]\nb = \"-1\"\n[time]\nt1 = 1\n[action]\ntype = integrate\nx0 = 1\n")),
               ConfigError);
  EXPECT_THROW(load_scenario(ConfigFile::parse("[action]\ntype = fly\n")), ConfigError);
  EXPECT_THROW(load_scenario(ConfigFile::parse("[action]\ntype = verify\nset = so3\n")), ConfigError);
  EXPECT_THROW(load_scenario(ConfigFile::parse("[time]\nt1 = 0\n[system]\nb = \"-1\"\n[action]\ntype = integrate\nx0 = 1\nv0 = 0\n")),
               ConfigError);
  EXPECT_THROW(load_scenario(ConfigFile::parse("[system]\nb = \"sin(\"\n[time]\nt1 = 1\n[action]\ntype = integrate\nx0 = 1\nv0 = 0\n")),
               ParseError);
  // superpose needs exactly one of omega, omega2 and either constants or initial data
  EXPECT_THROW(load_scenario(ConfigFile::parse("[system]\nk = 1\n[time]\nt1 = 1\n[action]\ntype = superpose\nI1 = 1\nI2 = 1\n")),
               ConfigError);
  EXPECT_THROW(load_scenario(ConfigFile::parse("[system]\nomega = 1\nk = 1\n[time]\nt1 = 1\n[action]\ntype = superpose\nI1 = 1\n")),
               ConfigError);
}

TEST(LoadScenario, UnusedKeysRejected) {
  EXPECT_THROW(load_scenario(ConfigFile::parse("[action]\ntype = verify\nset = sl2\nextra = 1\n")), ConfigError);
  EXPECT_THROW(load_scenario(ConfigFile::parse("[time]\nt1 = 1\n[action]\ntype = verify\nset = sl2\n")), ConfigError);
}

TEST(LoadScenario, Overrides) {
  Overrides ov;
  ov.step = 0.25;
  ov.precision = 5;
  ov.out = "somewhere.csv";
  ov.seed = 42;
  ov.x_min = 1e-4;
  const Scenario sc = load_scenario(ConfigFile::parse(kChini), ov);
  EXPECT_EQ(sc.time.step, 0.25);
  EXPECT_EQ(sc.precision, 5);
  EXPECT_EQ(*sc.output_path, "somewhere.csv");
  EXPECT_EQ(sc.seed, 42u);
  EXPECT_EQ(sc.x_min, 1e-4);
  ov.precision = 18;
  EXPECT_THROW(load_scenario(ConfigFile::parse(kChini), ov), ConfigError);
}

TEST(Run, IntegrateChini) {
  const RunResult r = run_text(kChini);
  EXPECT_EQ(r.status, 0);
  const auto rows = csv_rows(r.output);
  ASSERT_EQ(rows.size(), 12u);  // header and 11 grid points
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "x", "v"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "1", "0"}));
  EXPECT_EQ(rows.back()[0], "1");
}

TEST(Run, VerifySl2) {
  const RunResult r = run_text("[action]\ntype = verify\nset = sl2\n");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output,
            "# sl2\n"
            "[X1,X2] = 2*X3  PASS (exact)\n"
            "[X3,X2] = -X2  PASS (exact)\n"
            "[X3,X1] = X1  PASS (exact)\n");
}

TEST(Run, SuperposeEquilibrium) {
  const RunResult r = run_text(kEquilibrium);
  EXPECT_EQ(r.status, 0);
  const auto rows = csv_rows(r.output);
  ASSERT_EQ(rows.size(), 10002u);
  for (std::size_t i = 1; i < rows.size(); ++i) ASSERT_NEAR(std::stod(rows[i][1]), 1.0, 1e-9) << i;
}

TEST(Run, SuperposeBothBranchesWithDiagnostics) {
  Overrides ov;
  ov.branch = Branch::Both;
  const std::string text = std::string(kEquilibrium) + "diagnostics = true\n";
  const auto rows = csv_rows(run_text(text, ov).output);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "x_plus", "v_plus", "x_minus", "v_minus", "I1_plus", "I2_plus",
                                                "I1_minus", "I2_minus", "W"}));
}

TEST(Run, RealityViolationIsVerificationError) {
  const std::string text = "[system]\nomega = 1\nk = 1\n[time]\nt1 = 1\n[action]\ntype = superpose\nI1 = 0.25\nI2 = 0.25\n";
  try {
    run_text(text);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_status(e), 4);
  }
}

TEST(Run, AlgebraCheckFailureSetsStatus) {
  const RunResult r = run_text(R"ini([action]
type = algebra-check
phase = x, v
field.A = "x*d/dv"
field.B = "v*d/dx"
relation.1 = "[A,B] = 0"
)ini");
  EXPECT_EQ(r.status, 4);
  EXPECT_NE(r.output.find("FAIL (computed: x*d/dx - v*d/dv)"), std::string::npos) << r.output;
}

TEST(Run, AlgebraCheckRejectsUnknownFields) {
  EXPECT_THROW(run_text("[action]\ntype = algebra-check\nphase = x, v\nfield.A = \"x*d/dv\"\nrelation.1 = \"[A,C] = A\"\n"),
               ConfigError);
  EXPECT_THROW(run_text("[action]\ntype = algebra-check\nphase = x, v\nfield.A = \"x*d/dv\"\nrelation.1 = \"[A,A] = 2*\"\n"),
               ConfigError);
}

TEST(Run, QuasiLieWithExplicitGauge) {
  const RunResult r = run_text(R"ini([system]
a = "1"
b = "-1"
c = "1"
[time]
t1 = 1
step = 0.5
[action]
type = reduce
method = quasi-lie
alpha = "exp(-t)"
)ini");
  const auto rows = csv_rows(r.output);
  ASSERT_EQ(rows.size(), 4u);
  // a' = a - alpha'/alpha = 2
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][1]), 2.0);
}

TEST(Run, Deterministic) {
  const RunResult a = run_text(kChini);
  const RunResult b = run_text(kChini);
  EXPECT_EQ(a.output, b.output);
}

TEST(ExitStatus, Mapping) {
  EXPECT_EQ(exit_status(ConfigError("x")), 2);
  EXPECT_EQ(exit_status(ParseError("x", 0)), 2);
  EXPECT_EQ(exit_status(DomainError("x")), 3);
  EXPECT_EQ(exit_status(SingularityError("x", 0.0, 0.0)), 3);
  EXPECT_EQ(exit_status(VerificationError("x")), 4);
  EXPECT_EQ(exit_status(std::runtime_error("x")), 1);
}

TEST(FormatNumber, RoundTrip) {
  EXPECT_EQ(format_number(0.1, 17), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0, 17), "1");
  EXPECT_EQ(format_number(1.0 / 3.0, 5), "0.33333");
  for (double v : {std::exp(1.0), -1e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_number(v, 17)), v);
}
