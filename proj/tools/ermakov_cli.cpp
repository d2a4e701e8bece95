// ermakov: run scenario files.
//
//   ermakov --config scenario.ini [--out result.csv] [--step 1e-3]
//           [--precision 17] [--branch plus|minus|both] [--seed N]
//
// Several --config values form a sweep: the scenarios run concurrently and
// --out, if given, names a directory receiving <config stem>.csv or .txt.
// ERMAKOV_XMIN overrides the 1/x^3 singularity guard.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "ermakov/error.hpp"
#include "ermakov/scenario.hpp"

namespace fs = std::filesystem;
using namespace ermakov;

namespace {

struct Outcome {
  int status = 0;
  std::string output;
  std::string diagnostics;
  std::optional<std::string> path;
};

bool is_report(cli::Action a) { return a == cli::Action::Verify || a == cli::Action::AlgebraCheck; }

Outcome run_one(const std::string& config, cli::Overrides ov, bool sweep) {
  Outcome o;
  try {
    const cli::ConfigFile file = cli::ConfigFile::load(config);
    std::optional<std::string> dir;
    if (sweep && ov.out) {
      dir = ov.out;
      ov.out.reset();
    }
    const cli::Scenario sc = cli::load_scenario(file, ov);
    cli::RunResult r = cli::run(sc);
    o.status = r.status;
    o.output = std::move(r.output);
    for (std::size_t pos = 0; pos < r.notes.size();) {
      const auto nl = r.notes.find('\n', pos);
      o.diagnostics += config + ": " + r.notes.substr(pos, nl - pos) + '\n';
      pos = nl == std::string::npos ? r.notes.size() : nl + 1;
    }
    if (dir) {
      o.path = (fs::path(*dir) / fs::path(config).stem()).string() + (is_report(sc.action) ? ".txt" : ".csv");
    } else {
      o.path = sc.output_path;
    }
    if (o.status == 4) o.diagnostics += config + ": error: verification failed\n";
  } catch (const std::exception& e) {
    o.status = cli::exit_status(e);
    o.output.clear();
    o.path.reset();
    o.diagnostics += config + ": error: " + e.what() + '\n';
  }
  return o;
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Milne-Pinney reductions, Lie brackets and the Ermakov superposition rule"};
  std::vector<std::string> configs;
  std::optional<std::string> out;
  std::optional<double> step;
  std::optional<int> precision;
  std::optional<std::string> branch;
  std::optional<std::uint64_t> seed;

  app.add_option("--config", configs, "Scenario file (repeat for a concurrent sweep)")->required();
  app.add_option("--out", out, "Output file, or directory for a sweep");
  app.add_option("--step", step, "Override the integration step");
  app.add_option("--precision", precision, "Significant digits in CSV output (default 17)");
  app.add_option("--branch", branch, "Superposition branch")->check(CLI::IsMember({"plus", "minus", "both"}));
  app.add_option("--seed", seed, "Seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cli::Overrides ov;
  ov.out = out;
  ov.step = step;
  ov.precision = precision;
  ov.seed = seed;
  if (branch) ov.branch = *branch == "plus" ? cli::Branch::Plus : *branch == "minus" ? cli::Branch::Minus : cli::Branch::Both;
  if (const char* env = std::getenv("ERMAKOV_XMIN")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      std::cerr << "ermakov: error: ERMAKOV_XMIN must be a positive number\n";
      return 2;
    }
    ov.x_min = v;
  }

  const bool sweep = configs.size() > 1;
  std::vector<Outcome> outcomes;
  if (sweep) {
    std::vector<std::future<Outcome>> jobs;
    for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, run_one, c, ov, true));
    for (auto& j : jobs) outcomes.push_back(j.get());
  } else {
    outcomes.push_back(run_one(configs.front(), ov, false));
  }

  int status = 0;
  for (auto& o : outcomes) {
    std::cerr << o.diagnostics;
    try {
      if (o.path) {
        write_file(*o.path, o.output);
      } else {
        std::cout << o.output;
      }
    } catch (const std::exception& e) {
      std::cerr << "ermakov: error: " << e.what() << '\n';
      o.status = std::max(o.status, 2);
    }
    status = std::max(status, o.status);
  }
  std::cout.flush();
  return status;
}
