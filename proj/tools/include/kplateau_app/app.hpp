#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kplateau/io.hpp"
#include "kplateau/ma_solver.hpp"
#include "kplateau/plateau.hpp"

namespace kplateau::app {

enum ExitCode : int { exit_ok = 0, exit_parse = 2, exit_failure = 3 };

// Version string of the form v<major.minor.patch>[-g<commit>[-dirty]].
std::string version_string();

// TOML (default) or JSON configuration as a JSON value. Throws ParseError.
nlohmann::json load_config(const std::filesystem::path& path, bool json);
nlohmann::json parse_config_text(const std::string& text, bool json, const std::string& origin = "<string>");

// SHA-256 of the canonical single-line JSON of the config without its seed.
std::string scenario_hash(const nlohmann::json& config);

// Line-delimited JSON event log.
class EventLog {
 public:
  explicit EventLog(std::ostream* os) : os_(os) {}
  void emit(const std::string& event, nlohmann::json fields = nlohmann::json::object()) const;

 private:
  std::ostream* os_;
};

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int threads = 1;
  bool json = false;
  std::ostream* log = nullptr;        // JSON lines; null discards
  std::ostream* human = nullptr;      // summary text; null discards
};

struct Report {
  int exit_code = exit_ok;
  nlohmann::json summary;  // {kind, status, metrics, artifacts, meta}
};

// Commands: solve, plateau, suite, study. Writes <out>/summary.json.
Report run(const std::string& command, const RunOptions& opts);

// Scenario pieces, exposed for tests.
struct DirichletSetup {
  GraphProblem problem;
  std::optional<ScalarField> oracle;  // exact solution when known
  double phi_max = 0.0;
};
// Relative file paths in the problem resolve against `base`.
DirichletSetup dirichlet_setup(const nlohmann::json& problem, const std::filesystem::path& base = {});

// Exact solution for a constant phi on a disk or interval: spherical cap for
// G = g0, paraboloid for G = one. Empty otherwise.
std::optional<ScalarField> dirichlet_oracle(const GraphDomain& domain, double phi, bool g0, int n);

// Hausdorff distance (sum convention) from the free surface of `state` to the
// cap of radius R that spans the unit equator of the unit ball or disk, over
// `samples` radial steps of the cap.
double equator_cap_hausdorff(const BarrierState& state, double R, int samples = 200);

struct ConvergenceRow {
  double h = 0.0;
  double sup_error = 0.0;          // NaN without an oracle
  double residual_norm = 0.0;
  std::optional<double> observed_order;
};
std::vector<ConvergenceRow> convergence_study(const nlohmann::json& problem, const std::vector<double>& h_list,
                                              const std::filesystem::path& base = {});

struct SuiteOptions {
  std::uint64_t seed = 0;
  int cases = 1000;                // per convex-kernel group
  int duality_cases = 100;         // per duality group
  double angular_res_deg = 1.0;
  int threads = 1;
};
struct GroupResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;              // largest violation (or error) seen
  double tolerance = 0.0;
  bool pass() const { return failures == 0; }
};
std::vector<GroupResult> geometry_suite(const SuiteOptions& opts);

}  // namespace kplateau::app
