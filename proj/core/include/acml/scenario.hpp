#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acml/lift.hpp"

namespace acml {

inline constexpr const char* kVersion = "0.1.0";

/// Scenario-file diagnostic with the 1-based line it points at.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct TransportSpec {
  std::string kind = "square";  // square | path
  Point center;                 // square loop centre
  int plane_i = 0, plane_j = 1; // 0-based coordinate plane
  double side = 0.4;
  int steps = 400;
  std::vector<double> v0;
  std::vector<std::string> path;  // kind == path: expressions of x1 == t
};

/// Parsed scenario: structure data as expression text plus the sample spec
/// and the task list.
struct Scenario {
  std::string name;
  int dim = 0;
  std::vector<std::string> gamma;
  std::vector<std::vector<std::string>> g;
  std::vector<std::vector<std::string>> phi;
  SampleSpec sample;
  std::vector<std::string> tasks;
  std::optional<TransportSpec> transport;
  std::vector<std::string> warnings;
};

Scenario load_scenario(const std::string& text);
/// Reads from disk; bare names fall back to the bundled fixtures.
Scenario load_scenario_file(const std::string& path);

/// Names and contents of the scenarios compiled into the library.
const std::map<std::string, std::string>& bundled_scenarios();

struct TaskResult {
  std::string name;
  std::string verdict;  // pass | fail | info
  double max_residual = 0.0;
  double tolerance = 0.0;
  Point witness;
  std::vector<std::string> notes;
};

struct ClassificationFlags {
  bool contact_metric = false;
  bool almost_hermitian = false;
  bool normal = false;
  bool sasakian = false;
  bool ack_full = false;
  bool ack_horizontal = false;
};

struct FdCheckBlock {
  bool present = false;
  double max_discrepancy = 0.0;
  int points = 0;
  int entries = 0;
};

struct Report {
  Scenario scenario;
  std::string version = kVersion;
  std::vector<TaskResult> tasks;
  ClassificationFlags classification;
  FdCheckBlock fd_check;
  /// Serialized as 0 so reports stay byte-identical across runs; the
  /// measured wall time only appears in the human summary.
  long long elapsed_ms = 0;
  long long measured_ms = 0;

  bool any_fail() const;
};

struct RunOptions {
  int threads = 1;
  bool fd_check = false;
  std::optional<int> points_override;
  std::optional<uint64_t> seed_override;
  std::optional<double> tol_override;
};

/// Executes the scenario tasks in declared order. `lift` swaps the working
/// structure for its lift; task errors downgrade that task to fail without
/// aborting the run.
Report run_scenario(const Scenario& sc, const RunOptions& opts = {});

/// Canonical JSON bytes: sorted keys, shortest round-trip floats; identical
/// scenario and seed give identical bytes at any thread count.
std::string report_to_json(const Report& report);

/// Human summary (residuals in scientific notation, timing included).
std::string report_summary(const Report& report);

}  // namespace acml
