#pragma once

#include "adabelief/diagnostics.hpp"
#include "adabelief/runner.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace adabelief::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDiverged = 2 };

// 17 significant digits, so every double round-trips exactly.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj);
nlohmann::json trajectory_json(const TrajectoryRecord& traj);

struct BenchOptions {
  std::vector<std::string> problems;
  std::vector<OptimizerKind> optimizers;
  std::size_t steps = 50000;
  double delta = 1e-2;
  double learning_rate = 1e-3;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Throws Error on an invalid grid.
nlohmann::json bench_report(const BenchOptions& options);

// Standard probe configurations behind `probe --kind`. The report always
// carries a top-level boolean "pass".
nlohmann::json probe_report(const std::string& kind, std::uint64_t seed);
const std::vector<std::string>& probe_kinds();

// Entry point shared by the executable and the tests.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adabelief::cli
