#pragma once

#include "adabelief/optim.hpp"
#include "adabelief/problems.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace adabelief {

struct RunSpec {
  std::string problem;
  OptimizerKind kind = OptimizerKind::AdaBelief;
  OptimizerConfig<double> config;
  Vec start;
  std::size_t steps = 1;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  bool project = false;
  std::optional<Box> box;  // overrides the problem's feasible box when projecting
  double convergence_radius = 1e-2;
};

struct TrajectoryRow {
  std::size_t step;
  Vec theta;         // after the update (and projection)
  double f;          // noise-free objective at theta
  double grad_norm;  // norm of the gradient the optimizer consumed at this step
  Vec update;        // optimizer displacement, before projection
};

struct TrajectoryRecord {
  std::string problem;
  OptimizerKind kind = OptimizerKind::AdaBelief;
  Vec start;
  std::vector<TrajectoryRow> rows;
  std::optional<std::size_t> first_hit;
  std::optional<std::size_t> diverged_at;

  bool diverged() const { return diverged_at.has_value(); }
};

// Per-problem defaults used by the benchmark grid: alpha = 1e-3 everywhere,
// betas 0.3 and momentum 0.3 on l1_skew, framework defaults otherwise.
OptimizerConfig<double> default_config(std::string_view problem, OptimizerKind kind);

void validate(const RunSpec& spec);

/// Runs a builtin problem. Deterministic in the spec; a non-finite step
/// stops the run and sets diverged_at to the offending step.
TrajectoryRecord run(const RunSpec& spec);

// Same loop over an arbitrary stream; spec.problem is only used as a label.
TrajectoryRecord run(const RunSpec& spec, const LossStream& stream);

std::optional<std::size_t> first_hit_step(const TrajectoryRecord& traj, const Vec& optimum, double radius);

// Runs independent specs concurrently; results are in input order.
std::vector<TrajectoryRecord> run_all(const std::vector<RunSpec>& specs);

}  // namespace adabelief
