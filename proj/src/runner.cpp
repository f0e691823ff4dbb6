#include "adabelief/runner.hpp"

#include <cmath>
#include <future>

namespace adabelief {

OptimizerConfig<double> default_config(std::string_view problem, OptimizerKind kind) {
  (void)kind;
  OptimizerConfig<double> c;
  c.learning_rate = 1e-3;
  if (problem == "l1_skew") {
    c.beta1 = 0.3;
    c.beta2 = 0.3;
    c.momentum = 0.3;
  }
  return c;
}

void validate(const RunSpec& spec) {
  validate(spec.config);
  if (spec.steps < 1) throw Error(ErrorCode::InvalidConfig, "steps must be >= 1");
  if (!(spec.sigma >= 0) || !std::isfinite(spec.sigma)) throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");
  if (!(spec.convergence_radius > 0)) throw Error(ErrorCode::InvalidConfig, "convergence radius must be > 0");
  require_finite(spec.start, "start");
}

TrajectoryRecord run(const RunSpec& spec) {
  Problem p = builtin_problem(spec.problem);
  return run(spec, LossStream::noisy(std::move(p), spec.sigma, spec.seed));
}

TrajectoryRecord run(const RunSpec& spec, const LossStream& stream) {
  validate(spec);
  const Problem& base = stream.base;
  if (spec.start.size() != base.dim) {
    throw Error(ErrorCode::DimensionMismatch, "start has length " + std::to_string(spec.start.size()) +
                                                  ", problem " + base.name + " needs " +
                                                  std::to_string(base.dim));
  }
  std::optional<Box> box;
  if (spec.project) {
    box = spec.box ? spec.box : base.feasible_box;
    if (!box) throw Error(ErrorCode::InvalidBox, "projection requested but no feasible box");
    validate_box(*box, base.dim);
  }

  TrajectoryRecord rec;
  rec.problem = spec.problem;
  rec.kind = spec.kind;
  rec.start = spec.start;
  rec.rows.reserve(spec.steps);

  auto state = make_optimizer(spec.kind, spec.config, base.dim);
  Vec theta = spec.start;
  for (std::size_t t = 1; t <= spec.steps; ++t) {
    try {
      GradientSample sample = sample_gradient(stream, theta, t);
      StepResult<double> r = step(state, theta, sample.g);
      Vec next = box ? project_box(r.new_params, *box) : std::move(r.new_params);
      const double f = base.eval(next);
      if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteResult, "objective overflow");
      rec.rows.push_back({t, next, f, sample.g.norm(), std::move(r.update)});
      theta = std::move(next);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFiniteResult) throw;
      rec.diverged_at = t;
      break;
    }
  }
  if (base.optimum) rec.first_hit = first_hit_step(rec, *base.optimum, spec.convergence_radius);
  return rec;
}

std::optional<std::size_t> first_hit_step(const TrajectoryRecord& traj, const Vec& optimum, double radius) {
  for (const auto& row : traj.rows) {
    if ((row.theta - optimum).norm() <= radius) return row.step;
  }
  return std::nullopt;
}

std::vector<TrajectoryRecord> run_all(const std::vector<RunSpec>& specs) {
  std::vector<std::future<TrajectoryRecord>> jobs;
  jobs.reserve(specs.size());
  for (const auto& s : specs) {
    jobs.push_back(std::async(std::launch::async, [&s] { return run(s); }));
  }
  std::vector<TrajectoryRecord> out;
  out.reserve(specs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace adabelief
