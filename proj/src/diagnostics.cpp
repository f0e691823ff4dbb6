#include "adabelief/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adabelief {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return kNaN;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

void require_convex(const Problem& p) {
  if (!p.convex) throw Error(ErrorCode::NonConvexStream, p.name + " is not convex");
}

}  // namespace

GradientDrive constant_drive(Vec g) {
  return [g = std::move(g)](std::size_t) { return g; };
}

GradientDrive alternating_drive() {
  return [](std::size_t t) { return Vec{{1.0, t % 2 == 1 ? -1.0 : 1.0}}; };
}

EmaStats ema_steady_state(OptimizerKind kind, const OptimizerConfig<double>& config, const GradientDrive& drive,
                          Eigen::Index d, std::size_t burn_in, std::size_t window, std::string description) {
  validate(config);
  if (static_cast<double>(burn_in) * (1.0 - config.beta2) < 1.0) {
    throw Error(ErrorCode::InvalidConfig, "burn_in shorter than the beta2 memory 1/(1 - beta2)");
  }
  if (window < 1) throw Error(ErrorCode::InvalidConfig, "window must be >= 1");

  auto state = make_optimizer(kind, config, d);
  const Vec params = Vec::Zero(d);
  Vec m_sum = Vec::Zero(d);
  Vec second_sum = Vec::Zero(d);
  for (std::size_t t = 1; t <= burn_in + window; ++t) {
    step(state, params, drive(t));
    if (t <= burn_in) continue;
    if (kind == OptimizerKind::SGD) {
      m_sum += state.velocity;
    } else {
      m_sum += first_moment_hat(state);
      second_sum += second_moment_hat(state);
    }
  }
  const double n = static_cast<double>(window);
  EmaStats out;
  out.drive = std::move(description);
  out.burn_in = burn_in;
  out.window = window;
  out.m_hat = m_sum / n;
  if (kind == OptimizerKind::Adam) out.v_hat = Vec(second_sum / n);
  if (kind == OptimizerKind::AdaBelief) out.s_hat = Vec(second_sum / n);
  return out;
}

std::string_view to_string(CurvatureCase c) {
  switch (c) {
    case CurvatureCase::Flat: return "flat";
    case CurvatureCase::SteepValley: return "steep_valley";
    case CurvatureCase::LargeGradSmallCurvature: return "large_grad_small_curvature";
  }
  return "unknown";
}

std::string_view to_string(StepLabel l) {
  switch (l) {
    case StepLabel::Small: return "S";
    case StepLabel::Large: return "L";
    case StepLabel::Unlabelled: return "-";
  }
  return "-";
}

StepLabel expected_label(CurvatureCase c, OptimizerKind kind) {
  using enum StepLabel;
  switch (c) {
    case CurvatureCase::Flat: return kind == OptimizerKind::SGD ? Small : Large;
    case CurvatureCase::SteepValley: return kind == OptimizerKind::SGD ? Large : Small;
    case CurvatureCase::LargeGradSmallCurvature: return kind == OptimizerKind::Adam ? Small : Large;
  }
  return Unlabelled;
}

Table1Report table1_case_check(CurvatureCase c, const Table1Thresholds& th, std::size_t burn_in,
                               std::size_t window) {
  GradientDrive drive;
  switch (c) {
    case CurvatureCase::Flat: drive = constant_drive(Vec::Constant(1, 1e-3)); break;
    case CurvatureCase::SteepValley:
      drive = [](std::size_t t) { return Vec::Constant(1, t % 2 == 1 ? -1.0 : 1.0); };
      break;
    case CurvatureCase::LargeGradSmallCurvature: drive = constant_drive(Vec::Constant(1, 1.0)); break;
  }

  Table1Report report{c, {}, true};
  for (OptimizerKind kind : {OptimizerKind::SGD, OptimizerKind::Adam, OptimizerKind::AdaBelief}) {
    OptimizerConfig<double> config;
    const double alpha = config.learning_rate;
    auto state = make_optimizer(kind, config, 1);
    const Vec params = Vec::Zero(1);
    double abs_update = 0, stepsize = 0;
    for (std::size_t t = 1; t <= burn_in + window; ++t) {
      const auto r = step(state, params, drive(t));
      if (t <= burn_in) continue;
      const double du = std::abs(r.update[0]);
      const double direction =
          std::abs(kind == OptimizerKind::SGD ? state.velocity[0] : first_moment_hat(state)[0]);
      abs_update += du / alpha;
      stepsize += du / direction / alpha;
    }
    abs_update /= static_cast<double>(window);
    stepsize /= static_cast<double>(window);

    StepLabel label = StepLabel::Unlabelled;
    if (kind == OptimizerKind::SGD) {
      if (abs_update >= th.sgd_large) label = StepLabel::Large;
      else if (abs_update <= th.sgd_small) label = StepLabel::Small;
    } else {
      if (stepsize >= th.adaptive_large) label = StepLabel::Large;
      else if (stepsize <= th.adaptive_small) label = StepLabel::Small;
    }
    const StepLabel expected = expected_label(c, kind);
    report.cells.push_back({kind, abs_update, stepsize, label, expected, label == expected});
    report.pass = report.pass && label == expected;
  }
  return report;
}

SignDescentReport sign_descent_angle(const OptimizerConfig<double>& config, std::size_t burn_in,
                                     std::size_t window) {
  validate(config);
  if (window < 1) throw Error(ErrorCode::InvalidConfig, "window must be >= 1");
  const Problem skew = builtin_problem("l1_skew");
  // Any point of the open positive quadrant sees the constant gradient (0.1, 1).
  const Vec g = skew.grad(Vec{{10.0, 10.0}});

  auto mean_ratio = [&](OptimizerKind kind) {
    auto state = make_optimizer(kind, config, 2);
    const Vec params = Vec::Zero(2);
    double sum = 0;
    for (std::size_t t = 1; t <= burn_in + window; ++t) {
      const auto r = step(state, params, g);
      if (t > burn_in) sum += std::abs(r.update[0] / r.update[1]);
    }
    return sum / static_cast<double>(window);
  };
  return {mean_ratio(OptimizerKind::Adam), mean_ratio(OptimizerKind::AdaBelief), mean_ratio(OptimizerKind::SGD),
          g, burn_in, window};
}

double RegretLedger::regret_over_sqrt(std::size_t t) const {
  return regret(t) / std::sqrt(static_cast<double>(t));
}

double RegretLedger::regret_over_t(std::size_t t) const { return regret(t) / static_cast<double>(t); }

Vec offline_comparator(const LossStream& stream, std::size_t steps, const Box& box, double resolution) {
  const Eigen::Index d = stream.base.dim;
  validate_box(box, d);
  if (d > 2) throw Error(ErrorCode::InvalidConfig, "grid comparator supports d <= 2");
  if (!(resolution > 0)) throw Error(ErrorCode::InvalidConfig, "resolution must be > 0");

  // Cyclic streams reduce to a weighted sum over one period.
  std::vector<const Problem*> losses;
  std::vector<double> weights;
  if (stream.mode == StreamMode::Online) {
    const std::size_t n = stream.sequence.size();
    for (std::size_t k = 0; k < n; ++k) {
      losses.push_back(&stream.sequence[k]);
      weights.push_back(static_cast<double>(steps / n + (k < steps % n ? 1 : 0)));
    }
  } else {
    losses.push_back(&stream.base);
    weights.push_back(1.0);
  }
  auto total = [&](const Vec& th) {
    double s = 0;
    for (std::size_t k = 0; k < losses.size(); ++k) {
      if (weights[k] > 0) s += weights[k] * losses[k]->eval(th);
    }
    return s;
  };

  constexpr int kPoints = 41;
  Vec lo = box.lo, hi = box.hi;
  Vec best = lo;
  double best_value = std::numeric_limits<double>::infinity();
  for (;;) {
    const Vec spacing = (hi - lo) / double(kPoints - 1);
    std::array<int, 2> n{kPoints, d > 1 ? kPoints : 1};
    for (int i = 0; i < n[0]; ++i) {
      for (int j = 0; j < n[1]; ++j) {
        Vec th = lo;
        th[0] += i * spacing[0];
        if (d > 1) th[1] += j * spacing[1];
        const double v = total(th);
        if (v < best_value) {
          best_value = v;
          best = th;
        }
      }
    }
    if (spacing.maxCoeff() <= resolution) break;
    lo = (best - 2.0 * spacing).cwiseMax(box.lo);
    hi = (best + 2.0 * spacing).cwiseMin(box.hi);
  }
  return best;
}

RegretLedger regret_probe(const LossStream& stream, const OptimizerConfig<double>& config, const Box& box,
                          const Vec& start, std::size_t steps, std::optional<Vec> comparator) {
  if (!config.amsgrad || config.lr_schedule != LrSchedule::InverseSqrt) {
    throw Error(ErrorCode::InvalidConfig, "regret probe needs amsgrad and the inverse_sqrt schedule");
  }
  if (steps < 1) throw Error(ErrorCode::InvalidConfig, "steps must be >= 1");
  if (stream.mode == StreamMode::Online) {
    for (const auto& p : stream.sequence) require_convex(p);
  } else {
    require_convex(stream.base);
  }
  const Eigen::Index d = stream.base.dim;
  validate_box(box, d);
  require_same_size(start, box.lo);

  RegretLedger ledger;
  ledger.comparator = comparator ? project_box(*comparator, box) : offline_comparator(stream, steps, box);
  ledger.loss.reserve(steps);
  ledger.comparator_loss.reserve(steps);
  ledger.cumulative.reserve(steps);

  auto belief = make_optimizer(OptimizerKind::AdaBelief, config, d);
  auto adam = make_optimizer(OptimizerKind::Adam, config, d);
  Vec theta = project_box(start, box);
  double regret = 0;
  for (std::size_t t = 1; t <= steps; ++t) {
    const GradientSample sample = sample_gradient(stream, theta, t);
    const double comparator_loss = stream.loss_at(t).eval(ledger.comparator);
    regret += sample.value - comparator_loss;
    ledger.loss.push_back(sample.value);
    ledger.comparator_loss.push_back(comparator_loss);
    ledger.cumulative.push_back(regret);

    const auto r = adabelief_step(belief, theta, sample.g);
    adam_step(adam, theta, sample.g);
    theta = project_box(r.new_params, box);
  }
  const double v_sum = adam.second.cwiseSqrt().sum();
  ledger.belief_to_adam_ratio = v_sum > 0 ? belief.second.cwiseSqrt().sum() / v_sum : kNaN;
  return ledger;
}

std::vector<std::size_t> power_of_two_checkpoints(std::size_t max_steps) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= max_steps; t *= 2) out.push_back(t);
  return out;
}

ConvergenceProbe nonconvex_probe(const Problem& problem, const Vec& start, double sigma,
                                 const OptimizerConfig<double>& config, std::vector<std::size_t> checkpoints,
                                 std::uint64_t seed) {
  if (!problem.smooth) throw Error(ErrorCode::InvalidConfig, problem.name + " is not smooth");
  if (config.lr_schedule != LrSchedule::InverseSqrt) {
    throw Error(ErrorCode::InvalidConfig, "nonconvex probe needs the inverse_sqrt schedule");
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.empty() || checkpoints.front() < 1) {
    throw Error(ErrorCode::InvalidConfig, "checkpoints must be non-empty and >= 1");
  }
  const LossStream stream = LossStream::noisy(problem, sigma, seed);

  ConvergenceProbe probe;
  probe.checkpoints = checkpoints;
  auto state = make_optimizer(OptimizerKind::AdaBelief, config, problem.dim);
  Vec theta = start;
  double best = std::numeric_limits<double>::infinity();
  std::size_t next = 0;
  for (std::size_t t = 1; t <= checkpoints.back(); ++t) {
    const GradientSample sample = sample_gradient(stream, theta, t);
    theta = adabelief_step(state, theta, sample.g).new_params;
    best = std::min(best, problem.grad(theta).squaredNorm());
    if (t == checkpoints[next]) {
      probe.min_sq_grad_norm.push_back(best);
      ++next;
    }
  }

  std::vector<double> x, y;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (!(probe.min_sq_grad_norm[i] > 0)) continue;
    const double T = static_cast<double>(checkpoints[i]);
    x.push_back(std::log((1.0 + std::log(T)) / std::sqrt(T)));
    y.push_back(std::log(probe.min_sq_grad_norm[i]));
  }
  probe.correlation = pearson(x, y);
  return probe;
}

Vec finite_diff_grad(const Problem& problem, const Vec& theta, double h) {
  if (!(h > 0)) throw Error(ErrorCode::InvalidConfig, "h must be > 0");
  Vec out(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vec plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    out[i] = (problem.eval(plus) - problem.eval(minus)) / (2.0 * h);
  }
  return out;
}

GradCheckReport gradient_check(const Problem& problem, std::size_t points, std::uint64_t seed, double h) {
  RngStream rng(seed);
  const double margin = std::max(1e-3, 10.0 * h);
  GradCheckReport report{problem.name, 0, 0.0};
  std::size_t attempts = 0;
  while (report.points < points) {
    if (++attempts > 1000 * points) throw Error(ErrorCode::InvalidConfig, "could not sample away from kinks");
    Vec theta(problem.dim);
    for (Eigen::Index i = 0; i < problem.dim; ++i) theta[i] = -4.5 + 9.0 * rng.next_uniform();
    if (problem.kink_distance && problem.kink_distance(theta) <= margin) continue;
    const Vec g = problem.grad(theta);
    const Vec fd = finite_diff_grad(problem, theta, h);
    report.max_relative_error = std::max(report.max_relative_error, (fd - g).norm() / std::max(g.norm(), 1.0));
    ++report.points;
  }
  return report;
}

RegretLedger standard_regret_run() {
  const LossStream stream = LossStream::online({make_abs_problem(Vec::Constant(1, -0.5)),
                                                make_abs_problem(Vec::Constant(1, 0.5))});
  OptimizerConfig<double> config;
  config.learning_rate = 0.1;
  config.amsgrad = true;
  config.lr_schedule = LrSchedule::InverseSqrt;
  return regret_probe(stream, config, Box::cube(1, -2.0, 2.0), Vec::Constant(1, 1.5), 10000);
}

ConvergenceProbe standard_nonconvex_run(std::uint64_t seed) {
  OptimizerConfig<double> config;
  config.learning_rate = 1e-2;
  config.lr_schedule = LrSchedule::InverseSqrt;
  auto checkpoints = power_of_two_checkpoints(1 << 16);
  checkpoints.push_back(100);
  return nonconvex_probe(builtin_problem("rosenbrock"), default_start("rosenbrock"), 0.1, config,
                         std::move(checkpoints), seed);
}

}  // namespace adabelief
