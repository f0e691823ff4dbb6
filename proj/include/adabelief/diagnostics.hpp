#pragma once

#include "adabelief/optim.hpp"
#include "adabelief/problems.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace adabelief {

// Synthetic gradient sequence indexed by step t >= 1.
using GradientDrive = std::function<Vec(std::size_t)>;

GradientDrive constant_drive(Vec g);
// g = (1, -1), (1, +1), (1, -1), ...
GradientDrive alternating_drive();

struct EmaStats {
  std::string drive;
  std::size_t burn_in = 0;
  std::size_t window = 0;
  Vec m_hat;                 // velocity for SGD
  std::optional<Vec> v_hat;  // Adam
  std::optional<Vec> s_hat;  // AdaBelief
};

/// Feeds `drive` through a fresh optimizer state for burn_in + window steps
/// and averages the bias-corrected moments over the last `window` steps.
/// Requires burn_in >= 1 / (1 - beta2), i.e. 1000 for the default beta2.
EmaStats ema_steady_state(OptimizerKind kind, const OptimizerConfig<double>& config, const GradientDrive& drive,
                          Eigen::Index d, std::size_t burn_in, std::size_t window, std::string description);

enum class CurvatureCase { Flat, SteepValley, LargeGradSmallCurvature };
enum class StepLabel { Small, Large, Unlabelled };

std::string_view to_string(CurvatureCase c);
std::string_view to_string(StepLabel l);

// Declared S/L thresholds. SGD is labelled by |dtheta| against the learning
// rate; the adaptive methods by their effective stepsize |dtheta| / |m_hat|.
struct Table1Thresholds {
  double sgd_large = 0.5;      // |dtheta| >= 0.5 alpha
  double sgd_small = 0.1;      // |dtheta| <= 0.1 alpha
  double adaptive_large = 10;  // |dtheta| / |m_hat| >= 10 alpha
  double adaptive_small = 2;   // |dtheta| / |m_hat| <= 2 alpha
};

struct Table1Cell {
  OptimizerKind kind;
  double mean_abs_update;     // in units of alpha
  double effective_stepsize;  // |dtheta| / |m_hat| in units of alpha; SGD reports |dtheta| / |velocity|
  StepLabel label;
  StepLabel expected;
  bool match;
};

struct Table1Report {
  CurvatureCase scenario;
  std::vector<Table1Cell> cells;  // SGD, Adam, AdaBelief
  bool pass;
};

StepLabel expected_label(CurvatureCase c, OptimizerKind kind);

/// Runs the three optimizers on the scenario's 1-D drive (flat: g = 1e-3;
/// steep valley: g = -1, +1, ...; large gradient / small curvature: g = 1)
/// with default hyperparameters, averages over `window` steps after
/// `burn_in`, and labels each step size.
Table1Report table1_case_check(CurvatureCase c, const Table1Thresholds& thresholds = {},
                               std::size_t burn_in = 2000, std::size_t window = 100);

struct SignDescentReport {
  double adam_ratio;
  double adabelief_ratio;
  double sgd_ratio;
  Vec gradient;
  std::size_t burn_in;
  std::size_t window;
};

/// Mean |dx/dy| over `window` steps after `burn_in`, driven by the constant
/// l1_skew gradient (0.1, 1). config supplies beta1 = beta2 = 0.3 and the
/// SGD momentum.
SignDescentReport sign_descent_angle(const OptimizerConfig<double>& config, std::size_t burn_in = 20,
                                     std::size_t window = 50);

struct RegretLedger {
  Vec comparator;
  std::vector<double> loss;             // f_t(theta_{t-1})
  std::vector<double> comparator_loss;  // f_t(theta*)
  std::vector<double> cumulative;       // R_t
  // sum_i sqrt(s_T,i) / sum_i sqrt(v_T,i) from an Adam state fed the same
  // gradients; informational only.
  double belief_to_adam_ratio = 0.0;

  std::size_t steps() const { return cumulative.size(); }
  double regret(std::size_t t) const { return cumulative.at(t - 1); }
  double regret_over_sqrt(std::size_t t) const;
  double regret_over_t(std::size_t t) const;
};

/// Minimises sum_t f_t over the box with a coarse-to-fine grid that ends at
/// `resolution` spacing (d <= 2). Ties resolve to the first grid point.
Vec offline_comparator(const LossStream& stream, std::size_t steps, const Box& box, double resolution = 1e-4);

/// Projected AdaBelief on an online convex stream. Requires amsgrad and the
/// inverse square root schedule; the comparator is computed offline unless
/// given.
RegretLedger regret_probe(const LossStream& stream, const OptimizerConfig<double>& config, const Box& box,
                          const Vec& start, std::size_t steps, std::optional<Vec> comparator = std::nullopt);

struct ConvergenceProbe {
  std::vector<std::size_t> checkpoints;
  std::vector<double> min_sq_grad_norm;  // min over t <= T of ||grad f(theta_t)||^2
  double correlation = 0.0;  // Pearson r of log(min) against log((1 + log T) / sqrt T)
};

/// AdaBelief with noisy gradients on a smooth problem; the true gradient is
/// evaluated at every iterate theta_1, ..., theta_T.
ConvergenceProbe nonconvex_probe(const Problem& problem, const Vec& start, double sigma,
                                 const OptimizerConfig<double>& config, std::vector<std::size_t> checkpoints,
                                 std::uint64_t seed);

std::vector<std::size_t> power_of_two_checkpoints(std::size_t max_steps);

Vec finite_diff_grad(const Problem& problem, const Vec& theta, double h = 1e-6);

struct GradCheckReport {
  std::string problem;
  std::size_t points;
  double max_relative_error;  // ||fd - g|| / max(||g||, 1)
};

/// Compares analytic gradients with central differences at `points` random
/// points of [-4.5, 4.5]^2, skipping points within max(1e-3, 10h) of a kink.
GradCheckReport gradient_check(const Problem& problem, std::size_t points, std::uint64_t seed, double h = 1e-6);

// Standard probe setups behind `probe --kind regret|nonconvex`.
//
// Regret: f_t(theta) = |theta - z_t| with z_t = -0.5, +0.5, ... on the box
// [-2, 2], start 1.5, alpha = 0.1 / sqrt(t), amsgrad, T = 10^4.
RegretLedger standard_regret_run();
// Golden upper bound on R_t / sqrt(t) over t in [100, 10^4] for the run above.
inline constexpr double kRegretOverSqrtBound = 0.9;

// Non-convex: noisy rosenbrock (sigma = 0.1) from (-2, 2), alpha = 1e-2 / sqrt(t),
// checkpoints 1, 2, 4, ..., 2^16 plus t = 100.
ConvergenceProbe standard_nonconvex_run(std::uint64_t seed);

}  // namespace adabelief
