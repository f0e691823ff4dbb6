#pragma once

#include "adabelief/core.hpp"
#include "adabelief/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adabelief {

struct Box {
  Vec lo;
  Vec hi;

  static Box cube(Eigen::Index d, double lo, double hi) {
    return {Vec::Constant(d, lo), Vec::Constant(d, hi)};
  }
};

// Objective with an exact (sub)gradient. Subgradients of |.| use sign(0) = 0.
struct Problem {
  std::string name;
  Eigen::Index dim = 0;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  std::optional<Vec> optimum;
  double optimal_value = 0.0;
  std::optional<Box> feasible_box;
  bool smooth = true;
  bool convex = true;
  // Euclidean distance to the nearest non-differentiable point; +inf when smooth.
  std::function<double(const Vec&)> kink_distance;
};

// Stable identifiers accepted by builtin_problem and the CLI.
const std::vector<std::string>& builtin_problem_names();

Problem builtin_problem(std::string_view name);

// Fixed start points used by trajectory benchmarks.
Vec default_start(std::string_view name);

// Building blocks for tests and online streams.
Problem make_constant_problem(Eigen::Index d, double value = 0.0);
Problem make_quadratic_problem(const Vec& center);  // ||theta - c||^2
Problem make_abs_problem(const Vec& center);        // sum_i |theta_i - c_i|
Problem shifted(const Problem& base, const Vec& shift);  // theta -> f(theta - shift)

/// Coordinate-wise clip into the box. For an axis-aligned box the projection
/// under any diagonal metric (the sqrt(s_hat) weighting) is this same clip,
/// since the weighted distance separates across coordinates.
Vec project_box(const Vec& y, const Box& box);

void validate_box(const Box& box, Eigen::Index d);

enum class StreamMode { Deterministic, GaussianNoise, Online };

/// Source of per-step gradients. Online streams cycle through `sequence`,
/// so step t uses sequence[(t - 1) % size].
struct LossStream {
  Problem base;
  StreamMode mode = StreamMode::Deterministic;
  double sigma = 0.0;
  std::vector<Problem> sequence;
  RngStream rng;

  static LossStream deterministic(Problem p);
  static LossStream noisy(Problem p, double sigma, std::uint64_t seed);
  static LossStream online(std::vector<Problem> seq);

  const Problem& loss_at(std::size_t t) const;
};

struct GradientSample {
  Vec g;
  double value;  // f_t(theta), noise-free
};

// Pure in (stream, theta, t): the noise for step t comes from rng.split(t).
GradientSample sample_gradient(const LossStream& stream, const Vec& theta, std::size_t t);

}  // namespace adabelief
