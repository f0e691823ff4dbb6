#include "adabelief/runner.hpp"

#include <gtest/gtest.h>

namespace adabelief {
namespace {

// Two AdaBelief steps on l1_separable from (-10, 0.1), from
// tests/oracles/scalar_oracle.py.
const Vec kTheta1{{-9.9988888957598814718, 0.098888895759881471838}};
const Vec kTheta2{{-9.9977208990034181385, 0.097720899003418138509}};

RunSpec spec_for(const std::string& problem, OptimizerKind kind, std::size_t steps) {
  RunSpec s;
  s.problem = problem;
  s.kind = kind;
  s.config = default_config(problem, kind);
  s.start = default_start(problem);
  s.steps = steps;
  return s;
}

TEST(Run, TwoStepsMatchHandRecursion) {
  const auto traj = run(spec_for("l1_separable", OptimizerKind::AdaBelief, 2));
  ASSERT_EQ(traj.rows.size(), 2u);
  EXPECT_LT((traj.rows[0].theta - kTheta1).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((traj.rows[1].theta - kTheta2).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(traj.rows[0].step, 1u);
  EXPECT_DOUBLE_EQ(traj.rows[0].grad_norm, std::sqrt(2.0));
  EXPECT_EQ(traj.rows[1].theta, traj.rows[0].theta + traj.rows[1].update);
  EXPECT_DOUBLE_EQ(traj.rows[1].f, traj.rows[1].theta.cwiseAbs().sum());
}

TEST(Run, ZeroGradientProblemNeverMoves) {
  for (auto kind : {OptimizerKind::AdaBelief, OptimizerKind::Adam, OptimizerKind::SGD}) {
    RunSpec s;
    s.problem = "constant";
    s.kind = kind;
    s.start = Vec{{0.25, -7.0, 3.0}};
    s.steps = 50;
    const auto traj = run(s, LossStream::deterministic(make_constant_problem(3)));
    ASSERT_EQ(traj.rows.size(), 50u);
    for (const auto& r : traj.rows) ASSERT_EQ(r.theta, s.start);
    EXPECT_FALSE(traj.first_hit.has_value());
  }
}

TEST(Run, DeterministicAcrossRepeats) {
  auto s = spec_for("rosenbrock", OptimizerKind::AdaBelief, 500);
  s.sigma = 0.1;
  s.seed = 99;
  const auto a = run(s);
  const auto b = run(s);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    ASSERT_EQ(a.rows[i].theta, b.rows[i].theta);
    ASSERT_EQ(a.rows[i].grad_norm, b.rows[i].grad_norm);
  }
  s.seed = 100;
  EXPECT_NE(run(s).rows.back().theta, a.rows.back().theta);
}

TEST(Run, RejectsBadSpecs) {
  auto s = spec_for("beale", OptimizerKind::Adam, 10);
  s.start = Vec::Zero(3);
  EXPECT_THROW(run(s), Error);
  s = spec_for("beale", OptimizerKind::Adam, 0);
  EXPECT_THROW(run(s), Error);
  s = spec_for("beale", OptimizerKind::Adam, 10);
  s.problem = "nope";
  EXPECT_THROW(run(s), Error);
  s = spec_for("beale", OptimizerKind::Adam, 10);
  s.project = true;  // builtin problems carry no box
  EXPECT_THROW(run(s), Error);
}

TEST(Run, DivergenceTruncatesAndTags) {
  const auto traj = run(spec_for("beale", OptimizerKind::SGD, 100));
  ASSERT_TRUE(traj.diverged());
  EXPECT_EQ(traj.rows.size(), *traj.diverged_at - 1);
  for (const auto& r : traj.rows) EXPECT_TRUE(std::isfinite(r.f));
}

TEST(Run, ProjectionKeepsIteratesInTheBox) {
  for (auto kind : {OptimizerKind::AdaBelief, OptimizerKind::Adam, OptimizerKind::SGD}) {
    auto s = spec_for("l1_separable", kind, 3000);
    s.config.learning_rate = 0.05;
    s.project = true;
    s.box = Box{Vec{{-10.0, 0.05}}, Vec{{-2.0, 1.0}}};
    const auto traj = run(s);
    for (const auto& r : traj.rows) {
      ASSERT_TRUE((r.theta.array() >= s.box->lo.array()).all());
      ASSERT_TRUE((r.theta.array() <= s.box->hi.array()).all());
    }
    // Pinned against the lower corner once the box stops the descent.
    EXPECT_NEAR(traj.rows.back().theta[0], -2.0, 0.5);
  }
}

TEST(FirstHit, Basics) {
  TrajectoryRecord traj;
  traj.rows.push_back({1, Vec{{1.0, 1.0}}, 0, 0, Vec::Zero(2)});
  traj.rows.push_back({2, Vec{{0.5, 0.0}}, 0, 0, Vec::Zero(2)});
  traj.rows.push_back({3, Vec{{0.001, 0.0}}, 0, 0, Vec::Zero(2)});
  EXPECT_EQ(first_hit_step(traj, Vec::Zero(2), 1e-2), 3u);
  EXPECT_EQ(first_hit_step(traj, Vec::Zero(2), 0.5), 2u);
  EXPECT_EQ(first_hit_step(traj, Vec{{1.0, 1.0}}, 1e-2), 1u);
  EXPECT_FALSE(first_hit_step(traj, Vec{{9.0, 9.0}}, 1e-2).has_value());
}

TEST(FirstHit, StartInsideBallHitsAtStepOne) {
  auto s = spec_for("l1_separable", OptimizerKind::Adam, 5);
  s.start = Vec{{0.001, -0.001}};
  EXPECT_EQ(run(s).first_hit, 1u);
}

TEST(FirstHit, BealeOrderingFromDefaultStart) {
  std::vector<RunSpec> specs;
  for (auto kind : {OptimizerKind::AdaBelief, OptimizerKind::Adam, OptimizerKind::SGD}) {
    specs.push_back(spec_for("beale", kind, 50000));
  }
  const auto r = run_all(specs);
  // Golden indices from the first verified run.
  EXPECT_EQ(r[0].first_hit, 19492u);
  EXPECT_EQ(r[1].first_hit, 25768u);
  EXPECT_FALSE(r[2].first_hit.has_value());
  EXPECT_TRUE(r[2].diverged());
}

TEST(Run, IteratesStayBoundedOnEveryBuiltin) {
  std::vector<RunSpec> specs;
  for (const auto& n : builtin_problem_names()) {
    for (auto kind : {OptimizerKind::AdaBelief, OptimizerKind::Adam, OptimizerKind::SGD}) {
      specs.push_back(spec_for(n, kind, 100000));
    }
  }
  for (const auto& traj : run_all(specs)) {
    if (traj.problem == "beale" && traj.kind == OptimizerKind::SGD) {
      // SGD at alpha = 1e-3 overflows from (-4, -4) within a few steps.
      EXPECT_TRUE(traj.diverged());
      continue;
    }
    ASSERT_FALSE(traj.diverged()) << traj.problem << " " << to_string(traj.kind);
    double largest = 0;
    for (const auto& r : traj.rows) largest = std::max(largest, r.theta.norm());
    EXPECT_LE(largest, 10 * (traj.start.norm() + 1)) << traj.problem << " " << to_string(traj.kind);
  }
}

TEST(DefaultConfig, SkewUsesLowBetas) {
  const auto c = default_config("l1_skew", OptimizerKind::Adam);
  EXPECT_EQ(c.beta1, 0.3);
  EXPECT_EQ(c.beta2, 0.3);
  EXPECT_EQ(c.momentum, 0.3);
  const auto d = default_config("beale", OptimizerKind::SGD);
  EXPECT_EQ(d.beta1, 0.9);
  EXPECT_EQ(d.momentum, 0.9);
  EXPECT_EQ(d.learning_rate, 1e-3);
}

}  // namespace
}  // namespace adabelief
