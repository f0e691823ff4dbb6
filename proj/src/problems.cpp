#include "adabelief/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace adabelief {
namespace {

double sgn(double v) { return static_cast<double>((v > 0) - (v < 0)); }

constexpr double kInf = std::numeric_limits<double>::infinity();

double no_kink(const Vec&) { return kInf; }

void require_dim(const Vec& theta, Eigen::Index d) {
  if (theta.size() != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected length " + std::to_string(d) + ", got " + std::to_string(theta.size()));
  }
}

Problem make2d(std::string name, std::function<double(double, double)> f,
               std::function<Vec(double, double)> g, Vec optimum, bool smooth,
               std::function<double(const Vec&)> kink) {
  Problem p;
  p.name = std::move(name);
  p.dim = 2;
  p.eval = [f](const Vec& th) {
    require_dim(th, 2);
    return f(th[0], th[1]);
  };
  p.grad = [g](const Vec& th) {
    require_dim(th, 2);
    return g(th[0], th[1]);
  };
  p.optimal_value = f(optimum[0], optimum[1]);
  p.optimum = std::move(optimum);
  p.smooth = smooth;
  p.kink_distance = std::move(kink);
  return p;
}

Vec vec2(double x, double y) { return Vec{{x, y}}; }

Problem l1_separable() {
  return make2d(
      "l1_separable", [](double x, double y) { return std::abs(x) + std::abs(y); },
      [](double x, double y) { return vec2(sgn(x), sgn(y)); }, vec2(0, 0), false,
      [](const Vec& th) { return std::min(std::abs(th[0]), std::abs(th[1])); });
}

Problem l1_inseparable() {
  return make2d(
      "l1_inseparable",
      [](double x, double y) { return std::abs(x + y) + std::abs(x - y) / 10.0; },
      [](double x, double y) {
        const double a = sgn(x + y);
        const double b = sgn(x - y) / 10.0;
        return vec2(a + b, a - b);
      },
      vec2(0, 0), false,
      [](const Vec& th) {
        return std::min(std::abs(th[0] + th[1]), std::abs(th[0] - th[1])) / std::numbers::sqrt2;
      });
}

Problem l2_inseparable() {
  return make2d(
      "l2_inseparable",
      [](double x, double y) {
        const double a = x + y;
        const double b = x - y;
        return a * a + b * b / 10.0;
      },
      [](double x, double y) {
        const double a = 2.0 * (x + y);
        const double b = 0.2 * (x - y);
        return vec2(a + b, a - b);
      },
      vec2(0, 0), true, no_kink);
}

Problem l1_skew() {
  return make2d(
      "l1_skew", [](double x, double y) { return std::abs(x) / 10.0 + std::abs(y); },
      [](double x, double y) { return vec2(sgn(x) / 10.0, sgn(y)); }, vec2(0, 0), false,
      [](const Vec& th) { return std::min(std::abs(th[0]), std::abs(th[1])); });
}

Problem beale() {
  Problem p = make2d(
      "beale",
      [](double x, double y) {
        const double r1 = 1.5 - x + x * y;
        const double r2 = 2.25 - x + x * y * y;
        const double r3 = 2.625 - x + x * y * y * y;
        return r1 * r1 + r2 * r2 + r3 * r3;
      },
      [](double x, double y) {
        const double y2 = y * y;
        const double y3 = y2 * y;
        const double r1 = 1.5 - x + x * y;
        const double r2 = 2.25 - x + x * y2;
        const double r3 = 2.625 - x + x * y3;
        return vec2(2.0 * (r1 * (y - 1.0) + r2 * (y2 - 1.0) + r3 * (y3 - 1.0)),
                    2.0 * x * (r1 + 2.0 * y * r2 + 3.0 * y2 * r3));
      },
      vec2(3.0, 0.5), true, no_kink);
  p.convex = false;
  return p;
}

Problem rosenbrock() {
  Problem p = make2d(
      "rosenbrock",
      [](double x, double y) {
        const double a = 1.0 - x;
        const double b = y - x * x;
        return a * a + 100.0 * b * b;
      },
      [](double x, double y) {
        const double b = y - x * x;
        return vec2(-2.0 * (1.0 - x) - 400.0 * x * b, 200.0 * b);
      },
      vec2(1.0, 1.0), true, no_kink);
  p.convex = false;
  return p;
}

}  // namespace

const std::vector<std::string>& builtin_problem_names() {
  static const std::vector<std::string> names{"l1_separable", "l1_inseparable", "l2_inseparable",
                                              "l1_skew",      "beale",          "rosenbrock"};
  return names;
}

Problem builtin_problem(std::string_view name) {
  if (name == "l1_separable") return l1_separable();
  if (name == "l1_inseparable") return l1_inseparable();
  if (name == "l2_inseparable") return l2_inseparable();
  if (name == "l1_skew") return l1_skew();
  if (name == "beale") return beale();
  if (name == "rosenbrock") return rosenbrock();
  throw Error(ErrorCode::UnknownProblem, std::string(name));
}

Vec default_start(std::string_view name) {
  if (name == "beale") return vec2(-4.0, -4.0);
  if (name == "rosenbrock") return vec2(-2.0, 2.0);
  if (name == "l1_separable" || name == "l1_inseparable" || name == "l2_inseparable" ||
      name == "l1_skew") {
    return vec2(-10.0, 0.1);
  }
  throw Error(ErrorCode::UnknownProblem, std::string(name));
}

Problem make_constant_problem(Eigen::Index d, double value) {
  if (d < 1) throw Error(ErrorCode::DimensionMismatch, "dimension must be >= 1");
  Problem p;
  p.name = "constant";
  p.dim = d;
  p.eval = [d, value](const Vec& th) {
    require_dim(th, d);
    return value;
  };
  p.grad = [d](const Vec& th) {
    require_dim(th, d);
    return Vec(Vec::Zero(d));
  };
  p.optimal_value = value;
  p.kink_distance = no_kink;
  return p;
}

Problem make_quadratic_problem(const Vec& center) {
  const Eigen::Index d = center.size();
  Problem p;
  p.name = "quadratic";
  p.dim = d;
  p.eval = [center](const Vec& th) {
    require_dim(th, center.size());
    return (th - center).squaredNorm();
  };
  p.grad = [center](const Vec& th) {
    require_dim(th, center.size());
    return Vec(2.0 * (th - center));
  };
  p.optimum = center;
  p.optimal_value = 0.0;
  p.kink_distance = no_kink;
  return p;
}

Problem make_abs_problem(const Vec& center) {
  const Eigen::Index d = center.size();
  Problem p;
  p.name = "abs";
  p.dim = d;
  p.eval = [center](const Vec& th) {
    require_dim(th, center.size());
    return (th - center).cwiseAbs().sum();
  };
  p.grad = [center](const Vec& th) {
    require_dim(th, center.size());
    return Vec((th - center).unaryExpr([](double v) { return sgn(v); }));
  };
  p.optimum = center;
  p.optimal_value = 0.0;
  p.smooth = false;
  p.kink_distance = [center](const Vec& th) { return (th - center).cwiseAbs().minCoeff(); };
  return p;
}

Problem shifted(const Problem& base, const Vec& shift) {
  require_dim(shift, base.dim);
  Problem p = base;
  p.name = base.name + "_shifted";
  p.eval = [f = base.eval, shift](const Vec& th) { return f(th - shift); };
  p.grad = [g = base.grad, shift](const Vec& th) { return g(th - shift); };
  p.kink_distance = [k = base.kink_distance, shift](const Vec& th) { return k(th - shift); };
  if (base.optimum) p.optimum = *base.optimum + shift;
  if (base.feasible_box) p.feasible_box = Box{base.feasible_box->lo + shift, base.feasible_box->hi + shift};
  return p;
}

void validate_box(const Box& box, Eigen::Index d) {
  if (box.lo.size() != d || box.hi.size() != d) {
    throw Error(ErrorCode::InvalidBox, "box dimension does not match");
  }
  if (!all_finite(box.lo) || !all_finite(box.hi) || (box.lo.array() > box.hi.array()).any()) {
    throw Error(ErrorCode::InvalidBox, "box needs finite bounds with lo <= hi");
  }
}

Vec project_box(const Vec& y, const Box& box) {
  validate_box(box, y.size());
  return y.cwiseMax(box.lo).cwiseMin(box.hi);
}

LossStream LossStream::deterministic(Problem p) {
  LossStream s;
  s.base = std::move(p);
  return s;
}

LossStream LossStream::noisy(Problem p, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");
  LossStream s;
  s.base = std::move(p);
  s.mode = StreamMode::GaussianNoise;
  s.sigma = sigma;
  s.rng = RngStream(seed);
  return s;
}

LossStream LossStream::online(std::vector<Problem> seq) {
  if (seq.empty()) throw Error(ErrorCode::InvalidConfig, "online stream needs at least one loss");
  for (const auto& p : seq) {
    if (p.dim != seq.front().dim) throw Error(ErrorCode::DimensionMismatch, "online losses differ in dimension");
  }
  LossStream s;
  s.base = seq.front();
  s.mode = StreamMode::Online;
  s.sequence = std::move(seq);
  return s;
}

const Problem& LossStream::loss_at(std::size_t t) const {
  if (mode != StreamMode::Online) return base;
  return sequence[(t - 1) % sequence.size()];
}

GradientSample sample_gradient(const LossStream& stream, const Vec& theta, std::size_t t) {
  require_finite(theta, "theta");
  const Problem& p = stream.loss_at(t);
  GradientSample out{p.grad(theta), p.eval(theta)};
  if (stream.mode == StreamMode::GaussianNoise && stream.sigma > 0) {
    RngStream step_rng = stream.rng.split(t);
    out.g += gaussian_noise(step_rng, p.dim, stream.sigma);
  }
  return out;
}

}  // namespace adabelief
