#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adabelief {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vec = Vector<double>;

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteResult,
  InvalidConfig,
  UnknownProblem,
  InvalidBox,
  NonConvexStream,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this one exception type; the
// code lets callers branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::InvalidBox: return "InvalidBox";
    case ErrorCode::NonConvexStream: return "NonConvexStream";
  }
  return "Unknown";
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.array().isFinite().all();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& x, std::string_view what) {
  if (!all_finite(x)) {
    throw Error(ErrorCode::NonFiniteResult, std::string(what) + " has a non-finite entry");
  }
}

template <typename A, typename B>
void require_same_size(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
}

// Checked element-wise helpers. Eigen expressions are used directly inside
// the optimizers; these are the guarded entry points for everything else.

template <typename Scalar>
Vector<Scalar> add(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  require_same_size(a, b);
  Vector<Scalar> out = a + b;
  require_finite(out, "add");
  return out;
}

template <typename Scalar>
Vector<Scalar> sub(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  require_same_size(a, b);
  Vector<Scalar> out = a - b;
  require_finite(out, "sub");
  return out;
}

template <typename Scalar>
Vector<Scalar> mul(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  require_same_size(a, b);
  Vector<Scalar> out = a.cwiseProduct(b);
  require_finite(out, "mul");
  return out;
}

template <typename Scalar>
Vector<Scalar> div(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  require_same_size(a, b);
  if ((b.array() == Scalar(0)).any()) {
    throw Error(ErrorCode::NonFiniteResult, "div: zero denominator");
  }
  Vector<Scalar> out = a.cwiseQuotient(b);
  require_finite(out, "div");
  return out;
}

template <typename Scalar>
Vector<Scalar> scale(const Vector<Scalar>& a, Scalar k) {
  Vector<Scalar> out = k * a;
  require_finite(out, "scale");
  return out;
}

template <typename Scalar>
Vector<Scalar> sqrt(const Vector<Scalar>& a) {
  if ((a.array() < Scalar(0)).any()) {
    throw Error(ErrorCode::NonFiniteResult, "sqrt: negative entry");
  }
  Vector<Scalar> out = a.cwiseSqrt();
  require_finite(out, "sqrt");
  return out;
}

template <typename Scalar>
Vector<Scalar> max(const Vector<Scalar>& a, const Vector<Scalar>& b) {
  require_same_size(a, b);
  Vector<Scalar> out = a.cwiseMax(b);
  require_finite(out, "max");
  return out;
}

enum class LrSchedule { Constant, InverseSqrt };

template <typename Scalar>
struct OptimizerConfig {
  Scalar learning_rate = Scalar(1e-3);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
  Scalar weight_decay = Scalar(0);
  bool decoupled_weight_decay = false;
  bool amsgrad = false;
  bool bias_correction = true;
  LrSchedule lr_schedule = LrSchedule::Constant;
  Scalar momentum = Scalar(0.9);  // SGD only

  // Rate at step t (t >= 1).
  Scalar rate_at(std::size_t t) const {
    if (lr_schedule == LrSchedule::InverseSqrt) {
      return learning_rate / std::sqrt(static_cast<Scalar>(t));
    }
    return learning_rate;
  }
};

template <typename Scalar>
void validate(const OptimizerConfig<Scalar>& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  // Written as negated comparisons so NaN is rejected too.
  if (!(c.learning_rate > 0) || !std::isfinite(c.learning_rate)) fail("learning_rate must be > 0");
  if (!(c.epsilon > 0) || !std::isfinite(c.epsilon)) fail("epsilon must be > 0");
  if (!(c.beta1 >= 0 && c.beta1 < 1)) fail("beta1 must lie in [0, 1)");
  if (!(c.beta2 >= 0 && c.beta2 < 1)) fail("beta2 must lie in [0, 1)");
  if (!(c.momentum >= 0 && c.momentum < 1)) fail("momentum must lie in [0, 1)");
  if (!(c.weight_decay >= 0) || !std::isfinite(c.weight_decay)) fail("weight_decay must be >= 0");
}

}  // namespace adabelief
