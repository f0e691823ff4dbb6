#pragma once

#include "adabelief/core.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

namespace adabelief {

enum class OptimizerKind { AdaBelief, Adam, SGD };

std::string_view to_string(OptimizerKind kind);
std::optional<OptimizerKind> parse_optimizer_kind(std::string_view name);

/// Per-run optimizer record.
///
/// `second` holds v (EMA of g^2) for Adam and s (EMA of (g - m)^2 plus the
/// per-step epsilon) for AdaBelief. `second_max` is the AMSGrad running
/// maximum of s and is only touched when `config.amsgrad` is set.
/// `velocity` is the heavy-ball buffer used by SGD.
template <typename Scalar>
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::AdaBelief;
  Vector<Scalar> m;
  Vector<Scalar> second;
  Vector<Scalar> second_max;
  Vector<Scalar> velocity;
  std::size_t t = 0;
  OptimizerConfig<Scalar> config;

  Eigen::Index dim() const { return m.size(); }
};

template <typename Scalar>
struct StepResult {
  Vector<Scalar> new_params;
  Vector<Scalar> update;  // new_params == params + update, before projection
  Scalar effective_lr;
};

template <typename Scalar>
OptimizerState<Scalar> make_optimizer(OptimizerKind kind, const OptimizerConfig<Scalar>& config,
                                      Eigen::Index d) {
  validate(config);
  if (d < 1) throw Error(ErrorCode::InvalidConfig, "dimension must be >= 1");
  OptimizerState<Scalar> state;
  state.kind = kind;
  state.config = config;
  state.m = Vector<Scalar>::Zero(d);
  state.second = Vector<Scalar>::Zero(d);
  state.second_max = Vector<Scalar>::Zero(d);
  state.velocity = Vector<Scalar>::Zero(d);
  return state;
}

namespace detail {

template <typename Scalar>
void check_step_inputs(const OptimizerState<Scalar>& state, OptimizerKind expected,
                       const Vector<Scalar>& params, const Vector<Scalar>& grad) {
  if (state.kind != expected) {
    throw Error(ErrorCode::InvalidConfig, std::string("state kind is ") +
                                              std::string(to_string(state.kind)) + ", step is " +
                                              std::string(to_string(expected)));
  }
  require_same_size(params, state.m);
  require_same_size(grad, state.m);
  require_finite(params, "params");
  require_finite(grad, "gradient");
}

// Coupled L2 decay folds lambda * theta into the gradient before any EMA.
template <typename Scalar>
Vector<Scalar> effective_gradient(const OptimizerConfig<Scalar>& c, const Vector<Scalar>& params,
                                  const Vector<Scalar>& grad) {
  if (!c.decoupled_weight_decay && c.weight_decay > 0) return grad + c.weight_decay * params;
  return grad;
}

template <typename Scalar>
Scalar bias_factor(bool enabled, Scalar beta, std::size_t t) {
  return enabled ? Scalar(1) - std::pow(beta, static_cast<Scalar>(t)) : Scalar(1);
}

template <typename Scalar>
StepResult<Scalar> finish(const OptimizerConfig<Scalar>& c, Scalar lr, const Vector<Scalar>& params,
                          Vector<Scalar> update) {
  if (c.decoupled_weight_decay && c.weight_decay > 0) update -= lr * c.weight_decay * params;
  StepResult<Scalar> out{params + update, std::move(update), lr};
  require_finite(out.update, "update");
  require_finite(out.new_params, "new params");
  return out;
}

}  // namespace detail

// Non-deduced, so Scalar comes from the state and Eigen expressions convert.
template <typename Scalar>
using Input = std::type_identity_t<Vector<Scalar>>;

/// One AdaBelief step. m is updated first and the fresh m enters (g - m)^2;
/// epsilon is added to s every step and again to sqrt(s_hat) in the
/// denominator. With amsgrad the element-wise max is taken on the raw s.
/// The state is only modified when the step succeeds.
template <typename Scalar>
StepResult<Scalar> adabelief_step(OptimizerState<Scalar>& state, const Input<Scalar>& params,
                                  const Input<Scalar>& grad) {
  detail::check_step_inputs(state, OptimizerKind::AdaBelief, params, grad);
  const auto& c = state.config;
  const std::size_t t = state.t + 1;
  const Vector<Scalar> g = detail::effective_gradient(c, params, grad);

  Vector<Scalar> m = c.beta1 * state.m + (Scalar(1) - c.beta1) * g;
  Vector<Scalar> s = (c.beta2 * state.second.array() +
                      (Scalar(1) - c.beta2) * (g - m).array().square() + c.epsilon)
                         .matrix();
  Vector<Scalar> s_max = c.amsgrad ? Vector<Scalar>(s.cwiseMax(state.second_max)) : state.second_max;
  const Vector<Scalar>& s_used = c.amsgrad ? s_max : s;

  const Scalar bc1 = detail::bias_factor(c.bias_correction, c.beta1, t);
  const Scalar bc2 = detail::bias_factor(c.bias_correction, c.beta2, t);
  const Scalar lr = c.rate_at(t);
  Vector<Scalar> update =
      (-lr * (m.array() / bc1) / ((s_used.array() / bc2).sqrt() + c.epsilon)).matrix();

  auto result = detail::finish(c, lr, params, std::move(update));
  require_finite(s, "belief term");
  state.m = std::move(m);
  state.second = std::move(s);
  state.second_max = std::move(s_max);
  state.t = t;
  return result;
}

/// One Adam step; with amsgrad the running max of v is used in the denominator.
template <typename Scalar>
StepResult<Scalar> adam_step(OptimizerState<Scalar>& state, const Input<Scalar>& params,
                             const Input<Scalar>& grad) {
  detail::check_step_inputs(state, OptimizerKind::Adam, params, grad);
  const auto& c = state.config;
  const std::size_t t = state.t + 1;
  const Vector<Scalar> g = detail::effective_gradient(c, params, grad);

  Vector<Scalar> m = c.beta1 * state.m + (Scalar(1) - c.beta1) * g;
  Vector<Scalar> v = c.beta2 * state.second + (Scalar(1) - c.beta2) * g.cwiseAbs2();
  Vector<Scalar> v_max = c.amsgrad ? Vector<Scalar>(v.cwiseMax(state.second_max)) : state.second_max;
  const Vector<Scalar>& v_used = c.amsgrad ? v_max : v;

  const Scalar bc1 = detail::bias_factor(c.bias_correction, c.beta1, t);
  const Scalar bc2 = detail::bias_factor(c.bias_correction, c.beta2, t);
  const Scalar lr = c.rate_at(t);
  Vector<Scalar> update =
      (-lr * (m.array() / bc1) / ((v_used.array() / bc2).sqrt() + c.epsilon)).matrix();

  auto result = detail::finish(c, lr, params, std::move(update));
  require_finite(v, "second moment");
  state.m = std::move(m);
  state.second = std::move(v);
  state.second_max = std::move(v_max);
  state.t = t;
  return result;
}

/// Heavy-ball SGD: velocity <- mu * velocity + g, update = -lr * velocity.
template <typename Scalar>
StepResult<Scalar> sgd_step(OptimizerState<Scalar>& state, const Input<Scalar>& params,
                            const Input<Scalar>& grad) {
  detail::check_step_inputs(state, OptimizerKind::SGD, params, grad);
  const auto& c = state.config;
  const std::size_t t = state.t + 1;
  const Vector<Scalar> g = detail::effective_gradient(c, params, grad);

  Vector<Scalar> velocity = c.momentum * state.velocity + g;
  const Scalar lr = c.rate_at(t);
  auto result = detail::finish(c, lr, params, Vector<Scalar>(-lr * velocity));
  state.velocity = std::move(velocity);
  state.t = t;
  return result;
}

template <typename Scalar>
StepResult<Scalar> step(OptimizerState<Scalar>& state, const Input<Scalar>& params,
                        const Input<Scalar>& grad) {
  switch (state.kind) {
    case OptimizerKind::AdaBelief: return adabelief_step(state, params, grad);
    case OptimizerKind::Adam: return adam_step(state, params, grad);
    case OptimizerKind::SGD: return sgd_step(state, params, grad);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown optimizer kind");
}

// Bias-corrected views of the current state, as used by the last step.
template <typename Scalar>
Vector<Scalar> first_moment_hat(const OptimizerState<Scalar>& state) {
  if (state.t == 0) return state.m;
  return state.m / detail::bias_factor(state.config.bias_correction, state.config.beta1, state.t);
}

template <typename Scalar>
Vector<Scalar> second_moment_hat(const OptimizerState<Scalar>& state) {
  const Vector<Scalar>& raw = state.config.amsgrad ? state.second_max : state.second;
  if (state.t == 0) return raw;
  return raw / detail::bias_factor(state.config.bias_correction, state.config.beta2, state.t);
}

inline std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::AdaBelief: return "adabelief";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::SGD: return "sgd";
  }
  return "unknown";
}

inline std::optional<OptimizerKind> parse_optimizer_kind(std::string_view name) {
  if (name == "adabelief") return OptimizerKind::AdaBelief;
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "sgd") return OptimizerKind::SGD;
  return std::nullopt;
}

}  // namespace adabelief
