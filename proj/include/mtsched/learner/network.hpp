#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtsched/core/rng.hpp"

namespace mts {

/// Architecture of an actor-critic network: tanh hidden layers, a softmax policy
/// head over `actions` outputs and a linear scalar value head.
struct NetShape {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden{32};
  std::size_t actions = 2;
  /// When set, the last hidden layer is an Elman cell fed its previous output.
  bool recurrent = false;
  /// 0 for one shared policy head; otherwise one A x A projection per task.
  std::size_t heads = 0;

  friend bool operator==(const NetShape&, const NetShape&) = default;
};

/// Forward result for one time step.
struct StepOutput {
  std::vector<double> policy;
  double value = 0.0;
  /// Last hidden layer output, which is also the carried state when recurrent.
  std::vector<double> hidden;
};

/// Experience gathered over at most n steps of one task.
struct TransitionBatch {
  std::size_t head = 0;
  std::vector<std::vector<double>> observations;
  std::vector<int> actions;
  std::vector<double> rewards;
  /// Value estimates recorded while acting (informational).
  std::vector<double> values;
  /// V(s_n) for a truncated slice, 0 when the episode terminated.
  double bootstrap = 0.0;
  bool terminal = false;
  /// Recurrent state before the first step; treated as a constant.
  std::vector<double> initial_hidden;

  std::size_t size() const noexcept { return actions.size(); }
};

/// Which loss terms contribute to a gradient.
struct LossTerms {
  bool policy = true;
  bool value = true;
  bool entropy = true;
};

struct BatchGradient {
  std::vector<double> grad;
  std::vector<double> returns;
  std::vector<double> advantages;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

/// Multi-task actor-critic network whose parameters live in one flat vector.
///
/// Loss minimised per step t of a batch:
///   -A_t log pi(a_t|s_t) + 0.5 (R_t - V(s_t))^2 - beta H(pi(.|s_t))
/// with R_t the n-step return and A_t = R_t - V(s_t) held constant.
class ActorCriticNet {
 public:
  ActorCriticNet() = default;
  /// All weights zero except per-task heads, which start as identity matrices.
  explicit ActorCriticNet(NetShape shape);

  /// Gaussian hidden weights scaled by 1/sqrt(fan_in); output layers stay zero.
  void initialize(Rng& rng);

  const NetShape& shape() const noexcept { return shape_; }
  std::size_t hidden_width() const { return shape_.hidden.back(); }
  std::size_t param_count() const noexcept { return params_.size(); }
  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  void set_params(std::span<const double> p);

  /// One step. `prev_hidden` is ignored unless recurrent (empty means zeros).
  /// `clamp_unit` forces that unit of the last hidden layer to output 0.
  StepOutput forward(std::span<const double> obs, std::size_t head = 0,
                     std::span<const double> prev_hidden = {},
                     std::optional<std::size_t> clamp_unit = std::nullopt) const;

  /// Gradient of the batch loss. Throws NumericalError naming the first
  /// step that produced a non-finite value.
  BatchGradient gradients(const TransitionBatch& batch, double gamma, double entropy_beta,
                          LossTerms terms = {}) const;

  /// Zeroes every weight leaving last-hidden unit `unit` (policy, value, recurrence).
  void zero_outgoing(std::size_t unit);

  friend bool operator==(const ActorCriticNet& a, const ActorCriticNet& b) {
    return a.shape_ == b.shape_ && a.params_ == b.params_;
  }

 private:
  struct Dense {
    std::size_t w = 0;
    std::size_t b = 0;
    std::size_t in = 0;
    std::size_t out = 0;
  };
  struct Trace;

  void forward_into(std::span<const double> obs, std::size_t head, std::span<const double> prev_hidden,
                    std::optional<std::size_t> clamp_unit, Trace& tr) const;

  NetShape shape_;
  std::vector<Dense> layers_;
  std::size_t recurrent_offset_ = 0;
  Dense policy_;
  Dense value_;
  std::size_t heads_offset_ = 0;
  std::vector<double> params_;
};

/// n-step discounted returns R_t = r_t + gamma R_{t+1}, seeded with `bootstrap`.
std::vector<double> nstep_returns(std::span<const double> rewards, double bootstrap, double gamma);

/// Free-function form used by the training loop.
inline BatchGradient compute_gradients(const ActorCriticNet& net, const TransitionBatch& batch,
                                       double gamma, double entropy_beta, LossTerms terms = {}) {
  return net.gradients(batch, gamma, entropy_beta, terms);
}

/// Order-sensitive 64-bit checksum of a parameter vector.
std::uint64_t checksum(std::span<const double> values);

}  // namespace mts
