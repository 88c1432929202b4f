#pragma once

#include <cstdint>
#include <shared_mutex>
#include <span>
#include <vector>

#include "mtsched/learner/network.hpp"

namespace mts {

/// Learning rate annealed linearly from `initial` to `final` over `total_steps`,
/// then held at `final`.
struct LrSchedule {
  double initial = 1e-3;
  double final = 1e-4;
  std::int64_t total_steps = 1;

  double at(std::int64_t step) const;
};

/// RMSProp with one second-moment accumulator per parameter:
///   ms <- decay * ms + (1 - decay) g^2,   theta <- theta - lr * g / sqrt(ms + epsilon)
class RmsProp {
 public:
  RmsProp() = default;
  RmsProp(std::size_t n, double decay = 0.99, double epsilon = 1e-8);

  void apply(std::span<double> params, std::span<const double> grad, double lr);

  double decay() const noexcept { return decay_; }
  double epsilon() const noexcept { return epsilon_; }
  const std::vector<double>& mean_square() const noexcept { return ms_; }
  void set_mean_square(std::vector<double> ms);

 private:
  double decay_ = 0.99;
  double epsilon_ = 1e-8;
  std::vector<double> ms_;
};

/// Shared network parameters plus the optimizer state that updates them.
///
/// Workers read copies under a shared lock and apply whole gradient batches
/// under an exclusive lock, so a reader never sees a half-applied update.
class ParameterStore {
 public:
  ParameterStore(ActorCriticNet net, LrSchedule schedule, double rms_decay = 0.99, double rms_epsilon = 1e-8);

  /// Copies the current parameters into `net` (shapes must match).
  void read_into(ActorCriticNet& net) const;
  ActorCriticNet snapshot() const;

  /// Applies one gradient batch with the learning rate for the current step clock.
  void apply(std::span<const double> grad);

  /// Environment-step clock that drives the learning-rate schedule.
  void advance_steps(std::int64_t n);
  std::int64_t steps() const;
  std::int64_t updates() const;

  const LrSchedule& schedule() const noexcept { return schedule_; }
  RmsProp optimizer() const;
  std::uint64_t checksum() const;

  /// Replaces the full training state (used when loading a checkpoint).
  void restore(const ActorCriticNet& net, std::vector<double> mean_square, std::int64_t steps,
               std::int64_t updates);

 private:
  mutable std::shared_mutex mu_;
  ActorCriticNet net_;
  RmsProp opt_;
  LrSchedule schedule_;
  std::int64_t steps_ = 0;
  std::int64_t updates_ = 0;
};

}  // namespace mts
