#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mtsched/core/instance.hpp"
#include "mtsched/core/rng.hpp"
#include "mtsched/envs/env.hpp"
#include "mtsched/learner/network.hpp"
#include "mtsched/learner/optimizer.hpp"

namespace mts {

struct LearnerParams {
  double gamma = 0.99;
  std::size_t n_step = 20;
  double entropy_beta = 0.02;
  /// When false the worker acts but never applies gradients.
  bool updates_enabled = true;
};

struct ActResult {
  int action = 0;
  std::vector<double> policy;
  double value = 0.0;
  std::vector<double> hidden;
};

/// Samples an action from the policy for `task` (the head index in per-task mode).
ActResult act(const ActorCriticNet& net, std::span<const double> obs, std::size_t task, Rng& rng,
              std::span<const double> prev_hidden = {});

/// Per-task execution state that survives task switches: the environment,
/// its random streams, the pending observation and the recurrent state.
struct TaskCursor {
  std::unique_ptr<Env> env;
  Rng env_rng;
  Rng act_rng;
  Observation obs;
  std::vector<double> hidden;
  bool in_episode = false;
};

/// One training thread. Owns an environment per task and a local copy of the
/// network, and pushes gradient batches to a shared ParameterStore.
class Worker {
 public:
  Worker(ParameterStore& store, const MultiTaskInstance& instance, LearnerParams params, std::uint64_t seed,
         std::size_t worker_index = 0);

  /// Starts a fresh episode of `task` and trains until it ends, updating every
  /// n_step steps and at the end.
  EpisodeOutcome train_for_one_episode(std::size_t task);

  /// Advances the task's current episode (starting one if needed) by at most
  /// `n` steps with a single update. The result is partial unless `terminal`.
  EpisodeOutcome train_for_n_steps(std::size_t task, std::size_t n);

  /// Called with every batch just before its gradient is applied.
  void set_batch_observer(std::function<void(const TransitionBatch&)> fn) { observer_ = std::move(fn); }

  const TaskCursor& cursor(std::size_t task) const { return cursors_.at(task); }
  const LearnerParams& params() const noexcept { return params_; }

 private:
  void run_segment(std::size_t task, std::size_t max_steps, EpisodeOutcome& outcome);

  ParameterStore& store_;
  const MultiTaskInstance& instance_;
  LearnerParams params_;
  ActorCriticNet local_;
  std::vector<TaskCursor> cursors_;
  std::function<void(const TransitionBatch&)> observer_;
};

}  // namespace mts
