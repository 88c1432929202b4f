#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "mtsched/core/rng.hpp"
#include "mtsched/envs/task.hpp"

namespace mts {

using Observation = std::vector<double>;

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
};

/// Result of one episode, or of one slice of an episode when `terminal` is false.
struct EpisodeOutcome {
  double score = 0.0;
  std::size_t length = 0;
  std::vector<double> rewards;
  bool terminal = true;
};

/// One episodic task. Observations are [signature | state features]; the
/// signature block never changes within a task.
///
/// Actions are indices into the union action space shared by the instance.
/// Indices at or above the task's native action count are no-ops: the state is
/// unchanged, the reward is 0 and only the step counter advances.
class Env {
 public:
  Env(const TaskDescriptor& task, int union_action_count, int episode_cap);
  virtual ~Env() = default;

  Observation reset(Rng& rng);
  StepResult step(int action, Rng& rng);

  bool done() const noexcept { return done_; }
  int steps() const noexcept { return steps_; }
  int episode_cap() const noexcept { return cap_; }
  int native_actions() const noexcept { return native_actions_; }
  Observation observe() const;

  /// Action of an optimal policy from the current state (used by oracles).
  virtual int optimal_action() const = 0;

  virtual std::unique_ptr<Env> clone() const = 0;

 protected:
  virtual void reset_state(Rng& rng) = 0;
  /// Applies a native action; returns the reward and sets `terminal`.
  virtual double transition(int action, Rng& rng, bool& terminal) = 0;
  virtual void encode_state(std::span<double> out) const = 0;
  /// Hook for families whose episode ends on time (called after a no-op too).
  virtual bool time_limit_reached() const { return false; }

 private:
  std::vector<double> signature_;
  int union_actions_;
  int native_actions_;
  int cap_;
  int steps_ = 0;
  bool done_ = true;
  bool started_ = false;
};

std::unique_ptr<Env> make_env(const TaskDescriptor& task, int union_action_count, int episode_cap);

/// Analytic optimal expected episode score of a task (ignores the episode cap).
double oracle_target(const TaskDescriptor& task);

/// Optimal state values of a grid task computed by value iteration, indexed y * width + x.
std::vector<double> grid_values(const GridParams& p, double tolerance = 1e-12);

}  // namespace mts
