#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mtsched/core/rng.hpp"
#include "mtsched/envs/env.hpp"

namespace mts {

/// What a scheduler chose at one task decision step.
struct SchedulerDecision {
  std::size_t task = 0;
  /// Sampling distribution over tasks; one-hot for argmax schedulers.
  std::vector<double> distribution;
  /// The uniform draw that selected `task` through Rng::pick.
  double draw = 0.0;
  /// Per-algorithm quantities, e.g. lags, UCB terms, meta reward.
  std::map<std::string, std::vector<double>> diagnostics;
};

struct DecisionContext {
  /// Environment steps consumed by the learner so far.
  std::int64_t learner_steps = 0;
};

/// A task-selection policy consulted at every task decision step.
///
/// Every call to select_next consumes exactly one uniform draw from `rng` and
/// maps it through the emitted distribution, so a decision log can be replayed
/// from the seed alone.
class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t k() const = 0;
  virtual SchedulerDecision select_next(const DecisionContext& ctx, Rng& rng) = 0;
  /// Result of training on `task` since the previous decision.
  virtual void observe(std::size_t task, const EpisodeOutcome& outcome) = 0;

  const std::vector<double>& current_distribution() const noexcept { return last_distribution_; }

 protected:
  /// Draws the task from `d.distribution` and records it.
  SchedulerDecision finish(SchedulerDecision d, Rng& rng);

  std::vector<double> last_distribution_;
};

/// True when every entry is >= 0 and the entries sum to 1 within `tol`.
bool is_distribution(const std::vector<double>& p, double tol = 1e-9);

}  // namespace mts
