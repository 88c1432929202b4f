#pragma once

#include "mtsched/schedulers/scheduler.hpp"

namespace mts {

/// p_i = 1/k, task drawn from it.
SchedulerDecision uniform_select(std::size_t k, Rng& rng);

/// Baseline scheduler: every decision is uniform over the tasks.
class UniformScheduler final : public Scheduler {
 public:
  explicit UniformScheduler(std::size_t k);
  std::string_view name() const override { return "ba3c"; }
  std::size_t k() const override { return k_; }
  SchedulerDecision select_next(const DecisionContext& ctx, Rng& rng) override;
  void observe(std::size_t, const EpisodeOutcome&) override {}

 private:
  std::size_t k_;
};

}  // namespace mts
