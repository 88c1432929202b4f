#pragma once

#include <cstddef>
#include <vector>

#include "mtsched/core/targets.hpp"
#include "mtsched/schedulers/scheduler.hpp"

namespace mts {

/// Discounted UCB1-tuned statistics, one entry per task.
struct DucbStats {
  std::vector<double> X;     ///< discounted reward sums
  std::vector<double> n;     ///< discounted pull counts
  std::vector<double> mean;  ///< X_i / n_i
  std::vector<double> bonus; ///< exploration terms c_i
  double gamma = 0.99;
  double beta = 0.25;

  DucbStats() = default;
  DucbStats(std::size_t k, double gamma, double beta);
  std::size_t k() const noexcept { return X.size(); }
};

/// Variance floor inside the exploration bonus.
inline constexpr double kDucbVarianceFloor = 0.002;

/// Discounts every task, credits `task` with max((ta - score) / ta, 0) and one
/// pull, then recomputes means and bonuses.
DucbStats ducb_observe(DucbStats stats, std::size_t task, double score, double target);

/// argmax_i mean_i + beta * bonus_i, lowest index on ties. Every task must
/// have been pulled at least once.
SchedulerDecision ducb_select(const DucbStats& stats);

struct DoublingUpdate {
  TargetRegistry registry;
  DucbStats stats;
};

/// Doubles ta_task first when score >= ta_task, then applies ducb_observe.
DoublingUpdate ducb_doubling_observe(DucbStats stats, TargetRegistry registry, std::size_t task, double score);

/// Bandit scheduler over tasks. Plays each task once (round robin) before
/// switching to UCB selection. With a doubling registry it is the
/// target-free variant.
class UcbScheduler final : public Scheduler {
 public:
  UcbScheduler(TargetRegistry targets, double gamma, double beta);

  std::string_view name() const override;
  std::size_t k() const override { return stats_.k(); }
  SchedulerDecision select_next(const DecisionContext& ctx, Rng& rng) override;
  void observe(std::size_t task, const EpisodeOutcome& outcome) override;

  const DucbStats& stats() const noexcept { return stats_; }
  const TargetRegistry& targets() const noexcept { return targets_; }

 private:
  TargetRegistry targets_;
  DucbStats stats_;
  std::size_t initial_pulls_ = 0;
};

}  // namespace mts
