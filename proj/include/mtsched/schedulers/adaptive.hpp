#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mtsched/core/score_window.hpp"
#include "mtsched/core/targets.hpp"
#include "mtsched/schedulers/scheduler.hpp"

namespace mts {

/// Softmax over lags: p_i proportional to exp(m_i / tau), m_i = (ta_i - a_i) / ta_i.
std::vector<double> a5c_distribution(std::span<const double> averages, std::span<const double> targets,
                                     double tau);

/// Adaptive sampling from the lag softmax after a uniform warmup.
///
/// Warmup lasts until `warmup_steps` learner steps have elapsed and, when
/// `fill_windows` is set, every task window holds `window` scores.
class AdaptiveScheduler final : public Scheduler {
 public:
  AdaptiveScheduler(TargetRegistry targets, double tau, std::size_t window, std::int64_t warmup_steps,
                    bool fill_windows);

  std::string_view name() const override { return "a5c"; }
  std::size_t k() const override { return targets_.size(); }
  SchedulerDecision select_next(const DecisionContext& ctx, Rng& rng) override;
  void observe(std::size_t task, const EpisodeOutcome& outcome) override;

  bool in_warmup(const DecisionContext& ctx) const;
  const std::vector<ScoreWindow>& windows() const noexcept { return windows_; }

 private:
  TargetRegistry targets_;
  double tau_;
  std::vector<ScoreWindow> windows_;
  std::int64_t warmup_steps_;
  bool fill_windows_;
};

}  // namespace mts
