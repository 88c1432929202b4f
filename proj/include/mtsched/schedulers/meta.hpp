#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtsched/core/score_window.hpp"
#include "mtsched/core/targets.hpp"
#include "mtsched/learner/network.hpp"
#include "mtsched/learner/optimizer.hpp"
#include "mtsched/schedulers/scheduler.hpp"

namespace mts {

/// Which meta reward is optimised.
///   performance: lambda * m_j + (1 - lambda) * worst
///   gap:         lambda * m_j + (1 - lambda) * (1 - worst)
/// where worst is the mean of clip(1 - m_i, 0, 1) over the `worst_count`
/// tasks with the lowest normalized performance.
enum class MetaRewardMode { performance, gap };

const char* meta_reward_mode_name(MetaRewardMode m);
MetaRewardMode parse_meta_reward_mode(std::string_view s);

/// `lag` is m_j of the task just trained; `performance` holds 1 - m_i for all tasks.
double ea4c_reward(double lag, std::span<const double> performance, double lambda, std::size_t worst_count,
                   MetaRewardMode mode);

/// Same reward built from score windows and targets for task `j`.
double meta_reward(std::span<const ScoreWindow> windows, std::span<const double> targets, std::size_t j,
                   double lambda, std::size_t worst_count, MetaRewardMode mode);

/// Meta-learner input: [counts / sum counts | one-hot previous task | previous distribution].
struct MetaState {
  std::vector<double> values;
  std::size_t k() const noexcept { return values.size() / 3; }
};

MetaState make_meta_state(std::span<const std::int64_t> counts, std::size_t previous_task,
                          std::span<const double> previous_distribution);

/// Checks block sizes, that the count and distribution blocks are simplex points and the
/// middle block is one-hot. An all-zero count block is accepted before the first pick.
bool is_valid_meta_state(const MetaState& s, std::size_t k, double tol = 1e-9);

struct MetaConfig {
  std::vector<std::size_t> hidden{100, 100};
  bool recurrent = false;
  double gamma = 0.8;
  double entropy_beta = 0.0;
  LrSchedule lr{1e-3, 1e-4, 1};
  double rms_decay = 0.99;
  double rms_epsilon = 1e-8;
};

/// Actor-critic over tasks trained online with one-step returns.
///
/// Output layers start at zero, so the first distribution is uniform.
class MetaLearner {
 public:
  MetaLearner(std::size_t k, MetaConfig config, std::uint64_t init_seed);

  /// Consumes the reward for the previously chosen task (skipped when empty or
  /// when there is no previous meta decision), updates on the transition into
  /// `state`, then samples the next task from pi(state).
  SchedulerDecision step(const MetaState& state, std::optional<double> reward, std::int64_t learner_steps,
                         Rng& rng);

  /// Distribution the current parameters assign to `state` without side effects.
  std::vector<double> policy(const MetaState& state) const;

  const ActorCriticNet& net() const noexcept { return net_; }
  std::int64_t updates() const noexcept { return updates_; }
  const MetaConfig& config() const noexcept { return config_; }

 private:
  std::size_t k_;
  MetaConfig config_;
  ActorCriticNet net_;
  RmsProp opt_;
  bool has_pending_ = false;
  MetaState pending_state_;
  int pending_action_ = 0;
  std::vector<double> pending_hidden_;  // recurrent state fed into pending_state_
  std::vector<double> carry_;           // recurrent state after the latest forward
  std::int64_t updates_ = 0;
};

/// Single meta step: reward from the windows, update, sample.
SchedulerDecision ea4c_step(MetaLearner& meta, const MetaState& state, std::optional<double> reward,
                            std::int64_t learner_steps, Rng& rng);

/// Fine-grained target: for each episode split into x = floor(l / N) slices
/// of N steps, sum the rewards of those slices and divide by x; average over
/// episodes. Throws DomainError when an episode is shorter than N.
double fa4c_target(std::span<const EpisodeOutcome> episodes, std::size_t n);

/// Meta-learned scheduler. With `segment_steps` > 0 decisions happen every
/// that many learner steps and the targets should be fine-grained.
class MetaScheduler final : public Scheduler {
 public:
  struct Options {
    double lambda = 0.5;
    std::size_t worst_count = 0;  // 0 means min(3, k)
    MetaRewardMode mode = MetaRewardMode::performance;
    std::size_t window = 10;
    std::size_t segment_steps = 0;
    MetaConfig meta;
    std::uint64_t init_seed = 0;
  };

  MetaScheduler(TargetRegistry targets, Options options);

  std::string_view name() const override { return options_.segment_steps > 0 ? "fa4c" : "ea4c"; }
  std::size_t k() const override { return targets_.size(); }
  SchedulerDecision select_next(const DecisionContext& ctx, Rng& rng) override;
  void observe(std::size_t task, const EpisodeOutcome& outcome) override;

  const MetaLearner& meta() const noexcept { return meta_; }
  const std::vector<ScoreWindow>& windows() const noexcept { return windows_; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  const Options& options() const noexcept { return options_; }

 private:
  TargetRegistry targets_;
  Options options_;
  MetaLearner meta_;
  std::vector<ScoreWindow> windows_;
  std::vector<std::int64_t> counts_;
  std::size_t previous_task_ = 0;
  std::vector<double> previous_distribution_;
  std::optional<double> reward_;
  std::int64_t decisions_ = 0;
};

}  // namespace mts
