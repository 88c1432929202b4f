#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "mtsched/core/targets.hpp"
#include "mtsched/schedulers/adaptive.hpp"
#include "mtsched/schedulers/meta.hpp"
#include "mtsched/schedulers/scheduler.hpp"
#include "mtsched/schedulers/ucb.hpp"
#include "mtsched/schedulers/uniform.hpp"

namespace mts {

enum class SchedulerKind { ba3c, a5c, ua4c, dua4c, ea4c, fa4c };

const char* scheduler_kind_name(SchedulerKind k);
SchedulerKind parse_scheduler_kind(std::string_view s);

struct SchedulerSettings {
  SchedulerKind kind = SchedulerKind::ba3c;
  double tau = 0.05;
  std::size_t window = 10;
  std::int64_t warmup_steps = 0;
  bool fill_windows = true;
  double ucb_gamma = 0.99;
  double ucb_beta = 0.25;
  double lambda = 0.5;
  std::size_t worst_count = 0;
  MetaRewardMode reward_mode = MetaRewardMode::performance;
  MetaConfig meta;
  /// Decision cadence of the fine-grained meta scheduler.
  std::size_t segment_steps = 20;
};

/// Builds the scheduler. `targets` are the episode targets, or the
/// fine-grained targets for fa4c; dua4c ignores them and starts every target at 1.
std::unique_ptr<Scheduler> make_scheduler(const SchedulerSettings& s, const TargetRegistry& targets,
                                          std::uint64_t meta_seed);

}  // namespace mts
