#include "mtsched/schedulers/factory.hpp"

#include <string>

#include "mtsched/core/errors.hpp"

namespace mts {

const char* scheduler_kind_name(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::ba3c: return "ba3c";
    case SchedulerKind::a5c: return "a5c";
    case SchedulerKind::ua4c: return "ua4c";
    case SchedulerKind::dua4c: return "dua4c";
    case SchedulerKind::ea4c: return "ea4c";
    case SchedulerKind::fa4c: return "fa4c";
  }
  return "?";
}

SchedulerKind parse_scheduler_kind(std::string_view s) {
  for (auto k : {SchedulerKind::ba3c, SchedulerKind::a5c, SchedulerKind::ua4c, SchedulerKind::dua4c,
                 SchedulerKind::ea4c, SchedulerKind::fa4c}) {
    if (s == scheduler_kind_name(k)) return k;
  }
  throw DomainError("unknown scheduler '" + std::string(s) + "' (expected ba3c, a5c, ua4c, dua4c, ea4c or fa4c)");
}

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSettings& s, const TargetRegistry& targets,
                                          std::uint64_t meta_seed) {
  switch (s.kind) {
    case SchedulerKind::ba3c:
      return std::make_unique<UniformScheduler>(targets.size());
    case SchedulerKind::a5c:
      return std::make_unique<AdaptiveScheduler>(targets, s.tau, s.window, s.warmup_steps, s.fill_windows);
    case SchedulerKind::ua4c:
      return std::make_unique<UcbScheduler>(targets, s.ucb_gamma, s.ucb_beta);
    case SchedulerKind::dua4c:
      return std::make_unique<UcbScheduler>(TargetRegistry::doubling(targets.size()), s.ucb_gamma, s.ucb_beta);
    case SchedulerKind::ea4c:
    case SchedulerKind::fa4c: {
      MetaScheduler::Options o;
      o.lambda = s.lambda;
      o.worst_count = s.worst_count;
      o.mode = s.reward_mode;
      o.window = s.window;
      o.segment_steps = s.kind == SchedulerKind::fa4c ? s.segment_steps : 0;
      o.meta = s.meta;
      o.init_seed = meta_seed;
      return std::make_unique<MetaScheduler>(targets, o);
    }
  }
  throw DomainError("unknown scheduler kind");
}

}  // namespace mts
