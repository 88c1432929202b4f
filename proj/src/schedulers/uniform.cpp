#include "mtsched/schedulers/uniform.hpp"

#include "mtsched/core/errors.hpp"

namespace mts {

SchedulerDecision uniform_select(std::size_t k, Rng& rng) {
  if (k < 2) throw DomainError("uniform_select: need at least 2 tasks");
  SchedulerDecision d;
  d.distribution.assign(k, 1.0 / static_cast<double>(k));
  d.draw = rng.uniform();
  d.task = Rng::pick(d.distribution, d.draw);
  return d;
}

UniformScheduler::UniformScheduler(std::size_t k) : k_(k) {
  if (k < 2) throw DomainError("uniform scheduler: need at least 2 tasks");
}

SchedulerDecision UniformScheduler::select_next(const DecisionContext&, Rng& rng) {
  SchedulerDecision d = uniform_select(k_, rng);
  last_distribution_ = d.distribution;
  return d;
}

}  // namespace mts
