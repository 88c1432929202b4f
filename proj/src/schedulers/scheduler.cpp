#include "mtsched/schedulers/scheduler.hpp"

#include <cmath>

namespace mts {

SchedulerDecision Scheduler::finish(SchedulerDecision d, Rng& rng) {
  d.draw = rng.uniform();
  d.task = Rng::pick(d.distribution, d.draw);
  last_distribution_ = d.distribution;
  return d;
}

bool is_distribution(const std::vector<double>& p, double tol) {
  if (p.empty()) return false;
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace mts
