#include "mtsched/schedulers/adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "mtsched/core/errors.hpp"
#include "mtsched/schedulers/uniform.hpp"

namespace mts {

std::vector<double> a5c_distribution(std::span<const double> averages, std::span<const double> targets,
                                     double tau) {
  if (!(tau > 0.0)) throw DomainError("a5c_distribution: tau must be positive");
  if (averages.size() != targets.size() || averages.empty())
    throw DomainError("a5c_distribution: size mismatch");
  std::vector<double> z(averages.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = normalized_lag(averages[i], targets[i]) / tau;
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

AdaptiveScheduler::AdaptiveScheduler(TargetRegistry targets, double tau, std::size_t window,
                                     std::int64_t warmup_steps, bool fill_windows)
    : targets_(std::move(targets)),
      tau_(tau),
      windows_(targets_.size(), ScoreWindow(window)),
      warmup_steps_(warmup_steps),
      fill_windows_(fill_windows) {
  if (targets_.size() < 2) throw DomainError("a5c: need at least 2 tasks");
  if (!(tau > 0.0)) throw DomainError("a5c: tau must be positive");
}

bool AdaptiveScheduler::in_warmup(const DecisionContext& ctx) const {
  if (ctx.learner_steps < warmup_steps_) return true;
  if (fill_windows_)
    return std::any_of(windows_.begin(), windows_.end(), [](const ScoreWindow& w) { return !w.full(); });
  return false;
}

SchedulerDecision AdaptiveScheduler::select_next(const DecisionContext& ctx, Rng& rng) {
  std::vector<double> avg(k());
  for (std::size_t i = 0; i < k(); ++i) avg[i] = window_average_or_zero(windows_[i]);
  SchedulerDecision d;
  if (in_warmup(ctx)) {
    d.distribution.assign(k(), 1.0 / static_cast<double>(k()));
    d.diagnostics["warmup"] = {1.0};
  } else {
    d.distribution = a5c_distribution(avg, targets_.values(), tau_);
    d.diagnostics["warmup"] = {0.0};
  }
  std::vector<double> lag(k());
  for (std::size_t i = 0; i < k(); ++i) lag[i] = normalized_lag(avg[i], targets_[i]);
  d.diagnostics["a"] = avg;
  d.diagnostics["m"] = std::move(lag);
  return finish(std::move(d), rng);
}

void AdaptiveScheduler::observe(std::size_t task, const EpisodeOutcome& outcome) {
  windows_.at(task).push(outcome.score);
}

}  // namespace mts
