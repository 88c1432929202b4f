#include "mtsched/schedulers/ucb.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "mtsched/core/errors.hpp"

namespace mts {

DucbStats::DucbStats(std::size_t k, double g, double b)
    : X(k, 0.0), n(k, 0.0), mean(k, 0.0), bonus(k, 0.0), gamma(g), beta(b) {
  if (k < 2) throw DomainError("ducb: need at least 2 tasks");
  if (!(g > 0.0 && g <= 1.0)) throw DomainError("ducb: gamma must lie in (0, 1]");
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("ducb: beta must be finite and >= 0");
}

DucbStats ducb_observe(DucbStats s, std::size_t task, double score, double target) {
  if (!(target > 0.0)) throw DomainError("ducb_observe: target must be positive");
  if (task >= s.k()) throw DomainError("ducb_observe: task out of range");
  if (!std::isfinite(score)) throw DomainError("ducb_observe: non-finite score");
  for (std::size_t i = 0; i < s.k(); ++i) {
    s.X[i] *= s.gamma;
    s.n[i] *= s.gamma;
  }
  s.X[task] += std::max((target - score) / target, 0.0);
  s.n[task] += 1.0;
  double total = 0.0;
  for (double v : s.n) total += v;
  const double log_total = std::log(total);
  for (std::size_t i = 0; i < s.k(); ++i) {
    if (s.n[i] > 0.0) {
      s.mean[i] = s.X[i] / s.n[i];
      const double var = std::max(s.mean[i] * (1.0 - s.mean[i]), kDucbVarianceFloor);
      s.bonus[i] = std::sqrt(var * log_total / s.n[i]);
    } else {
      s.mean[i] = 0.0;
      s.bonus[i] = 0.0;
    }
  }
  return s;
}

SchedulerDecision ducb_select(const DucbStats& s) {
  if (s.k() == 0) throw DomainError("ducb_select: empty statistics");
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < s.k(); ++i) {
    if (!(s.n[i] > 0.0)) throw DomainError("ducb_select: task " + std::to_string(i) + " has never been pulled");
    const double v = s.mean[i] + s.beta * s.bonus[i];
    if (i == 0 || v > best_value) {
      best = i;
      best_value = v;
    }
  }
  SchedulerDecision d;
  d.task = best;
  d.distribution.assign(s.k(), 0.0);
  d.distribution[best] = 1.0;
  return d;
}

DoublingUpdate ducb_doubling_observe(DucbStats stats, TargetRegistry registry, std::size_t task, double score) {
  if (registry.mode() != TargetMode::doubling)
    throw DomainError("ducb_doubling_observe: registry is not in doubling mode");
  registry.observe_score(task, score);
  stats = ducb_observe(std::move(stats), task, score, registry[task]);
  return {std::move(registry), std::move(stats)};
}

UcbScheduler::UcbScheduler(TargetRegistry targets, double gamma, double beta)
    : targets_(std::move(targets)), stats_(targets_.size(), gamma, beta) {}

std::string_view UcbScheduler::name() const {
  return targets_.mode() == TargetMode::doubling ? "dua4c" : "ua4c";
}

SchedulerDecision UcbScheduler::select_next(const DecisionContext&, Rng& rng) {
  SchedulerDecision d;
  // Round robin over tasks without an observed outcome. With parallel workers
  // a task can be handed out before its first outcome arrives.
  std::optional<std::size_t> unpulled;
  for (std::size_t o = 0; o < k() && !unpulled; ++o) {
    const std::size_t i = (initial_pulls_ + o) % k();
    if (stats_.n[i] == 0.0) unpulled = i;
  }
  if (unpulled) {
    d.distribution.assign(k(), 0.0);
    d.distribution[*unpulled] = 1.0;
    initial_pulls_ = *unpulled + 1;
    d.diagnostics["init"] = {1.0};
  } else {
    d = ducb_select(stats_);
    d.diagnostics["init"] = {0.0};
  }
  d.diagnostics["mean"] = stats_.mean;
  d.diagnostics["bonus"] = stats_.bonus;
  d.diagnostics["n"] = stats_.n;
  std::vector<double> ta(targets_.values().begin(), targets_.values().end());
  d.diagnostics["ta"] = std::move(ta);
  return finish(std::move(d), rng);
}

void UcbScheduler::observe(std::size_t task, const EpisodeOutcome& outcome) {
  if (targets_.mode() == TargetMode::doubling) {
    auto up = ducb_doubling_observe(std::move(stats_), std::move(targets_), task, outcome.score);
    targets_ = std::move(up.registry);
    stats_ = std::move(up.stats);
  } else {
    stats_ = ducb_observe(std::move(stats_), task, outcome.score, targets_[task]);
  }
}

}  // namespace mts
