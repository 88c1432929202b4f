#include "mtsched/schedulers/meta.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtsched/core/errors.hpp"
#include "mtsched/schedulers/uniform.hpp"

namespace mts {

const char* meta_reward_mode_name(MetaRewardMode m) { return m == MetaRewardMode::performance ? "performance" : "gap"; }

MetaRewardMode parse_meta_reward_mode(std::string_view s) {
  if (s == "performance") return MetaRewardMode::performance;
  if (s == "gap") return MetaRewardMode::gap;
  throw DomainError("unknown meta reward mode '" + std::string(s) + "' (expected performance or gap)");
}

double ea4c_reward(double lag, std::span<const double> performance, double lambda, std::size_t worst_count,
                   MetaRewardMode mode) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("ea4c_reward: lambda must lie in [0, 1]");
  if (worst_count == 0 || worst_count > performance.size())
    throw DomainError("ea4c_reward: worst_count must lie in [1, k]");
  if (!std::isfinite(lag)) throw DomainError("ea4c_reward: non-finite lag");
  std::vector<std::size_t> order(performance.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return performance[a] < performance[b]; });
  double worst = 0.0;
  for (std::size_t i = 0; i < worst_count; ++i) worst += std::clamp(performance[order[i]], 0.0, 1.0);
  worst /= static_cast<double>(worst_count);
  const double second = mode == MetaRewardMode::performance ? worst : 1.0 - worst;
  return lambda * lag + (1.0 - lambda) * second;
}

double meta_reward(std::span<const ScoreWindow> windows, std::span<const double> targets, std::size_t j,
                   double lambda, std::size_t worst_count, MetaRewardMode mode) {
  if (windows.size() != targets.size() || j >= windows.size()) throw DomainError("meta_reward: size mismatch");
  std::vector<double> perf(windows.size());
  for (std::size_t i = 0; i < perf.size(); ++i)
    perf[i] = 1.0 - normalized_lag(window_average_or_zero(windows[i]), targets[i]);
  return ea4c_reward(1.0 - perf[j], perf, lambda, worst_count, mode);
}

MetaState make_meta_state(std::span<const std::int64_t> counts, std::size_t previous_task,
                          std::span<const double> previous_distribution) {
  const std::size_t k = counts.size();
  if (previous_distribution.size() != k || previous_task >= k) throw DomainError("make_meta_state: size mismatch");
  MetaState s;
  s.values.assign(3 * k, 0.0);
  double total = 0.0;
  for (auto c : counts) {
    if (c < 0) throw DomainError("make_meta_state: negative count");
    total += static_cast<double>(c);
  }
  for (std::size_t i = 0; i < k; ++i) {
    s.values[i] = total > 0.0 ? static_cast<double>(counts[i]) / total : 0.0;
    s.values[2 * k + i] = previous_distribution[i];
  }
  s.values[k + previous_task] = 1.0;
  return s;
}

bool is_valid_meta_state(const MetaState& s, std::size_t k, double tol) {
  if (s.values.size() != 3 * k || k == 0) return false;
  double counts = 0.0, dist = 0.0, ones = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double c = s.values[i], h = s.values[k + i], p = s.values[2 * k + i];
    if (!(c >= 0.0) || !(p >= 0.0)) return false;
    if (h != 0.0 && h != 1.0) return false;
    counts += c;
    ones += h;
    dist += p;
  }
  const bool counts_ok = counts == 0.0 || std::abs(counts - 1.0) <= tol;
  return counts_ok && ones == 1.0 && std::abs(dist - 1.0) <= tol;
}

MetaLearner::MetaLearner(std::size_t k, MetaConfig config, std::uint64_t init_seed)
    : k_(k), config_(std::move(config)) {
  if (k < 2) throw DomainError("meta learner: need at least 2 tasks");
  if (config_.hidden.empty()) throw DomainError("meta learner: need at least one hidden layer");
  NetShape shape;
  shape.input_dim = 3 * k;
  shape.hidden = config_.hidden;
  shape.actions = k;
  shape.recurrent = config_.recurrent;
  net_ = ActorCriticNet(shape);
  Rng rng(init_seed);
  net_.initialize(rng);
  opt_ = RmsProp(net_.param_count(), config_.rms_decay, config_.rms_epsilon);
}

std::vector<double> MetaLearner::policy(const MetaState& state) const {
  return net_.forward(state.values, 0, carry_).policy;
}

SchedulerDecision MetaLearner::step(const MetaState& state, std::optional<double> reward,
                                    std::int64_t learner_steps, Rng& rng) {
  if (!is_valid_meta_state(state, k_)) throw DomainError("meta learner: invalid meta state");
  if (reward && !std::isfinite(*reward)) throw DomainError("meta learner: non-finite reward");
  SchedulerDecision d;
  if (has_pending_ && reward) {
    const double bootstrap = net_.forward(state.values, 0, carry_).value;
    TransitionBatch batch;
    batch.observations = {pending_state_.values};
    batch.actions = {pending_action_};
    batch.rewards = {*reward};
    batch.bootstrap = bootstrap;
    batch.terminal = false;
    batch.initial_hidden = pending_hidden_;
    const BatchGradient g = net_.gradients(batch, config_.gamma, config_.entropy_beta);
    opt_.apply(net_.params(), g.grad, config_.lr.at(learner_steps));
    ++updates_;
    d.diagnostics["advantage"] = g.advantages;
  }
  StepOutput out = net_.forward(state.values, 0, carry_);
  d.distribution = std::move(out.policy);
  d.draw = rng.uniform();
  d.task = Rng::pick(d.distribution, d.draw);
  d.diagnostics["value"] = {out.value};
  if (reward) d.diagnostics["reward"] = {*reward};

  has_pending_ = true;
  pending_state_ = state;
  pending_action_ = static_cast<int>(d.task);
  pending_hidden_ = carry_;
  if (config_.recurrent) carry_ = std::move(out.hidden);
  return d;
}

SchedulerDecision ea4c_step(MetaLearner& meta, const MetaState& state, std::optional<double> reward,
                            std::int64_t learner_steps, Rng& rng) {
  return meta.step(state, reward, learner_steps, rng);
}

double fa4c_target(std::span<const EpisodeOutcome> episodes, std::size_t n) {
  if (n == 0) throw DomainError("fa4c_target: N must be >= 1");
  if (episodes.empty()) throw DomainError("fa4c_target: no episodes");
  double outer = 0.0;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& r = episodes[e].rewards;
    const std::size_t x = r.size() / n;
    if (x == 0)
      throw DomainError("fa4c_target: episode " + std::to_string(e) + " has " + std::to_string(r.size()) +
                        " steps, fewer than N=" + std::to_string(n));
    double sum = 0.0;
    for (std::size_t t = 0; t < x * n; ++t) sum += r[t];
    outer += sum / static_cast<double>(x);
  }
  return outer / static_cast<double>(episodes.size());
}

MetaScheduler::MetaScheduler(TargetRegistry targets, Options options)
    : targets_(std::move(targets)),
      options_(std::move(options)),
      meta_(targets_.size(), options_.meta, options_.init_seed),
      windows_(targets_.size(), ScoreWindow(options_.window)),
      counts_(targets_.size(), 0) {
  const std::size_t k = targets_.size();
  if (options_.worst_count == 0) options_.worst_count = std::min<std::size_t>(3, k);
  if (options_.worst_count > k) throw DomainError("meta scheduler: worst_count exceeds k");
  if (!(options_.lambda >= 0.0 && options_.lambda <= 1.0))
    throw DomainError("meta scheduler: lambda must lie in [0, 1]");
}

SchedulerDecision MetaScheduler::select_next(const DecisionContext& ctx, Rng& rng) {
  SchedulerDecision d;
  if (decisions_ == 0) {
    d = uniform_select(k(), rng);
  } else {
    const MetaState state = make_meta_state(counts_, previous_task_, previous_distribution_);
    d = ea4c_step(meta_, state, reward_, ctx.learner_steps, rng);
  }
  reward_.reset();
  ++decisions_;
  ++counts_[d.task];
  previous_task_ = d.task;
  previous_distribution_ = d.distribution;
  last_distribution_ = d.distribution;
  return d;
}

void MetaScheduler::observe(std::size_t task, const EpisodeOutcome& outcome) {
  windows_.at(task).push(outcome.score);
  reward_ = meta_reward(windows_, targets_.values(), task, options_.lambda, options_.worst_count, options_.mode);
}

}  // namespace mts
