#include "mtsched/learner/worker.hpp"

#include "mtsched/core/errors.hpp"

namespace mts {

ActResult act(const ActorCriticNet& net, std::span<const double> obs, std::size_t task, Rng& rng,
              std::span<const double> prev_hidden) {
  StepOutput out = net.forward(obs, task, prev_hidden);
  ActResult r;
  r.action = static_cast<int>(rng.categorical(out.policy));
  r.policy = std::move(out.policy);
  r.value = out.value;
  r.hidden = std::move(out.hidden);
  return r;
}

Worker::Worker(ParameterStore& store, const MultiTaskInstance& instance, LearnerParams params,
               std::uint64_t seed, std::size_t worker_index)
    : store_(store), instance_(instance), params_(params), local_(store.snapshot()) {
  if (params_.n_step == 0) throw ValidationError("learner.n_step", "must be positive");
  if (local_.shape().input_dim != instance.obs_dim())
    throw ValidationError("learner", "network input does not match the instance observation size");
  const std::size_t k = instance.k();
  cursors_.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto& c = cursors_[i];
    c.env = make_env(instance.tasks[i], instance.union_action_count, instance.episode_cap);
    c.env_rng = Rng(derive_seed(seed, "env", worker_index * k + i));
    c.act_rng = Rng(derive_seed(seed, "act", worker_index * k + i));
  }
}

void Worker::run_segment(std::size_t task, std::size_t max_steps, EpisodeOutcome& outcome) {
  TaskCursor& c = cursors_[task];
  store_.read_into(local_);
  const bool recurrent = local_.shape().recurrent;

  TransitionBatch batch;
  batch.head = task;
  batch.initial_hidden = c.hidden;
  for (std::size_t s = 0; s < max_steps && c.in_episode; ++s) {
    ActResult a = act(local_, c.obs, task, c.act_rng, c.hidden);
    StepResult r = c.env->step(a.action, c.env_rng);
    store_.advance_steps(1);
    batch.observations.push_back(std::move(c.obs));
    batch.actions.push_back(a.action);
    batch.rewards.push_back(r.reward);
    batch.values.push_back(a.value);
    outcome.rewards.push_back(r.reward);
    outcome.score += r.reward;
    ++outcome.length;
    c.obs = std::move(r.obs);
    if (recurrent) c.hidden = std::move(a.hidden);
    if (r.done) c.in_episode = false;
  }
  if (batch.size() == 0) return;
  batch.terminal = !c.in_episode;
  batch.bootstrap = batch.terminal ? 0.0 : local_.forward(c.obs, task, c.hidden).value;
  if (observer_) observer_(batch);
  if (params_.updates_enabled) {
    BatchGradient g = local_.gradients(batch, params_.gamma, params_.entropy_beta);
    store_.apply(g.grad);
  }
}

EpisodeOutcome Worker::train_for_one_episode(std::size_t task) {
  if (task >= cursors_.size()) throw DomainError("train_for_one_episode: unknown task");
  TaskCursor& c = cursors_[task];
  c.obs = c.env->reset(c.env_rng);
  c.hidden.assign(local_.shape().recurrent ? local_.hidden_width() : 0, 0.0);
  c.in_episode = true;
  EpisodeOutcome out;
  while (c.in_episode) run_segment(task, params_.n_step, out);
  out.terminal = true;
  return out;
}

EpisodeOutcome Worker::train_for_n_steps(std::size_t task, std::size_t n) {
  if (task >= cursors_.size()) throw DomainError("train_for_n_steps: unknown task");
  if (n == 0) throw DomainError("train_for_n_steps: n must be positive");
  TaskCursor& c = cursors_[task];
  if (!c.in_episode) {
    c.obs = c.env->reset(c.env_rng);
    c.hidden.assign(local_.shape().recurrent ? local_.hidden_width() : 0, 0.0);
    c.in_episode = true;
  }
  EpisodeOutcome out;
  run_segment(task, n, out);
  out.terminal = !c.in_episode;
  return out;
}

}  // namespace mts
