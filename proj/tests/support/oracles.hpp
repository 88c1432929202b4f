// Independent reference implementations used as test oracles. They follow
// the textbook definitions directly (full histories, double loops, no
// numerical tricks) rather than the library's incremental forms.
#pragma once

#include <cstdint>
#include <vector>

#include "mtsched/core/instance.hpp"
#include "mtsched/core/rng.hpp"
#include "mtsched/envs/env.hpp"
#include "mtsched/learner/network.hpp"

namespace oracle {

/// R_t = sum_{i>=t} gamma^(i-t) r_i + gamma^(T-t) bootstrap.
std::vector<double> returns(const std::vector<double>& rewards, double bootstrap, double gamma);

/// Batch loss with advantages and returns supplied as constants:
///   sum_t  -adv_t log pi(a_t|s_t) + 0.5 (R_t - V(s_t))^2 - beta H(pi(.|s_t)).
double batch_loss(const mts::ActorCriticNet& net, const mts::TransitionBatch& b, double beta,
                  const std::vector<double>& adv, const std::vector<double>& ret);

/// ||g - fd|| / max(||g||, ||fd||) with fd from central differences of batch_loss.
double gradient_rel_error(const mts::ActorCriticNet& net, const mts::TransitionBatch& b, double gamma,
                          double beta, double h = 1e-6);

/// Random network and batch for gradient checks.
struct GradCase {
  mts::ActorCriticNet net;
  mts::TransitionBatch batch;
};
GradCase random_case(mts::Rng& rng, bool heads, bool recurrent);

struct Pull {
  std::size_t task;
  double score;
};

/// Discounted UCB statistics recomputed from the whole history:
/// X_i = sum_s gamma^(t-s) r_s [j_s = i],  n_i = sum_s gamma^(t-s) [j_s = i].
struct Ducb {
  std::vector<double> X, n, mean, bonus;
};
Ducb ducb_from_history(std::size_t k, const std::vector<Pull>& history, const std::vector<double>& targets_at_pull,
                       double gamma);

/// Per-pull targets under doubling: a task's target doubles each time a
/// score reaches it; the returned vector holds the target used for each pull.
std::vector<double> doubling_targets(std::size_t k, const std::vector<Pull>& history);

/// p_i = 1 / sum_c exp((m_c - m_i) / tau).
std::vector<double> softmax(const std::vector<double>& m, double tau);

/// Fine-grained target by explicit episode/slice/step loops.
double fine_target(const std::vector<std::vector<double>>& episode_rewards, std::size_t n);

/// Two deterministic bandits (best arm 1 in task "a", arm 0 in task "b") and
/// a one-layer, two-unit network built by hand. Unit 0 reads both task
/// signatures and suppresses the no-op actions in both tasks; unit 1 reads
/// only task a's signature and switches the preferred arm there.
struct ProbeNet {
  mts::MultiTaskInstance inst;
  mts::ActorCriticNet net;
  std::size_t shared_unit = 0;
  std::size_t specific_unit = 1;
};
ProbeNet shared_and_specific_probe();

}  // namespace oracle
