#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtsched/core/instance.hpp"
#include "mtsched/core/rng.hpp"
#include "mtsched/envs/env.hpp"
#include "mtsched/learner/network.hpp"

namespace mts {

struct Metrics {
  double p_am = 0.0;
  double q_am = 0.0;
  double q_gm = 0.0;
  double q_hm = 0.0;
};

/// Multi-tasking performance of per-task scores `a` against targets `ta`:
///   p_am  mean of a_i / ta_i
///   q_am  mean of min(a_i / ta_i, 1)
///   q_gm  geometric mean of the clipped ratios
///   q_hm  k / sum max(ta_i / a_i, 1)
/// q_gm and q_hm are 0 as soon as one a_i is 0.
Metrics compute_metrics(std::span<const double> a, std::span<const double> ta);

struct EvalReport {
  std::int64_t step = 0;
  /// Mean evaluation score per task (may be negative for step-cost tasks).
  std::vector<double> raw;
  /// max(raw_i, 0) / ta_i.
  std::vector<double> ratios;
  Metrics metrics;
};

/// Chooses an action for `task` given the live environment and observation.
using PolicyFn = std::function<int(std::size_t task, const Env& env, const Observation& obs, Rng& rng)>;

/// Called once per evaluated step with the hidden activations that produced the action.
using HiddenObserver = std::function<void(std::size_t task, std::span<const double> hidden)>;

struct EvalSpec {
  std::size_t episodes = 5;
  int cap = 200;
  std::uint64_t seed = 0;
  /// Forces one unit of the last hidden layer to 0.
  std::optional<std::size_t> clamp_unit;
};

/// Runs `spec.episodes` episodes per task acting from the policy of `net`
/// with no learning. Episode e of task i uses streams derived from
/// (spec.seed, i, e) so results do not depend on evaluation order.
EvalReport evaluate(const ActorCriticNet& net, const MultiTaskInstance& inst, const EvalSpec& spec,
                    const HiddenObserver& observer = {});

/// Same protocol with an arbitrary policy in place of the network.
EvalReport evaluate_policy(const PolicyFn& policy, const MultiTaskInstance& inst, const EvalSpec& spec);

/// Policy that always plays Env::optimal_action.
PolicyFn oracle_policy();

/// Report from per-task mean scores; negative means count as 0 in the ratios.
EvalReport make_report(std::vector<double> raw, std::span<const double> targets, std::int64_t step = 0);

/// metrics.csv: step, raw_<task>..., norm_<task>..., p_am, q_am, q_gm, q_hm.
std::string metrics_csv_header(const MultiTaskInstance& inst);
std::string metrics_csv_row(const EvalReport& r);

}  // namespace mts
