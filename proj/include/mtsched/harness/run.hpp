#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtsched/harness/config.hpp"
#include "mtsched/learner/optimizer.hpp"
#include "mtsched/metrics/metrics.hpp"
#include "mtsched/schedulers/scheduler.hpp"

namespace mts {

struct TrainHooks {
  /// One JSON object per task decision, in decision order.
  std::function<void(const nlohmann::json&)> on_decision;
  std::function<void(const EvalReport&)> on_eval;
  std::function<void(const ParameterStore&)> on_checkpoint;
};

struct TrainResult {
  EvalReport final_report;
  std::int64_t learner_steps = 0;
  std::int64_t decisions = 0;
  /// Learner steps spent on each task.
  std::vector<std::int64_t> task_steps;
  std::vector<std::int64_t> task_decisions;
  /// Targets the scheduler was built with (fine-grained for fa4c).
  std::vector<double> scheduler_targets;
  ActorCriticNet net;
  std::unique_ptr<Scheduler> scheduler;
};

/// Per-task fine-grained targets for decisions every `n` steps, from
/// optimal-policy rollouts. Tasks whose optimal episodes are shorter than `n`
/// fall back to the mean optimal episode score.
std::vector<double> fine_targets(const MultiTaskInstance& inst, std::size_t n, std::size_t episodes,
                                 std::uint64_t seed);

/// The training loop: pick a task, train on it (one episode, or `segment_steps`
/// steps for fa4c), report the outcome, evaluate on schedule, stop once the
/// step budget is spent, then run a final evaluation.
TrainResult train(const RunConfig& config, const MultiTaskInstance& inst, const TrainHooks& hooks = {});

/// Runs `config` and writes the run directory `dir`:
///   manifest.json, config.ini, instance.json, decisions.jsonl, metrics.csv, checkpoints/.
/// The manifest is written before training (status "running") and rewritten
/// at the end ("completed" or "failed"). Refuses a directory that already
/// holds a manifest unless `overwrite` is set.
TrainResult run_experiment(const RunConfig& config, const std::filesystem::path& dir, bool overwrite = false);

struct RunRow {
  std::filesystem::path dir;
  std::string status;
  std::string scheduler;
  std::string instance;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::int64_t step = 0;
  std::optional<Metrics> metrics;
};

struct GroupRow {
  std::string scheduler;
  std::size_t runs = 0;
  Metrics mean;
  /// Sample standard deviation (0 for a single run).
  Metrics stddev;
};

struct Comparison {
  std::vector<RunRow> runs;
  std::vector<GroupRow> groups;
  std::vector<RunRow> incomplete;
};

/// Final metrics of completed runs grouped by scheduler (first-seen order).
/// Throws DomainError when completed runs used different instances or when
/// none completed.
Comparison compare_runs(const std::vector<std::filesystem::path>& dirs);
std::string comparison_csv(const Comparison& c);
std::string comparison_text(const Comparison& c);

/// Version string recorded in manifests.
const char* code_version();

}  // namespace mts
