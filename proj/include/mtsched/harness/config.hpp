#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mtsched/core/instance.hpp"
#include "mtsched/core/targets.hpp"
#include "mtsched/learner/network.hpp"
#include "mtsched/learner/optimizer.hpp"
#include "mtsched/learner/worker.hpp"
#include "mtsched/metrics/metrics.hpp"
#include "mtsched/schedulers/factory.hpp"

namespace mts {

/// Everything a run needs. Keys in the INI form are `name` at top level and
/// `section.name` elsewhere; see the README for the full table.
struct RunConfig {
  std::uint64_t seed = 1;
  std::int64_t total_steps = 20000;
  std::int64_t warmup_steps = 0;

  struct Instance {
    std::string preset = "SYN-6";
    std::string file;
    std::size_t d_sig = 8;
    /// Seeds the preset task signatures; kept apart from the run seed so that
    /// runs with different seeds share one instance.
    std::uint64_t signature_seed = 0;
    TargetMode target_mode = TargetMode::fixed;
    double target_multiplier = 1.0;
    std::map<std::string, double> targets;
    friend bool operator==(const Instance&, const Instance&) = default;
  } instance;

  struct Scheduler {
    SchedulerKind kind = SchedulerKind::ba3c;
    double tau = 0.05;
    std::size_t window = 10;
    bool fill_windows = true;
    double ucb_gamma = 0.99;
    double ucb_beta = 0.25;
    double lambda = 0.5;
    std::size_t worst_count = 0;
    MetaRewardMode reward_mode = MetaRewardMode::performance;
    std::vector<std::size_t> meta_hidden{100, 100};
    bool meta_recurrent = false;
    double meta_gamma = 0.8;
    double meta_entropy_beta = 0.0;
    double meta_lr_initial = 1e-3;
    double meta_lr_final = 1e-4;
    std::size_t segment_steps = 20;
    std::size_t fine_target_episodes = 10;
    friend bool operator==(const Scheduler&, const Scheduler&) = default;
  } scheduler;

  struct Learner {
    std::vector<std::size_t> hidden{32};
    bool recurrent = false;
    bool heads = false;
    double gamma = 0.99;
    std::size_t n_step = 20;
    double entropy_beta = 0.02;
    double lr_initial = 1e-3;
    double lr_final = 1e-4;
    double rms_decay = 0.99;
    double rms_epsilon = 1e-8;
    std::size_t workers = 1;
    friend bool operator==(const Learner&, const Learner&) = default;
  } learner;

  struct Eval {
    std::int64_t interval = 2000;
    std::size_t episodes = 5;
    int cap = 200;
    std::int64_t checkpoint_interval = 0;
    friend bool operator==(const Eval&, const Eval&) = default;
  } eval;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses INI text. Unknown keys and malformed values raise ConfigError with
/// the key and line; the result is validated (ValidationError).
/// `overrides` are `key=value` pairs applied on top of the text.
RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {});
RunConfig parse_config_string(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
/// Defaults plus overrides only.
RunConfig config_from_overrides(const std::vector<std::string>& overrides);

/// Canonical INI text with every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

/// Throws ValidationError naming the first offending field.
void validate_config(const RunConfig& c);

/// All accepted keys in canonical order.
const std::vector<std::string>& config_keys();

/// Instance described by the config: preset or file, target overrides, multiplier.
MultiTaskInstance build_instance(const RunConfig& c);

SchedulerSettings scheduler_settings(const RunConfig& c);
LearnerParams learner_params(const RunConfig& c);
NetShape learner_shape(const RunConfig& c, const MultiTaskInstance& inst);
LrSchedule learner_schedule(const RunConfig& c);
EvalSpec eval_spec(const RunConfig& c);

}  // namespace mts
