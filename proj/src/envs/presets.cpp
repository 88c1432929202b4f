#include "mtsched/envs/presets.hpp"

#include "mtsched/core/errors.hpp"
#include "mtsched/core/rng.hpp"
#include "mtsched/envs/env.hpp"

namespace mts {

namespace {

TaskDescriptor chain(std::string name, int length, double slip) {
  return {std::move(name), ChainParams{length, slip}, {}};
}

TaskDescriptor bandit(std::string name, std::vector<double> payoffs, int horizon) {
  return {std::move(name), BanditParams{std::move(payoffs), horizon}, {}};
}

TaskDescriptor grid(std::string name, int w, int h, double slip, double goal_reward) {
  return {std::move(name), GridParams{w, h, w - 1, h - 1, slip, 1.0, goal_reward}, {}};
}

MultiTaskInstance finish(std::string name, std::vector<TaskDescriptor> tasks, std::uint64_t seed,
                         std::size_t d_sig) {
  MultiTaskInstance inst;
  inst.name = std::move(name);
  inst.tasks = std::move(tasks);
  inst.union_action_count = 4;
  inst.episode_cap = 200;
  assign_signatures(inst, seed, d_sig);
  std::vector<double> targets;
  for (const auto& t : inst.tasks) targets.push_back(oracle_target(t));
  inst.targets = TargetRegistry(std::move(targets));
  validate(inst);
  return inst;
}

}  // namespace

std::vector<std::string> preset_names() { return {"SYN-6", "SYN-6-imbalanced", "SYN-12"}; }

void assign_signatures(MultiTaskInstance& inst, std::uint64_t seed, std::size_t d_sig) {
  for (std::size_t i = 0; i < inst.k(); ++i) {
    auto& t = inst.tasks[i];
    if (!t.signature.empty()) continue;
    Rng rng(derive_seed(seed, "signature:" + t.name, i));
    t.signature.resize(d_sig);
    for (double& v : t.signature) v = rng.normal();
  }
}

MultiTaskInstance make_preset(std::string_view name, std::uint64_t seed, std::size_t d_sig) {
  if (name == "SYN-6") {
    return finish("SYN-6",
                  {bandit("bandit_a", {0.2, 0.8}, 20), bandit("bandit_b", {0.7, 0.1, 0.3}, 20),
                   chain("chain_short", 4, 0.02), chain("chain_long", 8, 0.01),
                   grid("grid_small", 3, 3, 0.05, 10.0), grid("grid_mid", 5, 5, 0.05, 20.0)},
                  seed, d_sig);
  }
  if (name == "SYN-6-imbalanced") {
    // Two long, easy bandits soak up most steps under per-episode uniform
    // sampling; the short bandits have conflicting best arms.
    return finish("SYN-6-imbalanced",
                  {bandit("long_a", {0.9, 0.1}, 150), bandit("long_b", {0.9, 0.2, 0.1}, 150),
                   bandit("short_a", {0.1, 0.1, 0.1, 0.6}, 10), bandit("short_b", {0.1, 0.1, 0.6, 0.1}, 10),
                   bandit("short_c", {0.1, 0.6, 0.1, 0.1}, 10), chain("chain_slip", 8, 0.05)},
                  seed, d_sig);
  }
  if (name == "SYN-12") {
    return finish("SYN-12",
                  {bandit("bandit_a", {0.2, 0.8}, 20), bandit("bandit_b", {0.7, 0.1, 0.3}, 20),
                   bandit("bandit_c", {0.1, 0.2, 0.9, 0.3}, 20), bandit("bandit_d", {0.6, 0.4}, 30),
                   chain("chain_3", 3, 0.0), chain("chain_5", 5, 0.02), chain("chain_8", 8, 0.01),
                   chain("chain_12", 12, 0.005), grid("grid_3", 3, 3, 0.0, 10.0),
                   grid("grid_4", 4, 4, 0.05, 15.0), grid("grid_5", 5, 5, 0.05, 20.0),
                   grid("grid_6", 6, 6, 0.1, 25.0)},
                  seed, d_sig);
  }
  throw ValidationError("instance.preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace mts
