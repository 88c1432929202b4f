#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <queue>

#include "mtsched/core/errors.hpp"
#include "mtsched/envs/env.hpp"
#include "mtsched/envs/instance_io.hpp"
#include "mtsched/envs/presets.hpp"

using namespace mts;

namespace {

TaskDescriptor chain(int len, double slip) { return {"c", ChainParams{len, slip}, {0.5, -0.5}}; }
TaskDescriptor bandit(std::vector<double> p, int h) { return {"b", BanditParams{std::move(p), h}, {1.0, 2.0}}; }
TaskDescriptor grid(int w, int h, double slip) { return {"g", GridParams{w, h, w - 1, h - 1, slip, 1.0, 10.0}, {3.0, 4.0}}; }

struct Mc {
  double mean, se;
};

Mc oracle_rollouts(const TaskDescriptor& t, int episodes, std::uint64_t seed) {
  auto env = make_env(t, 4, 1000);
  Rng rng(seed);
  double s = 0, s2 = 0;
  for (int e = 0; e < episodes; ++e) {
    env->reset(rng);
    double score = 0;
    while (!env->done()) score += env->step(env->optimal_action(), rng).reward;
    s += score;
    s2 += score * score;
  }
  const double mean = s / episodes;
  const double var = std::max(s2 / episodes - mean * mean, 0.0);
  return {mean, std::sqrt(var / episodes)};
}

// Shortest path length on an obstacle-free grid, by breadth-first search.
int bfs_distance(int w, int h, int gx, int gy) {
  std::vector<int> d(static_cast<std::size_t>(w * h), -1);
  std::queue<std::pair<int, int>> q;
  q.push({0, 0});
  d[0] = 0;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int a = 0; a < 4; ++a) {
      const int nx = x + dx[a], ny = y + dy[a];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h || d[static_cast<std::size_t>(ny * w + nx)] >= 0) continue;
      d[static_cast<std::size_t>(ny * w + nx)] = d[static_cast<std::size_t>(y * w + x)] + 1;
      q.push({nx, ny});
    }
  }
  return d[static_cast<std::size_t>(gy * w + gx)];
}

}  // namespace

TEST(ChainEnv, WalksRightToTheEnd) {
  auto env = make_env(chain(3, 0.0), 4, 200);
  Rng rng(1);
  Observation o = env->reset(rng);
  ASSERT_EQ(o.size(), 2u + kStateDim);
  EXPECT_EQ(o[0], 0.5);
  EXPECT_EQ(o[2], 0.0);
  auto s = env->step(1, rng);
  EXPECT_DOUBLE_EQ(s.obs[2], 1.0 / 3.0);
  EXPECT_EQ(s.reward, 0.0);
  env->step(1, rng);
  s = env->step(1, rng);
  EXPECT_EQ(s.reward, 1.0);
  EXPECT_TRUE(s.done);
  EXPECT_THROW(env->step(1, rng), DomainError);
}

TEST(ChainEnv, LeftAtStartStaysPut) {
  auto env = make_env(chain(3, 0.0), 4, 200);
  Rng rng(1);
  env->reset(rng);
  auto s = env->step(0, rng);
  EXPECT_EQ(s.obs[2], 0.0);
  EXPECT_FALSE(s.done);
}

TEST(Env, ActionsBeyondTheTaskAreNoOps) {
  auto env = make_env(chain(3, 0.0), 4, 200);
  Rng rng(1);
  const Observation before = env->reset(rng);
  auto s = env->step(3, rng);
  EXPECT_EQ(s.obs, before);
  EXPECT_EQ(s.reward, 0.0);
  EXPECT_EQ(env->steps(), 1);
}

TEST(Env, RejectsMisuse) {
  auto env = make_env(chain(3, 0.0), 4, 200);
  Rng rng(1);
  EXPECT_THROW(env->step(0, rng), DomainError);
  env->reset(rng);
  EXPECT_THROW(env->step(4, rng), DomainError);
  EXPECT_THROW(env->step(-1, rng), DomainError);
  EXPECT_THROW(make_env(bandit({0.1, 0.2, 0.3, 0.4, 0.5}, 5), 4, 200), ValidationError);
}

TEST(Env, EpisodeCapEndsTheEpisode) {
  auto env = make_env(chain(10, 0.0), 4, 5);
  Rng rng(1);
  env->reset(rng);
  int n = 0;
  while (!env->done()) {
    env->step(0, rng);
    ++n;
  }
  EXPECT_EQ(n, 5);
}

TEST(BanditEnv, LastsExactlyTheHorizon) {
  auto env = make_env(bandit({0.0, 1.0}, 7), 4, 200);
  Rng rng(2);
  const auto o = env->reset(rng);
  EXPECT_EQ(o[2], 0.0);
  double score = 0;
  int n = 0;
  while (!env->done()) {
    score += env->step(1, rng).reward;
    ++n;
  }
  EXPECT_EQ(n, 7);
  EXPECT_EQ(score, 7.0);
}

TEST(GridEnv, DeterministicTargetIsShortestPathReturn) {
  for (auto [w, h] : {std::pair{3, 3}, std::pair{5, 4}, std::pair{2, 6}}) {
    const auto t = grid(w, h, 0.0);
    const int d = bfs_distance(w, h, w - 1, h - 1);
    EXPECT_NEAR(oracle_target(t), 10.0 - d * 1.0, 1e-9) << w << "x" << h;
    const Mc mc = oracle_rollouts(t, 5, 1);
    EXPECT_NEAR(mc.mean, 10.0 - d, 1e-12);
  }
}

TEST(GridEnv, EncodesPositionAndGoalOffset) {
  auto env = make_env(grid(3, 5, 0.0), 4, 200);
  Rng rng(1);
  auto o = env->reset(rng);
  EXPECT_EQ(o[2], 0.0);
  EXPECT_EQ(o[3], 0.0);
  EXPECT_EQ(o[4], 1.0);
  EXPECT_EQ(o[5], 1.0);
  o = env->step(3, rng).obs;  // right
  EXPECT_DOUBLE_EQ(o[2], 0.5);
  o = env->step(1, rng).obs;  // down
  EXPECT_DOUBLE_EQ(o[3], 0.25);
}

TEST(OracleTargets, MatchMonteCarloWithinThreeStandardErrors) {
  const std::vector<TaskDescriptor> tasks{chain(8, 0.05), chain(5, 0.1), bandit({0.2, 0.7, 0.4}, 20),
                                          grid(5, 5, 0.1), grid(4, 6, 0.2)};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Mc mc = oracle_rollouts(tasks[i], 20000, 100 + i);
    EXPECT_NEAR(mc.mean, oracle_target(tasks[i]), 3.0 * mc.se + 1e-12) << "task " << i;
  }
}

TEST(OracleTargets, ChainClosedForm) {
  EXPECT_DOUBLE_EQ(oracle_target(chain(4, 0.0)), 1.0);
  EXPECT_DOUBLE_EQ(oracle_target(chain(2, 0.5)), 0.25);
  EXPECT_DOUBLE_EQ(oracle_target(bandit({0.3, 0.6}, 10)), 6.0);
}

TEST(Presets, AllValidateAndHaveTheRightSize) {
  EXPECT_EQ(make_preset("SYN-6", 1).k(), 6u);
  EXPECT_EQ(make_preset("SYN-6-imbalanced", 1).k(), 6u);
  EXPECT_EQ(make_preset("SYN-12", 1).k(), 12u);
  EXPECT_THROW(make_preset("SYN-7", 1), ValidationError);
  for (const auto& n : preset_names()) {
    const auto inst = make_preset(n, 3, 5);
    EXPECT_EQ(inst.signature_dim(), 5u);
    for (std::size_t i = 0; i < inst.k(); ++i) EXPECT_NEAR(inst.targets[i], oracle_target(inst.tasks[i]), 0.0);
  }
}

TEST(Presets, SignaturesFollowTheSeed) {
  EXPECT_EQ(instance_fingerprint(make_preset("SYN-6", 4)), instance_fingerprint(make_preset("SYN-6", 4)));
  EXPECT_NE(instance_fingerprint(make_preset("SYN-6", 4)), instance_fingerprint(make_preset("SYN-6", 5)));
}

TEST(InstanceIo, RoundTripPreservesEverything) {
  const auto inst = make_preset("SYN-12", 9);
  const auto back = instance_from_json(instance_to_json(inst));
  EXPECT_EQ(instance_fingerprint(back), instance_fingerprint(inst));
  EXPECT_EQ(back.k(), inst.k());
  for (std::size_t i = 0; i < inst.k(); ++i) {
    EXPECT_EQ(back.tasks[i].signature, inst.tasks[i].signature);
    EXPECT_EQ(back.targets[i], inst.targets[i]);
  }
  const auto path = std::filesystem::temp_directory_path() / "mtsched_inst_rt.json";
  save_instance(inst, path);
  EXPECT_EQ(instance_fingerprint(load_instance(path)), instance_fingerprint(inst));
  std::filesystem::remove(path);
}

TEST(InstanceIo, RejectsWrongFormat) {
  auto j = instance_to_json(make_preset("SYN-6", 1));
  j["format"] = "something-else";
  EXPECT_ANY_THROW(instance_from_json(j));
  auto k = instance_to_json(make_preset("SYN-6", 1));
  k["tasks"][0]["family"] = "maze";
  EXPECT_ANY_THROW(instance_from_json(k));
}
