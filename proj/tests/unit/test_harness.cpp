#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mtsched/core/errors.hpp"
#include "mtsched/core/rng.hpp"
#include "mtsched/harness/config.hpp"
#include "mtsched/harness/run.hpp"

using namespace mts;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mtsched_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small(SchedulerKind kind, std::uint64_t seed = 3) {
  RunConfig c;
  c.seed = seed;
  c.total_steps = 3000;
  c.scheduler.kind = kind;
  c.scheduler.meta_hidden = {16};
  c.eval.interval = 1000;
  c.eval.episodes = 2;
  c.eval.checkpoint_interval = 1500;
  return c;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(MTSCHED_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, ParsesSectionsAndDefaults) {
  const auto c = parse_config_string(
      "seed = 7\ntotal_steps = 500\n[scheduler]\nkind = a5c\ntau = 0.1\n"
      "[learner]\nhidden = 16,8\nrecurrent = true\n[targets]\nchain_short = 0.5\n");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.total_steps, 500);
  EXPECT_EQ(c.scheduler.kind, SchedulerKind::a5c);
  EXPECT_DOUBLE_EQ(c.scheduler.tau, 0.1);
  EXPECT_EQ(c.learner.hidden, (std::vector<std::size_t>{16, 8}));
  EXPECT_TRUE(c.learner.recurrent);
  EXPECT_DOUBLE_EQ(c.instance.targets.at("chain_short"), 0.5);
  EXPECT_EQ(c.scheduler.window, 10u);
  EXPECT_EQ(c.learner.n_step, 20u);
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  try {
    parse_config_string("seed = 1\n\n[scheduler]\nkind = a5c\ntemperature = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("scheduler.temperature"), std::string::npos) << m;
    EXPECT_NE(m.find("line 5"), std::string::npos) << m;
    EXPECT_EQ(e.line(), 5u);
  }
  EXPECT_THROW(parse_config_string("[nonsense]\nx = 1\n"), ConfigError);
}

TEST(Config, MalformedValuesAreRejected) {
  EXPECT_THROW(parse_config_string("seed = abc\n"), ConfigError);
  EXPECT_THROW(parse_config_string("[scheduler]\ntau = 0.1x\n"), ConfigError);
  EXPECT_THROW(parse_config_string("[scheduler]\nkind = best\n"), ConfigError);
  EXPECT_THROW(parse_config_string("[learner]\nrecurrent = maybe\n"), ConfigError);
}

TEST(Config, ValidationNamesTheField) {
  try {
    parse_config_string("[scheduler]\ntau = 0\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("tau"), std::string::npos);
  }
  EXPECT_THROW(parse_config_string("total_steps = 0\n"), ValidationError);
  EXPECT_THROW(parse_config_string("[scheduler]\nucb_gamma = 1.5\n"), ValidationError);
  EXPECT_THROW(parse_config_string("[learner]\nworkers = 0\n"), ValidationError);
  EXPECT_THROW(config_from_overrides({"scheduler.kind=a5c", "instance.target_mode=doubling"}), ValidationError);
}

TEST(Config, OverridesApplyOnTop) {
  const auto c = parse_config_string("seed = 1\n", {"seed=9", "scheduler.kind=ea4c", "targets.grid_small=4"});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.scheduler.kind, SchedulerKind::ea4c);
  EXPECT_DOUBLE_EQ(c.instance.targets.at("grid_small"), 4.0);
  EXPECT_THROW(config_from_overrides({"no_equals_sign"}), ConfigError);
  EXPECT_THROW(config_from_overrides({"scheduler.nope=1"}), ConfigError);
}

TEST(Config, SerializeRoundTrips) {
  RunConfig c;
  c.seed = 11;
  c.scheduler.kind = SchedulerKind::fa4c;
  c.scheduler.tau = 0.07;
  c.scheduler.reward_mode = MetaRewardMode::gap;
  c.learner.hidden = {24, 12};
  c.learner.heads = true;
  c.instance.preset = "SYN-12";
  c.instance.targets["x"] = 1.25;
  c.eval.checkpoint_interval = 300;
  const auto text = serialize_config(c);
  EXPECT_EQ(parse_config_string(text), c);
  EXPECT_EQ(serialize_config(parse_config_string(text)), text);
  for (const auto& key : config_keys()) {
    const auto dot = key.find('.');
    const auto leaf = dot == std::string::npos ? key : key.substr(dot + 1);
    EXPECT_NE(text.find(leaf + " ="), std::string::npos) << key;
  }
}

TEST(Config, BuildInstanceAppliesTargetOverrides) {
  auto c = config_from_overrides({"instance.preset=SYN-6", "instance.target_multiplier=2"});
  const auto base = build_instance(config_from_overrides({"instance.preset=SYN-6"}));
  const auto doubled = build_instance(c);
  for (std::size_t i = 0; i < base.k(); ++i) EXPECT_DOUBLE_EQ(doubled.targets[i], 2 * base.targets[i]);

  c.instance.targets[base.tasks[1].name] = 123.0;
  EXPECT_DOUBLE_EQ(build_instance(c).targets[1], 246.0);
  c.instance.targets["not_a_task"] = 1.0;
  EXPECT_THROW(build_instance(c), ValidationError);

  auto w = config_from_overrides({"scheduler.kind=ea4c", "scheduler.worst_count=50"});
  EXPECT_THROW(build_instance(w), ValidationError);
}

TEST(Config, SignaturesIgnoreRunSeed) {
  const auto a = build_instance(config_from_overrides({"seed=1"}));
  const auto b = build_instance(config_from_overrides({"seed=2"}));
  EXPECT_EQ(a, b);
  const auto s = build_instance(config_from_overrides({"instance.signature_seed=5"}));
  EXPECT_NE(a.tasks[0].signature, s.tasks[0].signature);
}

TEST(Train, BudgetIsAccountedPerTask) {
  for (auto kind : {SchedulerKind::ba3c, SchedulerKind::fa4c}) {
    const auto c = small(kind);
    const auto inst = build_instance(c);
    std::int64_t logged = 0;
    TrainHooks h;
    h.on_decision = [&](const nlohmann::json&) { ++logged; };
    const auto r = train(c, inst, h);
    std::int64_t steps = 0, decisions = 0;
    for (std::size_t i = 0; i < inst.k(); ++i) {
      steps += r.task_steps[i];
      decisions += r.task_decisions[i];
    }
    EXPECT_EQ(steps, r.learner_steps);
    EXPECT_EQ(decisions, r.decisions);
    EXPECT_EQ(logged, r.decisions);
    EXPECT_GE(r.learner_steps, c.total_steps);
    EXPECT_LT(r.learner_steps, c.total_steps + inst.episode_cap) << scheduler_kind_name(kind);
    EXPECT_EQ(r.final_report.step, r.learner_steps);
  }
}

TEST(Train, DecisionLogReplaysFromSeed) {
  for (auto kind : {SchedulerKind::ba3c, SchedulerKind::a5c, SchedulerKind::ua4c, SchedulerKind::ea4c}) {
    const auto c = small(kind, 5);
    std::vector<nlohmann::json> log;
    TrainHooks h;
    h.on_decision = [&](const nlohmann::json& j) { log.push_back(j); };
    train(c, build_instance(c), h);
    ASSERT_FALSE(log.empty());
    Rng rng(derive_seed(c.seed, "scheduler"));
    for (std::size_t i = 0; i < log.size(); ++i) {
      const double u = rng.uniform();
      ASSERT_EQ(log[i]["draw"].get<double>(), u) << scheduler_kind_name(kind) << " decision " << i;
      const auto p = log[i]["distribution"].get<std::vector<double>>();
      ASSERT_EQ(Rng::pick(p, u), log[i]["task"].get<std::size_t>());
      ASSERT_EQ(log[i]["index"].get<std::int64_t>(), static_cast<std::int64_t>(i));
    }
  }
}

TEST(Train, SchedulerTargetsForFineGrainedRuns) {
  const auto c = small(SchedulerKind::fa4c);
  const auto inst = build_instance(c);
  const auto r = train(c, inst);
  const auto expect = fine_targets(inst, c.scheduler.segment_steps, c.scheduler.fine_target_episodes,
                                   derive_seed(c.seed, "fine-target"));
  EXPECT_EQ(r.scheduler_targets, expect);
  for (double t : expect) EXPECT_GT(t, 0.0);
  EXPECT_EQ(r.scheduler->name(), "fa4c");
}

TEST(RunExperiment, WritesArtifactsAndIsDeterministic) {
  const auto c = small(SchedulerKind::a5c);
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  run_experiment(c, d1);
  run_experiment(c, d2);
  for (const char* f : {"decisions.jsonl", "metrics.csv", "config.ini", "instance.json", "checkpoints/final.json"}) {
    ASSERT_TRUE(fs::exists(d1 / f)) << f;
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  }
  // checkpoints are named by the learner step at which they were taken
  std::size_t checkpoints = 0;
  for (const auto& e : fs::directory_iterator(d1 / "checkpoints"))
    if (e.path().filename().string().rfind("step_", 0) == 0) ++checkpoints;
  EXPECT_EQ(checkpoints, 2u);  // first step past 1500, then the final one
  EXPECT_EQ(load_config(d1 / "config.ini"), c);

  const auto m = nlohmann::json::parse(slurp(d1 / "manifest.json"));
  EXPECT_EQ(m["format"], "mtsched-run");
  EXPECT_EQ(m["status"], "completed");
  EXPECT_EQ(m["scheduler"], "a5c");
  EXPECT_EQ(m["seed"], 3);
  EXPECT_TRUE(m["final_metrics"].contains("q_am"));

  std::istringstream metrics(slurp(d1 / "metrics.csv"));
  std::string line;
  std::size_t rows = 0;
  std::getline(metrics, line);
  EXPECT_EQ(line.rfind("step,raw_", 0), 0u);
  while (std::getline(metrics, line)) ++rows;
  EXPECT_EQ(rows, 3u);  // first steps past 1000 and 2000, then the final evaluation

  EXPECT_THROW(run_experiment(c, d1), Error);
  EXPECT_NO_THROW(run_experiment(c, d1, true));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(RunExperiment, ParallelWorkersComplete) {
  auto c = small(SchedulerKind::ua4c);
  c.learner.workers = 2;
  const auto d = scratch("parallel");
  const auto r = run_experiment(c, d);
  EXPECT_GE(r.learner_steps, c.total_steps);
  EXPECT_LT(r.learner_steps, c.total_steps + 2 * build_instance(c).episode_cap);
  std::ifstream in(d / "decisions.jsonl");
  std::string line;
  std::int64_t n = 0;
  bool saw_second = false;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["index"].get<std::int64_t>(), n++);
    saw_second = saw_second || j["worker"] == 1;
  }
  EXPECT_EQ(n, r.decisions);
  EXPECT_TRUE(saw_second);
  fs::remove_all(d);
}

TEST(Compare, GroupsBySchedulerAndListsIncomplete) {
  std::vector<fs::path> dirs;
  for (auto kind : {SchedulerKind::ba3c, SchedulerKind::a5c})
    for (std::uint64_t s : {1, 2}) {
      auto c = small(kind, s);
      c.total_steps = 800;
      c.eval.interval = 0;
      c.eval.checkpoint_interval = 0;
      dirs.push_back(scratch("cmp_" + std::string(scheduler_kind_name(kind)) + std::to_string(s)));
      run_experiment(c, dirs.back());
    }
  const auto cmp = compare_runs(dirs);
  ASSERT_EQ(cmp.groups.size(), 2u);
  EXPECT_EQ(cmp.groups[0].scheduler, "ba3c");
  EXPECT_EQ(cmp.groups[1].scheduler, "a5c");
  EXPECT_EQ(cmp.groups[0].runs, 2u);
  const double a = cmp.runs[0].metrics->q_am, b = cmp.runs[1].metrics->q_am;
  EXPECT_NEAR(cmp.groups[0].mean.q_am, (a + b) / 2, 1e-12);
  EXPECT_NEAR(cmp.groups[0].stddev.q_am, std::abs(a - b) / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(comparison_csv(cmp).rfind("scheduler,runs,p_am_mean", 0), 0u);

  // A run whose manifest says it never finished is reported, not averaged.
  auto m = nlohmann::json::parse(slurp(dirs[3] / "manifest.json"));
  m["status"] = "running";
  std::ofstream(dirs[3] / "manifest.json") << m.dump(2);
  const auto partial = compare_runs(dirs);
  EXPECT_EQ(partial.groups[1].runs, 1u);
  ASSERT_EQ(partial.incomplete.size(), 1u);
  EXPECT_EQ(partial.incomplete[0].dir, dirs[3]);

  auto other = small(SchedulerKind::ba3c);
  other.total_steps = 500;
  other.instance.preset = "SYN-12";
  const auto od = scratch("cmp_other");
  run_experiment(other, od);
  auto mixed = dirs;
  mixed.push_back(od);
  EXPECT_THROW(compare_runs(mixed), DomainError);
  for (const auto& d : mixed) fs::remove_all(d);
}

TEST(Cli, ExitCodes) {
  const auto d = scratch("cli");
  EXPECT_EQ(cli("run -s total_steps=400 -s eval.interval=0 -o " + d.string()), 0);
  EXPECT_EQ(cli("eval -r " + d.string() + " -e 1"), 0);
  EXPECT_EQ(cli("analyze-firing -r " + d.string() + " -e 1"), 0);
  EXPECT_TRUE(fs::exists(d / "analysis/firing.csv"));
  EXPECT_TRUE(fs::exists(d / "analysis/firing_plot.csv"));
  EXPECT_EQ(cli("analyze-turnoff -r " + d.string() + " -e 1"), 0);
  EXPECT_TRUE(fs::exists(d / "analysis/turnoff.csv"));
  EXPECT_EQ(cli("compare " + d.string()), 0);
  EXPECT_EQ(cli("run -s scheduler.tau=-1 -o " + d.string() + "_bad"), 2);
  EXPECT_EQ(cli("run -s bogus=1 -o " + d.string() + "_bad"), 2);
  EXPECT_EQ(cli("run --no-such-flag"), 2);
  EXPECT_EQ(cli("run -s total_steps=400 -o " + d.string()), 3);  // existing run, no --overwrite
  EXPECT_EQ(cli("gen-instance -p SYN-6 -o " + (d / "inst.json").string()), 0);
  EXPECT_EQ(cli("gen-instance -p NOPE -o " + (d / "x.json").string()), 2);
  fs::remove_all(d);
  fs::remove_all(d.string() + "_bad");
}
