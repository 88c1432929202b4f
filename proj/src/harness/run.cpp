#include "mtsched/harness/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "mtsched/core/errors.hpp"
#include "mtsched/core/format.hpp"
#include "mtsched/envs/instance_io.hpp"
#include "mtsched/learner/checkpoint.hpp"
#include "mtsched/learner/worker.hpp"
#include "mtsched/schedulers/meta.hpp"

#ifndef MTSCHED_VERSION
#define MTSCHED_VERSION "dev"
#endif

namespace mts {

namespace fs = std::filesystem;
using nlohmann::json;

const char* code_version() { return MTSCHED_VERSION; }

std::vector<double> fine_targets(const MultiTaskInstance& inst, std::size_t n, std::size_t episodes,
                                 std::uint64_t seed) {
  if (episodes == 0) throw DomainError("fine_targets: need at least one episode");
  std::vector<double> out;
  for (std::size_t i = 0; i < inst.k(); ++i) {
    auto env = make_env(inst.tasks[i], inst.union_action_count, inst.episode_cap);
    std::vector<EpisodeOutcome> eps;
    bool long_enough = true;
    double mean_score = 0.0;
    for (std::size_t e = 0; e < episodes; ++e) {
      Rng rng(derive_seed(seed, "fine-target", i * episodes + e));
      env->reset(rng);
      EpisodeOutcome o;
      while (!env->done()) {
        const double r = env->step(env->optimal_action(), rng).reward;
        o.rewards.push_back(r);
        o.score += r;
      }
      o.length = o.rewards.size();
      long_enough = long_enough && o.length >= n;
      mean_score += o.score;
      eps.push_back(std::move(o));
    }
    mean_score /= static_cast<double>(episodes);
    const double t = long_enough ? fa4c_target(eps, n) : mean_score;
    if (!(t > 0.0))
      throw ValidationError("scheduler.segment_steps",
                            "fine-grained target of task '" + inst.tasks[i].name + "' is not positive");
    out.push_back(t);
  }
  return out;
}

namespace {

json decision_json(std::int64_t index, std::int64_t step, std::size_t worker, const SchedulerDecision& d,
                   const MultiTaskInstance& inst) {
  json j;
  j["index"] = index;
  j["step"] = step;
  j["worker"] = worker;
  j["task"] = d.task;
  j["task_name"] = inst.tasks[d.task].name;
  j["draw"] = d.draw;
  j["distribution"] = d.distribution;
  json diag = json::object();
  for (const auto& [k, v] : d.diagnostics) diag[k] = v;
  j["diagnostics"] = std::move(diag);
  return j;
}

}  // namespace

TrainResult train(const RunConfig& config, const MultiTaskInstance& inst, const TrainHooks& hooks) {
  validate_config(config);
  const SchedulerSettings settings = scheduler_settings(config);
  const bool fine = settings.kind == SchedulerKind::fa4c;

  TrainResult result;
  result.scheduler_targets =
      fine ? fine_targets(inst, settings.segment_steps, config.scheduler.fine_target_episodes,
                          derive_seed(config.seed, "fine-target"))
           : std::vector<double>(inst.targets.values().begin(), inst.targets.values().end());
  result.scheduler = make_scheduler(settings, TargetRegistry(result.scheduler_targets),
                                    derive_seed(config.seed, "meta-init"));
  Scheduler& sched = *result.scheduler;

  ActorCriticNet net(learner_shape(config, inst));
  {
    Rng init(derive_seed(config.seed, "init"));
    net.initialize(init);
  }
  ParameterStore store(net, learner_schedule(config), config.learner.rms_decay, config.learner.rms_epsilon);
  const LearnerParams params = learner_params(config);
  const EvalSpec spec = eval_spec(config);

  Rng sched_rng(derive_seed(config.seed, "scheduler"));
  result.task_steps.assign(inst.k(), 0);
  result.task_decisions.assign(inst.k(), 0);
  std::int64_t next_eval = config.eval.interval > 0 ? config.eval.interval : -1;
  std::int64_t next_ckpt = config.eval.checkpoint_interval > 0 ? config.eval.checkpoint_interval : -1;
  std::int64_t last_eval_step = -1;
  std::mutex mu;
  std::exception_ptr failure;

  // Called with `mu` held after each outcome is reported.
  auto periodic = [&](std::int64_t steps) {
    while (next_eval > 0 && steps >= next_eval) {
      EvalReport r = evaluate(store.snapshot(), inst, spec);
      r.step = steps;
      last_eval_step = steps;
      if (hooks.on_eval) hooks.on_eval(r);
      next_eval += config.eval.interval;
      while (next_eval <= steps) next_eval += config.eval.interval;
    }
    while (next_ckpt > 0 && steps >= next_ckpt) {
      if (hooks.on_checkpoint) hooks.on_checkpoint(store);
      while (next_ckpt <= steps) next_ckpt += config.eval.checkpoint_interval;
    }
  };

  auto loop = [&](std::size_t w) {
    try {
      Worker worker(store, inst, params, config.seed, w);
      for (;;) {
        SchedulerDecision d;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (failure || store.steps() >= config.total_steps) return;
          d = sched.select_next(DecisionContext{store.steps()}, sched_rng);
          if (hooks.on_decision) hooks.on_decision(decision_json(result.decisions, store.steps(), w, d, inst));
          ++result.decisions;
          ++result.task_decisions[d.task];
        }
        EpisodeOutcome o = fine ? worker.train_for_n_steps(d.task, settings.segment_steps)
                                : worker.train_for_one_episode(d.task);
        std::lock_guard<std::mutex> lock(mu);
        result.task_steps[d.task] += static_cast<std::int64_t>(o.length);
        sched.observe(d.task, o);
        periodic(store.steps());
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  };

  if (config.learner.workers == 1) {
    loop(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < config.learner.workers; ++w) threads.emplace_back(loop, w);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.learner_steps = store.steps();
  result.net = store.snapshot();
  result.final_report = evaluate(result.net, inst, spec);
  result.final_report.step = result.learner_steps;
  if (last_eval_step != result.learner_steps && hooks.on_eval) hooks.on_eval(result.final_report);
  if (hooks.on_checkpoint) hooks.on_checkpoint(store);
  return result;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << s;
  if (!out) throw Error("write failed: " + p.string());
}

json metrics_json(const Metrics& m) {
  return {{"p_am", m.p_am}, {"q_am", m.q_am}, {"q_gm", m.q_gm}, {"q_hm", m.q_hm}};
}

}  // namespace

TrainResult run_experiment(const RunConfig& config, const fs::path& dir, bool overwrite) {
  validate_config(config);
  const MultiTaskInstance inst = build_instance(config);
  if (fs::exists(dir / "manifest.json") && !overwrite)
    throw Error("run directory " + dir.string() + " already holds a run (use --overwrite)");
  fs::create_directories(dir / "checkpoints");

  const auto t0 = std::chrono::steady_clock::now();
  json manifest = {{"format", "mtsched-run"},
                   {"version", 1},
                   {"status", "running"},
                   {"seed", config.seed},
                   {"scheduler", scheduler_kind_name(scheduler_settings(config).kind)},
                   {"instance", inst.name},
                   {"instance_fingerprint", instance_fingerprint(inst)},
                   {"total_steps", config.total_steps},
                   {"workers", config.learner.workers},
                   {"code_version", code_version()},
                   {"started_at", utc_now()}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(dir / "config.ini", serialize_config(config));
  save_instance(inst, dir / "instance.json");

  std::ofstream decisions(dir / "decisions.jsonl", std::ios::binary | std::ios::trunc);
  std::ofstream metrics(dir / "metrics.csv", std::ios::binary | std::ios::trunc);
  metrics << metrics_csv_header(inst) << '\n';

  TrainHooks hooks;
  hooks.on_decision = [&](const json& j) { decisions << j.dump() << '\n'; };
  hooks.on_eval = [&](const EvalReport& r) { metrics << metrics_csv_row(r) << '\n' << std::flush; };
  hooks.on_checkpoint = [&](const ParameterStore& store) {
    const std::int64_t step = store.steps();
    save_checkpoint(dir / "checkpoints" / ("step_" + std::to_string(step) + ".json"), store,
                    {{"seed", config.seed}, {"instance_fingerprint", manifest["instance_fingerprint"]}});
  };

  auto finish = [&](const std::string& status) {
    manifest["status"] = status;
    manifest["finished_at"] = utc_now();
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  };

  try {
    TrainResult r = train(config, inst, hooks);
    decisions.close();
    metrics.close();
    fs::copy_file(dir / "checkpoints" / ("step_" + std::to_string(r.learner_steps) + ".json"),
                  dir / "checkpoints" / "final.json", fs::copy_options::overwrite_existing);
    manifest["learner_steps"] = r.learner_steps;
    manifest["decisions"] = r.decisions;
    manifest["final_metrics"] = metrics_json(r.final_report.metrics);
    finish("completed");
    return r;
  } catch (const std::exception& e) {
    manifest["error"] = e.what();
    finish("failed");
    throw;
  }
}

namespace {

std::optional<std::pair<std::int64_t, Metrics>> last_metrics_row(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) return std::nullopt;
  std::string line, last;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  if (last.empty()) return std::nullopt;
  std::vector<std::string> cells;
  std::stringstream ss(last);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  if (cells.size() < 5) return std::nullopt;
  const std::size_t n = cells.size();
  Metrics m{std::stod(cells[n - 4]), std::stod(cells[n - 3]), std::stod(cells[n - 2]), std::stod(cells[n - 1])};
  return std::make_pair(std::stoll(cells[0]), m);
}

}  // namespace

Comparison compare_runs(const std::vector<fs::path>& dirs) {
  Comparison c;
  std::string fingerprint;
  std::string fp_dir;
  for (const auto& d : dirs) {
    RunRow row;
    row.dir = d;
    std::ifstream in(d / "manifest.json");
    if (!in) {
      row.status = "missing";
      c.incomplete.push_back(row);
      continue;
    }
    json m;
    try {
      in >> m;
    } catch (const json::exception&) {
      row.status = "unreadable";
      c.incomplete.push_back(row);
      continue;
    }
    row.status = m.value("status", "unknown");
    row.scheduler = m.value("scheduler", "");
    row.instance = m.value("instance", "");
    row.fingerprint = m.value("instance_fingerprint", "");
    row.seed = m.value("seed", std::uint64_t{0});
    if (row.status != "completed") {
      c.incomplete.push_back(row);
      continue;
    }
    auto last = last_metrics_row(d / "metrics.csv");
    if (!last) {
      row.status = "no metrics";
      c.incomplete.push_back(row);
      continue;
    }
    row.step = last->first;
    row.metrics = last->second;
    if (fingerprint.empty()) {
      fingerprint = row.fingerprint;
      fp_dir = d.string();
    } else if (row.fingerprint != fingerprint) {
      throw DomainError("runs are not comparable: " + d.string() + " used a different instance than " + fp_dir);
    }
    c.runs.push_back(row);
  }
  if (c.runs.empty()) throw DomainError("compare: no completed runs");

  for (const auto& r : c.runs) {
    auto it = std::find_if(c.groups.begin(), c.groups.end(), [&](const GroupRow& g) { return g.scheduler == r.scheduler; });
    if (it == c.groups.end()) {
      c.groups.push_back({r.scheduler, 0, {}, {}});
      it = c.groups.end() - 1;
    }
    ++it->runs;
  }
  auto field = [](Metrics& m, int i) -> double& {
    switch (i) {
      case 0: return m.p_am;
      case 1: return m.q_am;
      case 2: return m.q_gm;
      default: return m.q_hm;
    }
  };
  for (auto& g : c.groups) {
    for (int f = 0; f < 4; ++f) {
      double sum = 0.0;
      for (auto r : c.runs)
        if (r.scheduler == g.scheduler) sum += field(*r.metrics, f);
      const double mean = sum / static_cast<double>(g.runs);
      double ss = 0.0;
      for (auto r : c.runs)
        if (r.scheduler == g.scheduler) ss += (field(*r.metrics, f) - mean) * (field(*r.metrics, f) - mean);
      field(g.mean, f) = mean;
      field(g.stddev, f) = g.runs > 1 ? std::sqrt(ss / static_cast<double>(g.runs - 1)) : 0.0;
    }
  }
  return c;
}

namespace {
std::string num(double v, const char* f = "%.6f") {
  char buf[40];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
}  // namespace

std::string comparison_csv(const Comparison& c) {
  std::string s = "scheduler,runs,p_am_mean,p_am_std,q_am_mean,q_am_std,q_gm_mean,q_gm_std,q_hm_mean,q_hm_std\n";
  for (const auto& g : c.groups) {
    s += g.scheduler + ',' + std::to_string(g.runs);
    for (auto [m, sd] : {std::pair{g.mean.p_am, g.stddev.p_am}, std::pair{g.mean.q_am, g.stddev.q_am},
                         std::pair{g.mean.q_gm, g.stddev.q_gm}, std::pair{g.mean.q_hm, g.stddev.q_hm}})
      s += ',' + format_double(m) + ',' + format_double(sd);
    s += '\n';
  }
  return s;
}

std::string comparison_text(const Comparison& c) {
  char buf[256];
  std::string s;
  std::snprintf(buf, sizeof buf, "%-10s %4s  %-17s  %-17s  %-17s  %-17s\n", "scheduler", "runs", "p_am", "q_am",
                "q_gm", "q_hm");
  s += buf;
  for (const auto& g : c.groups) {
    auto cell = [](double m, double sd) { return num(m, "%.4f") + " +- " + num(sd, "%.4f"); };
    std::snprintf(buf, sizeof buf, "%-10s %4zu  %-17s  %-17s  %-17s  %-17s\n", g.scheduler.c_str(), g.runs,
                  cell(g.mean.p_am, g.stddev.p_am).c_str(), cell(g.mean.q_am, g.stddev.q_am).c_str(),
                  cell(g.mean.q_gm, g.stddev.q_gm).c_str(), cell(g.mean.q_hm, g.stddev.q_hm).c_str());
    s += buf;
  }
  for (const auto& r : c.incomplete) s += "incomplete: " + r.dir.string() + " (" + r.status + ")\n";
  return s;
}

}  // namespace mts
