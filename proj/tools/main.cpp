// Command-line front end: run experiments, evaluate and analyze checkpoints,
// compare runs and write instance files.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mtsched/analysis/analysis.hpp"
#include "mtsched/core/errors.hpp"
#include "mtsched/envs/instance_io.hpp"
#include "mtsched/envs/presets.hpp"
#include "mtsched/harness/config.hpp"
#include "mtsched/harness/run.hpp"
#include "mtsched/learner/checkpoint.hpp"
#include "mtsched/metrics/metrics.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct LoadedRun {
  mts::RunConfig config;
  mts::MultiTaskInstance instance;
  mts::ActorCriticNet net;
  std::int64_t step = 0;
};

LoadedRun load_run(const fs::path& dir, const std::string& checkpoint) {
  LoadedRun r;
  r.config = mts::load_config(dir / "config.ini");
  r.instance = mts::load_instance(dir / "instance.json");
  const fs::path ckpt = checkpoint.empty() ? dir / "checkpoints" / "final.json" : fs::path(checkpoint);
  auto c = mts::load_checkpoint(ckpt);
  r.net = std::move(c.net);
  r.step = c.steps;
  return r;
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw mts::Error("cannot write " + p.string());
  out << s;
}

mts::EvalSpec spec_for(const LoadedRun& run, std::size_t episodes, int cap, std::uint64_t seed, bool seed_set) {
  mts::EvalSpec s = mts::eval_spec(run.config);
  if (episodes > 0) s.episodes = episodes;
  if (cap > 0) s.cap = cap;
  if (seed_set) s.seed = seed;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active task sampling for multi-task actor-critic agents"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, checkpoint, preset = "SYN-6", csv_out, analysis_dir;
  std::vector<std::string> overrides;
  std::vector<std::string> compare_dirs;
  bool overwrite = false;
  std::size_t episodes = 0, d_sig = 8;
  int cap = 0;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Train with a scheduler and write a run directory");
  run->add_option("-c,--config", config_path, "INI config file (defaults apply without one)");
  run->add_option("-s,--set", overrides, "Override a config key, e.g. scheduler.kind=a5c");
  run->add_option("-o,--out", out_dir, "Run directory")->required();
  run->add_flag("--overwrite", overwrite, "Replace an existing run in --out");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint and print one metrics.csv row");
  auto* firing = app.add_subcommand("analyze-firing", "Neuron firing analysis of a trained network");
  auto* turnoff = app.add_subcommand("analyze-turnoff", "Neuron turnoff analysis of a trained network");
  for (auto* sub : {eval, firing, turnoff}) {
    sub->add_option("-r,--run", run_dir, "Completed run directory")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--checkpoint", checkpoint, "Checkpoint file (default: checkpoints/final.json)");
    sub->add_option("-e,--episodes", episodes, "Episodes per task");
    sub->add_option("--cap", cap, "Episode step cap");
    sub->add_option("--seed", seed, "Evaluation seed");
  }
  for (auto* sub : {firing, turnoff})
    sub->add_option("-o,--out", analysis_dir, "Output directory (default: <run>/analysis)");

  auto* compare = app.add_subcommand("compare", "Group final metrics of runs by scheduler");
  compare->add_option("dirs", compare_dirs, "Run directories")->required();
  compare->add_option("--csv", csv_out, "Also write the table as CSV");

  auto* gen = app.add_subcommand("gen-instance", "Write a preset instance as JSON");
  gen->add_option("-p,--preset", preset, "Preset name")->check(CLI::IsMember(mts::preset_names()));
  gen->add_option("--seed", seed, "Seed for task signatures");
  gen->add_option("--d-sig", d_sig, "Signature length");
  gen->add_option("-o,--out", out_dir, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const mts::RunConfig cfg =
          config_path.empty() ? mts::config_from_overrides(overrides) : mts::load_config(config_path, overrides);
      const auto r = mts::run_experiment(cfg, out_dir, overwrite);
      std::cout << mts::metrics_csv_header(mts::load_instance(fs::path(out_dir) / "instance.json")) << '\n'
                << mts::metrics_csv_row(r.final_report) << '\n';
    } else if (*eval) {
      const LoadedRun lr = load_run(run_dir, checkpoint);
      auto report = mts::evaluate(lr.net, lr.instance, spec_for(lr, episodes, cap, seed, eval->count("--seed")));
      report.step = lr.step;
      std::cout << mts::metrics_csv_header(lr.instance) << '\n' << mts::metrics_csv_row(report) << '\n';
    } else if (*firing || *turnoff) {
      const LoadedRun lr = load_run(run_dir, checkpoint);
      auto* sub = *firing ? firing : turnoff;
      mts::EvalSpec spec = spec_for(lr, episodes, cap, seed, sub->count("--seed"));
      const fs::path out = analysis_dir.empty() ? fs::path(run_dir) / "analysis" : fs::path(analysis_dir);
      fs::create_directories(out);
      if (*firing) {
        if (episodes == 0) spec.episodes = 10;
        const auto f = mts::firing_matrix(lr.net, lr.instance, spec);
        const auto order = mts::sort_neurons(f);
        write_file(out / "firing.csv", mts::firing_csv(f, order, lr.instance));
        write_file(out / "firing_plot.csv", mts::firing_plot_data(order));
        std::cout << "wrote " << (out / "firing.csv").string() << " and " << (out / "firing_plot.csv").string() << '\n';
      } else {
        const auto t = mts::turnoff_matrix(lr.net, lr.instance, spec);
        write_file(out / "turnoff.csv", mts::turnoff_csv(t, lr.instance));
        std::cout << "wrote " << (out / "turnoff.csv").string() << '\n';
      }
    } else if (*compare) {
      std::vector<fs::path> dirs(compare_dirs.begin(), compare_dirs.end());
      const auto c = mts::compare_runs(dirs);
      std::cout << mts::comparison_text(c);
      if (!csv_out.empty()) write_file(csv_out, mts::comparison_csv(c));
    } else if (*gen) {
      mts::save_instance(mts::make_preset(preset, seed, d_sig), out_dir);
      std::cout << "wrote " << out_dir << '\n';
    }
  } catch (const mts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mts::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
