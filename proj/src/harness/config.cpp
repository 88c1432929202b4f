#include "mtsched/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "mtsched/core/errors.hpp"
#include "mtsched/core/format.hpp"
#include "mtsched/envs/instance_io.hpp"
#include "mtsched/envs/presets.hpp"

namespace mts {

namespace {

namespace pt = boost::property_tree;

struct BadValue {
  std::string why;
};

double to_double(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw BadValue{"expected a number"};
  return v;
}

template <typename Int>
Int to_int(const std::string& s) {
  Int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw BadValue{"expected an integer"};
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw BadValue{"expected true or false"};
}

std::vector<std::size_t> to_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(to_int<std::size_t>(item));
  }
  if (out.empty()) throw BadValue{"expected a comma-separated list of integers"};
  return out;
}

std::string from_list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
Field dbl(std::string key, T RunConfig::*sec, double T::*m) {
  return {key, [=](const RunConfig& c) { return format_double(c.*sec.*m); },
          [=](RunConfig& c, const std::string& s) { c.*sec.*m = to_double(s); }};
}
template <typename T, typename I>
Field integer(std::string key, T RunConfig::*sec, I T::*m) {
  return {key, [=](const RunConfig& c) { return std::to_string(c.*sec.*m); },
          [=](RunConfig& c, const std::string& s) { c.*sec.*m = to_int<I>(s); }};
}
template <typename T>
Field boolean(std::string key, T RunConfig::*sec, bool T::*m) {
  return {key, [=](const RunConfig& c) { return from_bool(c.*sec.*m); },
          [=](RunConfig& c, const std::string& s) { c.*sec.*m = to_bool(s); }};
}
template <typename T>
Field list(std::string key, T RunConfig::*sec, std::vector<std::size_t> T::*m) {
  return {key, [=](const RunConfig& c) { return from_list(c.*sec.*m); },
          [=](RunConfig& c, const std::string& s) { c.*sec.*m = to_list(s); }};
}
template <typename T>
Field text(std::string key, T RunConfig::*sec, std::string T::*m) {
  return {key, [=](const RunConfig& c) { return c.*sec.*m; },
          [=](RunConfig& c, const std::string& s) { c.*sec.*m = s; }};
}

using I = RunConfig::Instance;
using S = RunConfig::Scheduler;
using L = RunConfig::Learner;
using E = RunConfig::Eval;

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
       [](RunConfig& c, const std::string& s) { c.seed = to_int<std::uint64_t>(s); }},
      {"total_steps", [](const RunConfig& c) { return std::to_string(c.total_steps); },
       [](RunConfig& c, const std::string& s) { c.total_steps = to_int<std::int64_t>(s); }},
      {"warmup_steps", [](const RunConfig& c) { return std::to_string(c.warmup_steps); },
       [](RunConfig& c, const std::string& s) { c.warmup_steps = to_int<std::int64_t>(s); }},
      text("instance.preset", &RunConfig::instance, &I::preset),
      text("instance.file", &RunConfig::instance, &I::file),
      integer("instance.d_sig", &RunConfig::instance, &I::d_sig),
      integer("instance.signature_seed", &RunConfig::instance, &I::signature_seed),
      {"instance.target_mode",
       [](const RunConfig& c) { return std::string(c.instance.target_mode == TargetMode::fixed ? "fixed" : "doubling"); },
       [](RunConfig& c, const std::string& s) {
         if (s == "fixed") c.instance.target_mode = TargetMode::fixed;
         else if (s == "doubling") c.instance.target_mode = TargetMode::doubling;
         else throw BadValue{"expected fixed or doubling"};
       }},
      dbl("instance.target_multiplier", &RunConfig::instance, &I::target_multiplier),
      {"scheduler.kind", [](const RunConfig& c) { return std::string(scheduler_kind_name(c.scheduler.kind)); },
       [](RunConfig& c, const std::string& s) {
         try {
           c.scheduler.kind = parse_scheduler_kind(s);
         } catch (const DomainError& e) {
           throw BadValue{e.what()};
         }
       }},
      dbl("scheduler.tau", &RunConfig::scheduler, &S::tau),
      integer("scheduler.window", &RunConfig::scheduler, &S::window),
      boolean("scheduler.fill_windows", &RunConfig::scheduler, &S::fill_windows),
      dbl("scheduler.ucb_gamma", &RunConfig::scheduler, &S::ucb_gamma),
      dbl("scheduler.ucb_beta", &RunConfig::scheduler, &S::ucb_beta),
      dbl("scheduler.lambda", &RunConfig::scheduler, &S::lambda),
      integer("scheduler.worst_count", &RunConfig::scheduler, &S::worst_count),
      {"scheduler.reward_mode", [](const RunConfig& c) { return std::string(meta_reward_mode_name(c.scheduler.reward_mode)); },
       [](RunConfig& c, const std::string& s) {
         try {
           c.scheduler.reward_mode = parse_meta_reward_mode(s);
         } catch (const DomainError& e) {
           throw BadValue{e.what()};
         }
       }},
      list("scheduler.meta_hidden", &RunConfig::scheduler, &S::meta_hidden),
      boolean("scheduler.meta_recurrent", &RunConfig::scheduler, &S::meta_recurrent),
      dbl("scheduler.meta_gamma", &RunConfig::scheduler, &S::meta_gamma),
      dbl("scheduler.meta_entropy_beta", &RunConfig::scheduler, &S::meta_entropy_beta),
      dbl("scheduler.meta_lr_initial", &RunConfig::scheduler, &S::meta_lr_initial),
      dbl("scheduler.meta_lr_final", &RunConfig::scheduler, &S::meta_lr_final),
      integer("scheduler.segment_steps", &RunConfig::scheduler, &S::segment_steps),
      integer("scheduler.fine_target_episodes", &RunConfig::scheduler, &S::fine_target_episodes),
      list("learner.hidden", &RunConfig::learner, &L::hidden),
      boolean("learner.recurrent", &RunConfig::learner, &L::recurrent),
      boolean("learner.heads", &RunConfig::learner, &L::heads),
      dbl("learner.gamma", &RunConfig::learner, &L::gamma),
      integer("learner.n_step", &RunConfig::learner, &L::n_step),
      dbl("learner.entropy_beta", &RunConfig::learner, &L::entropy_beta),
      dbl("learner.lr_initial", &RunConfig::learner, &L::lr_initial),
      dbl("learner.lr_final", &RunConfig::learner, &L::lr_final),
      dbl("learner.rms_decay", &RunConfig::learner, &L::rms_decay),
      dbl("learner.rms_epsilon", &RunConfig::learner, &L::rms_epsilon),
      integer("learner.workers", &RunConfig::learner, &L::workers),
      integer("eval.interval", &RunConfig::eval, &E::interval),
      integer("eval.episodes", &RunConfig::eval, &E::episodes),
      integer("eval.cap", &RunConfig::eval, &E::cap),
      integer("eval.checkpoint_interval", &RunConfig::eval, &E::checkpoint_interval),
  };
  return f;
}

void assign(RunConfig& c, const std::string& key, const std::string& value, std::size_t line) {
  if (key.rfind("targets.", 0) == 0) {
    const std::string task = key.substr(8);
    if (task.empty()) throw ConfigError("empty task name in targets section", key, line);
    try {
      c.instance.targets[task] = to_double(value);
    } catch (const BadValue& b) {
      throw ConfigError(key + ": " + b.why + ", got '" + value + "'", key, line);
    }
    return;
  }
  for (const auto& f : fields()) {
    if (f.key != key) continue;
    try {
      f.set(c, value);
    } catch (const BadValue& b) {
      throw ConfigError(key + ": " + b.why + ", got '" + value + "'", key, line);
    }
    return;
  }
  throw ConfigError("unknown key '" + key + "'", key, line);
}

/// Maps "section.key" to the line it appears on, for error messages.
std::map<std::string, std::size_t> key_lines(const std::string& text) {
  std::map<std::string, std::size_t> out;
  std::istringstream in(text);
  std::string line, section;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == ';' || line[b] == '#') continue;
    if (line[b] == '[') {
      const auto e = line.find(']', b);
      section = line.substr(b + 1, e == std::string::npos ? std::string::npos : e - b - 1);
      continue;
    }
    const auto eq = line.find('=', b);
    if (eq == std::string::npos) continue;
    std::string key = line.substr(b, eq - b);
    key.erase(key.find_last_not_of(" \t") + 1);
    out.emplace(section.empty() ? key : section + "." + key, n);
  }
  return out;
}

void apply_overrides(RunConfig& c, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value", o, 0);
    assign(c, o.substr(0, eq), o.substr(eq + 1), 0);
  }
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + e.message(), "", e.line());
  }
  const auto lines = key_lines(text);
  auto line_of = [&](const std::string& k) {
    auto it = lines.find(k);
    return it == lines.end() ? std::size_t{0} : it->second;
  };
  RunConfig c;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      assign(c, name, node.data(), line_of(name));
      continue;
    }
    static const std::vector<std::string> sections = {"instance", "targets", "scheduler", "learner", "eval"};
    if (std::find(sections.begin(), sections.end(), name) == sections.end())
      throw ConfigError("unknown section [" + name + "]", name, 0);
    for (const auto& [key, leaf] : node) {
      const std::string full = name + "." + key;
      if (!leaf.empty()) throw ConfigError("nested key '" + full + "'", full, line_of(full));
      assign(c, full, leaf.data(), line_of(full));
    }
  }
  apply_overrides(c, overrides);
  validate_config(c);
  return c;
}

RunConfig parse_config_string(const std::string& text, const std::vector<std::string>& overrides) {
  std::istringstream in(text);
  return parse_config(in, overrides);
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), "", 0);
  return parse_config(in, overrides);
}

RunConfig config_from_overrides(const std::vector<std::string>& overrides) {
  RunConfig c;
  apply_overrides(c, overrides);
  validate_config(c);
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = dot == std::string::npos ? "" : f.key.substr(0, dot);
    const std::string name = dot == std::string::npos ? f.key : f.key.substr(dot + 1);
    if (sec != section) {
      if (section == "instance" && !c.instance.targets.empty()) {
        out += "\n[targets]\n";
        for (const auto& [task, v] : c.instance.targets) out += task + " = " + format_double(v) + "\n";
      }
      out += "\n[" + sec + "]\n";
      section = sec;
    }
    out += name + " = " + f.get(c) + "\n";
  }
  return out;
}

void validate_config(const RunConfig& c) {
  auto fail = [](const char* field, const std::string& why) { throw ValidationError(field, why); };
  if (c.total_steps <= 0) fail("total_steps", "must be positive");
  if (c.warmup_steps < 0) fail("warmup_steps", "must be >= 0");
  if (c.instance.file.empty()) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), c.instance.preset) == names.end())
      fail("instance.preset", "unknown preset '" + c.instance.preset + "'");
  }
  if (c.instance.d_sig == 0) fail("instance.d_sig", "must be >= 1");
  if (!finite_positive(c.instance.target_multiplier)) fail("instance.target_multiplier", "must be positive");
  for (const auto& [task, v] : c.instance.targets)
    if (!finite_positive(v)) throw ValidationError("targets." + task, "must be positive");
  if (c.instance.target_mode == TargetMode::doubling && c.scheduler.kind != SchedulerKind::ua4c &&
      c.scheduler.kind != SchedulerKind::dua4c)
    fail("instance.target_mode", "doubling targets are only used by the ua4c/dua4c schedulers");
  const auto& s = c.scheduler;
  if (!finite_positive(s.tau)) fail("scheduler.tau", "must be positive");
  if (s.window == 0) fail("scheduler.window", "must be >= 1");
  if (!(s.ucb_gamma > 0.0 && s.ucb_gamma <= 1.0)) fail("scheduler.ucb_gamma", "must lie in (0, 1]");
  if (!(s.ucb_beta >= 0.0) || !std::isfinite(s.ucb_beta)) fail("scheduler.ucb_beta", "must be >= 0");
  if (!(s.lambda >= 0.0 && s.lambda <= 1.0)) fail("scheduler.lambda", "must lie in [0, 1]");
  if (s.meta_hidden.empty() || std::count(s.meta_hidden.begin(), s.meta_hidden.end(), 0u))
    fail("scheduler.meta_hidden", "widths must be >= 1");
  if (!(s.meta_gamma >= 0.0 && s.meta_gamma <= 1.0)) fail("scheduler.meta_gamma", "must lie in [0, 1]");
  if (!(s.meta_entropy_beta >= 0.0) || !std::isfinite(s.meta_entropy_beta))
    fail("scheduler.meta_entropy_beta", "must be >= 0");
  if (!finite_positive(s.meta_lr_initial)) fail("scheduler.meta_lr_initial", "must be positive");
  if (!finite_positive(s.meta_lr_final)) fail("scheduler.meta_lr_final", "must be positive");
  if (s.segment_steps == 0) fail("scheduler.segment_steps", "must be >= 1");
  if (s.fine_target_episodes == 0) fail("scheduler.fine_target_episodes", "must be >= 1");
  const auto& l = c.learner;
  if (l.hidden.empty() || std::count(l.hidden.begin(), l.hidden.end(), 0u)) fail("learner.hidden", "widths must be >= 1");
  if (!(l.gamma >= 0.0 && l.gamma <= 1.0)) fail("learner.gamma", "must lie in [0, 1]");
  if (l.n_step == 0) fail("learner.n_step", "must be >= 1");
  if (!(l.entropy_beta >= 0.0) || !std::isfinite(l.entropy_beta)) fail("learner.entropy_beta", "must be >= 0");
  if (!finite_positive(l.lr_initial)) fail("learner.lr_initial", "must be positive");
  if (!finite_positive(l.lr_final)) fail("learner.lr_final", "must be positive");
  if (!(l.rms_decay >= 0.0 && l.rms_decay < 1.0)) fail("learner.rms_decay", "must lie in [0, 1)");
  if (!finite_positive(l.rms_epsilon)) fail("learner.rms_epsilon", "must be positive");
  if (l.workers == 0) fail("learner.workers", "must be >= 1");
  if (c.eval.interval < 0) fail("eval.interval", "must be >= 0");
  if (c.eval.episodes == 0) fail("eval.episodes", "must be >= 1");
  if (c.eval.cap <= 0) fail("eval.cap", "must be >= 1");
  if (c.eval.checkpoint_interval < 0) fail("eval.checkpoint_interval", "must be >= 0");
}

MultiTaskInstance build_instance(const RunConfig& c) {
  MultiTaskInstance inst =
      c.instance.file.empty() ? make_preset(c.instance.preset, c.instance.signature_seed, c.instance.d_sig) : load_instance(c.instance.file);
  std::vector<double> base(inst.targets.values().begin(), inst.targets.values().end());
  for (const auto& [task, v] : c.instance.targets) {
    const auto idx = inst.find(task);
    if (!idx) throw ValidationError("targets." + task, "no task named '" + task + "' in instance " + inst.name);
    base[*idx] = v;
  }
  inst.targets = TargetRegistry(std::move(base), c.instance.target_multiplier);
  validate(inst);
  if (c.scheduler.worst_count > inst.k()) throw ValidationError("scheduler.worst_count", "exceeds the task count");
  return inst;
}

SchedulerSettings scheduler_settings(const RunConfig& c) {
  SchedulerSettings s;
  s.kind = c.scheduler.kind;
  if (s.kind == SchedulerKind::ua4c && c.instance.target_mode == TargetMode::doubling) s.kind = SchedulerKind::dua4c;
  s.tau = c.scheduler.tau;
  s.window = c.scheduler.window;
  s.warmup_steps = c.warmup_steps;
  s.fill_windows = c.scheduler.fill_windows;
  s.ucb_gamma = c.scheduler.ucb_gamma;
  s.ucb_beta = c.scheduler.ucb_beta;
  s.lambda = c.scheduler.lambda;
  s.worst_count = c.scheduler.worst_count;
  s.reward_mode = c.scheduler.reward_mode;
  s.meta.hidden = c.scheduler.meta_hidden;
  s.meta.recurrent = c.scheduler.meta_recurrent;
  s.meta.gamma = c.scheduler.meta_gamma;
  s.meta.entropy_beta = c.scheduler.meta_entropy_beta;
  s.meta.lr = LrSchedule{c.scheduler.meta_lr_initial, c.scheduler.meta_lr_final, c.total_steps};
  s.meta.rms_decay = c.learner.rms_decay;
  s.meta.rms_epsilon = c.learner.rms_epsilon;
  s.segment_steps = c.scheduler.segment_steps;
  return s;
}

LearnerParams learner_params(const RunConfig& c) {
  LearnerParams p;
  p.gamma = c.learner.gamma;
  p.n_step = c.learner.n_step;
  p.entropy_beta = c.learner.entropy_beta;
  return p;
}

NetShape learner_shape(const RunConfig& c, const MultiTaskInstance& inst) {
  NetShape s;
  s.input_dim = inst.obs_dim();
  s.hidden = c.learner.hidden;
  s.actions = static_cast<std::size_t>(inst.union_action_count);
  s.recurrent = c.learner.recurrent;
  s.heads = c.learner.heads ? inst.k() : 0;
  return s;
}

LrSchedule learner_schedule(const RunConfig& c) {
  return LrSchedule{c.learner.lr_initial, c.learner.lr_final, c.total_steps};
}

EvalSpec eval_spec(const RunConfig& c) {
  EvalSpec e;
  e.episodes = c.eval.episodes;
  e.cap = c.eval.cap;
  e.seed = derive_seed(c.seed, "eval");
  return e;
}

}  // namespace mts
