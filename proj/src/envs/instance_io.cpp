#include "mtsched/envs/instance_io.hpp"

#include <cstdio>
#include <fstream>

#include "mtsched/core/errors.hpp"

namespace mts {

using nlohmann::json;

namespace {

json params_to_json(const TaskParams& params) {
  if (const auto* c = std::get_if<ChainParams>(&params))
    return {{"length", c->length}, {"slip", c->slip}};
  if (const auto* b = std::get_if<BanditParams>(&params))
    return {{"payoffs", b->payoffs}, {"horizon", b->horizon}};
  const auto& g = std::get<GridParams>(params);
  return {{"width", g.width},   {"height", g.height},       {"goal_x", g.goal_x},
          {"goal_y", g.goal_y}, {"slip", g.slip},           {"step_cost", g.step_cost},
          {"goal_reward", g.goal_reward}};
}

TaskParams params_from_json(Family f, const json& p) {
  switch (f) {
    case Family::chain: return ChainParams{p.at("length").get<int>(), p.value("slip", 0.0)};
    case Family::bandit_room:
      return BanditParams{p.at("payoffs").get<std::vector<double>>(), p.at("horizon").get<int>()};
    case Family::grid_nav: {
      GridParams g;
      g.width = p.at("width").get<int>();
      g.height = p.at("height").get<int>();
      g.goal_x = p.value("goal_x", g.width - 1);
      g.goal_y = p.value("goal_y", g.height - 1);
      g.slip = p.value("slip", 0.0);
      g.step_cost = p.value("step_cost", 1.0);
      g.goal_reward = p.value("goal_reward", 10.0);
      return g;
    }
  }
  throw DomainError("unsupported task family");
}

}  // namespace

json instance_to_json(const MultiTaskInstance& inst) {
  json tasks = json::array();
  for (std::size_t i = 0; i < inst.k(); ++i) {
    const auto& t = inst.tasks[i];
    tasks.push_back({{"name", t.name},
                     {"family", family_name(t.family())},
                     {"params", params_to_json(t.params)},
                     {"action_count", t.action_count()},
                     {"signature", t.signature},
                     {"target", inst.targets[i]}});
  }
  return {{"format", "mtsched-instance"},
          {"version", 1},
          {"name", inst.name},
          {"union_action_count", inst.union_action_count},
          {"episode_cap", inst.episode_cap},
          {"tasks", tasks}};
}

MultiTaskInstance instance_from_json(const json& j) {
  try {
    if (j.value("format", std::string()) != "mtsched-instance")
      throw ValidationError("instance.format", "expected \"mtsched-instance\"");
    if (j.value("version", 0) != 1) throw ValidationError("instance.version", "unsupported version");
    MultiTaskInstance inst;
    inst.name = j.value("name", std::string("unnamed"));
    inst.union_action_count = j.at("union_action_count").get<int>();
    inst.episode_cap = j.value("episode_cap", 200);
    std::vector<double> targets;
    for (const auto& t : j.at("tasks")) {
      TaskDescriptor d;
      d.name = t.at("name").get<std::string>();
      d.params = params_from_json(parse_family(t.at("family").get<std::string>()), t.at("params"));
      d.signature = t.at("signature").get<std::vector<double>>();
      if (t.contains("action_count") && t["action_count"].get<int>() != d.action_count())
        throw ValidationError("task '" + d.name + "'.action_count", "does not match the family parameters");
      targets.push_back(t.at("target").get<double>());
      inst.tasks.push_back(std::move(d));
    }
    inst.targets = TargetRegistry(std::move(targets));
    validate(inst);
    return inst;
  } catch (const json::exception& e) {
    throw ValidationError("instance", std::string("malformed instance file: ") + e.what());
  }
}

void save_instance(const MultiTaskInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file " + path.string());
  out << instance_to_json(inst).dump(2) << '\n';
}

MultiTaskInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read instance file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("instance", std::string("instance file is not valid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

std::string instance_fingerprint(const MultiTaskInstance& inst) {
  const std::string text = instance_to_json(inst).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mts
