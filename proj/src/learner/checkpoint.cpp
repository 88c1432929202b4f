#include "mtsched/learner/checkpoint.hpp"

#include <fstream>

#include "mtsched/core/errors.hpp"

namespace mts {

using nlohmann::json;

json shape_to_json(const NetShape& s) {
  return {{"input_dim", s.input_dim}, {"hidden", s.hidden}, {"actions", s.actions},
          {"recurrent", s.recurrent}, {"heads", s.heads}};
}

NetShape shape_from_json(const json& j) {
  NetShape s;
  s.input_dim = j.at("input_dim").get<std::size_t>();
  s.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  s.actions = j.at("actions").get<std::size_t>();
  s.recurrent = j.at("recurrent").get<bool>();
  s.heads = j.at("heads").get<std::size_t>();
  return s;
}

std::unique_ptr<ParameterStore> Checkpoint::make_store() const {
  auto store = std::make_unique<ParameterStore>(net, schedule, rms_decay, rms_epsilon);
  store->restore(net, mean_square, steps, updates);
  return store;
}

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& store, const json& extra) {
  const ActorCriticNet net = store.snapshot();
  const RmsProp opt = store.optimizer();
  const auto params = net.params();
  json j = {{"format", "mtsched-checkpoint"},
            {"version", kCheckpointVersion},
            {"shape", shape_to_json(net.shape())},
            {"params", std::vector<double>(params.begin(), params.end())},
            {"mean_square", opt.mean_square()},
            {"steps", store.steps()},
            {"updates", store.updates()},
            {"rms", {{"decay", opt.decay()}, {"epsilon", opt.epsilon()}}},
            {"lr",
             {{"initial", store.schedule().initial},
              {"final", store.schedule().final},
              {"total_steps", store.schedule().total_steps}}},
            {"extra", extra}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read checkpoint " + path.string());
  try {
    json j;
    in >> j;
    if (j.value("format", "") != "mtsched-checkpoint") throw Error("not a checkpoint file: " + path.string());
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw Error("unsupported checkpoint version in " + path.string());
    Checkpoint c;
    c.net = ActorCriticNet(shape_from_json(j.at("shape")));
    c.net.set_params(j.at("params").get<std::vector<double>>());
    c.mean_square = j.at("mean_square").get<std::vector<double>>();
    c.steps = j.at("steps").get<std::int64_t>();
    c.updates = j.at("updates").get<std::int64_t>();
    c.rms_decay = j.at("rms").at("decay").get<double>();
    c.rms_epsilon = j.at("rms").at("epsilon").get<double>();
    c.schedule.initial = j.at("lr").at("initial").get<double>();
    c.schedule.final = j.at("lr").at("final").get<double>();
    c.schedule.total_steps = j.at("lr").at("total_steps").get<std::int64_t>();
    c.extra = j.value("extra", json::object());
    return c;
  } catch (const json::exception& e) {
    throw Error("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace mts
