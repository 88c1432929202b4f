#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "mtsched/learner/network.hpp"
#include "mtsched/learner/optimizer.hpp"

namespace mts {

/// Everything needed to resume training: parameters, RMSProp accumulators,
/// step and update counters, and the learning-rate schedule.
struct Checkpoint {
  ActorCriticNet net;
  std::vector<double> mean_square;
  std::int64_t steps = 0;
  std::int64_t updates = 0;
  double rms_decay = 0.99;
  double rms_epsilon = 1e-8;
  LrSchedule schedule;
  nlohmann::json extra = nlohmann::json::object();

  /// A store holding exactly this state.
  std::unique_ptr<ParameterStore> make_store() const;
};

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& store,
                     const nlohmann::json& extra = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json shape_to_json(const NetShape& s);
NetShape shape_from_json(const nlohmann::json& j);

}  // namespace mts
