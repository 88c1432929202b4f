#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "mtsched/core/instance.hpp"

namespace mts {

/// JSON form of an instance; targets are stored as the effective per-task values.
nlohmann::json instance_to_json(const MultiTaskInstance& inst);
MultiTaskInstance instance_from_json(const nlohmann::json& j);

void save_instance(const MultiTaskInstance& inst, const std::filesystem::path& path);
MultiTaskInstance load_instance(const std::filesystem::path& path);

/// Stable hash of the serialized instance, used to check that runs are comparable.
std::string instance_fingerprint(const MultiTaskInstance& inst);

}  // namespace mts
