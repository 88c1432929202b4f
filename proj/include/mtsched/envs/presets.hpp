#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mtsched/core/instance.hpp"

namespace mts {

/// Names accepted by make_preset: "SYN-6", "SYN-6-imbalanced", "SYN-12".
std::vector<std::string> preset_names();

/// Builds a shipped instance. Signatures are drawn from per-task streams derived
/// from `seed`; targets are the analytic optimal scores.
MultiTaskInstance make_preset(std::string_view name, std::uint64_t seed = 0, std::size_t d_sig = 8);

/// Fills signatures for tasks that have none, from streams derived from `seed`.
void assign_signatures(MultiTaskInstance& inst, std::uint64_t seed, std::size_t d_sig);

}  // namespace mts
