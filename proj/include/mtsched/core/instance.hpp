#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtsched/core/targets.hpp"
#include "mtsched/envs/task.hpp"

namespace mts {

/// Size of the per-family state-feature block appended after the signature.
inline constexpr std::size_t kStateDim = 4;

/// A fixed set of tasks learned by one shared agent, with their target scores.
struct MultiTaskInstance {
  std::string name;
  std::vector<TaskDescriptor> tasks;
  TargetRegistry targets;
  int union_action_count = 4;
  int episode_cap = 200;

  std::size_t k() const noexcept { return tasks.size(); }
  std::size_t signature_dim() const { return tasks.empty() ? 0 : tasks.front().signature.size(); }
  std::size_t obs_dim() const { return signature_dim() + kStateDim; }
  std::optional<std::size_t> find(std::string_view task_name) const;

  friend bool operator==(const MultiTaskInstance&, const MultiTaskInstance&) = default;
};

/// Checks k >= 2, target coverage, action-space bounds and signature uniqueness.
void validate(const MultiTaskInstance& inst);

}  // namespace mts
