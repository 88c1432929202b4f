#include "mtsched/core/instance.hpp"

#include <cmath>
#include <set>

#include "mtsched/core/errors.hpp"

namespace mts {

std::optional<std::size_t> MultiTaskInstance::find(std::string_view task_name) const {
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].name == task_name) return i;
  return std::nullopt;
}

void validate(const MultiTaskInstance& inst) {
  if (inst.k() < 2) throw ValidationError("instance.tasks", "need at least two tasks");
  if (inst.targets.size() != inst.k())
    throw ValidationError("instance.targets", "every task needs exactly one target");
  if (inst.union_action_count < 2) throw ValidationError("instance.union_action_count", "must be >= 2");
  if (inst.episode_cap < 1) throw ValidationError("instance.episode_cap", "must be positive");

  std::set<std::string> names;
  const std::size_t d_sig = inst.signature_dim();
  if (d_sig == 0) throw ValidationError("instance.signature", "signature dimension must be positive");
  for (const auto& t : inst.tasks) {
    if (t.name.empty() || !names.insert(t.name).second)
      throw ValidationError("instance.tasks", "task names must be unique and non-empty");
    if (t.action_count() > inst.union_action_count)
      throw ValidationError("instance.union_action_count",
                            "smaller than the action count of task '" + t.name + "'");
    if (t.signature.size() != d_sig)
      throw ValidationError("instance.signature", "all signatures must share one dimension");
    validate_params(t, inst.episode_cap);
  }
  for (std::size_t i = 0; i < inst.k(); ++i) {
    for (std::size_t j = i + 1; j < inst.k(); ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < d_sig; ++c) {
        const double d = inst.tasks[i].signature[c] - inst.tasks[j].signature[c];
        d2 += d * d;
      }
      if (!(d2 > 0.0))
        throw ValidationError("instance.signature",
                              "tasks '" + inst.tasks[i].name + "' and '" + inst.tasks[j].name +
                                  "' share a signature");
    }
  }
}

}  // namespace mts
