#include "mtsched/envs/task.hpp"

#include <cmath>
#include <string>

#include "mtsched/core/errors.hpp"

namespace mts {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::chain: return "chain";
    case Family::bandit_room: return "bandit_room";
    case Family::grid_nav: return "grid_nav";
  }
  return "unknown";
}

Family parse_family(std::string_view s) {
  if (s == "chain") return Family::chain;
  if (s == "bandit_room") return Family::bandit_room;
  if (s == "grid_nav") return Family::grid_nav;
  throw DomainError("unsupported task family '" + std::string(s) + "'");
}

int TaskDescriptor::action_count() const {
  struct Visitor {
    int operator()(const ChainParams&) const { return 2; }
    int operator()(const BanditParams& p) const { return static_cast<int>(p.payoffs.size()); }
    int operator()(const GridParams&) const { return 4; }
  };
  return std::visit(Visitor{}, params);
}

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ValidationError(field, why);
}

}  // namespace

void validate_params(const TaskDescriptor& task, int episode_cap) {
  const std::string where = "task '" + task.name + "'";
  if (const auto* c = std::get_if<ChainParams>(&task.params)) {
    require(c->length >= 1 && c->length <= episode_cap, where + ".length",
            "must be in [1, episode_cap]");
    require(c->slip >= 0.0 && c->slip < 1.0, where + ".slip", "must be in [0, 1)");
  } else if (const auto* b = std::get_if<BanditParams>(&task.params)) {
    require(b->payoffs.size() >= 2, where + ".payoffs", "need at least two arms");
    for (double p : b->payoffs)
      require(p >= 0.0 && p <= 1.0, where + ".payoffs", "payoffs must be in [0, 1]");
    require(b->horizon >= 1 && b->horizon <= episode_cap, where + ".horizon",
            "must be in [1, episode_cap]");
  } else if (const auto* g = std::get_if<GridParams>(&task.params)) {
    require(g->width >= 2 && g->height >= 2, where + ".size", "grid must be at least 2x2");
    require(g->goal_x >= 0 && g->goal_x < g->width && g->goal_y >= 0 && g->goal_y < g->height,
            where + ".goal", "goal must lie inside the grid");
    require(g->goal_x != 0 || g->goal_y != 0, where + ".goal", "goal must differ from the start cell");
    require(g->slip >= 0.0 && g->slip < 1.0, where + ".slip", "must be in [0, 1)");
    require(g->step_cost > 0.0 && std::isfinite(g->step_cost), where + ".step_cost",
            "must be positive");
    require(g->goal_reward > 0.0 && std::isfinite(g->goal_reward), where + ".goal_reward",
            "must be positive");
  }
  for (double v : task.signature)
    require(std::isfinite(v), where + ".signature", "entries must be finite");
}

}  // namespace mts
