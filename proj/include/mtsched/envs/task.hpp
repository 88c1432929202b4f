#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mts {

enum class Family { chain, bandit_room, grid_nav };

std::string_view family_name(Family f);
Family parse_family(std::string_view s);

/// Walk right along positions 0..length. Action 0 moves left, 1 moves right.
/// Every move slips with probability `slip`, which ends the episode with no
/// reward. Reaching `length` pays 1 and ends the episode.
struct ChainParams {
  int length = 5;
  double slip = 0.0;
  friend bool operator==(const ChainParams&, const ChainParams&) = default;
};

/// Repeated arm pulls for `horizon` steps; arm i pays 1 with probability payoffs[i].
struct BanditParams {
  std::vector<double> payoffs{0.1, 0.9};
  int horizon = 10;
  friend bool operator==(const BanditParams&, const BanditParams&) = default;
};

/// Navigate from (0,0) to the goal cell. Actions: 0 up, 1 down, 2 left, 3 right.
/// With probability `slip` the move is replaced by a uniformly random direction.
/// Each step costs `step_cost`; entering the goal pays `goal_reward` and ends the episode.
struct GridParams {
  int width = 4;
  int height = 4;
  int goal_x = 3;
  int goal_y = 3;
  double slip = 0.0;
  double step_cost = 1.0;
  double goal_reward = 10.0;
  friend bool operator==(const GridParams&, const GridParams&) = default;
};

using TaskParams = std::variant<ChainParams, BanditParams, GridParams>;

struct TaskDescriptor {
  std::string name;
  TaskParams params;
  std::vector<double> signature;

  Family family() const { return static_cast<Family>(params.index()); }
  /// Number of native actions; union indices at or above this are no-ops.
  int action_count() const;

  friend bool operator==(const TaskDescriptor&, const TaskDescriptor&) = default;
};

/// Throws ValidationError when params fall outside their documented ranges.
void validate_params(const TaskDescriptor& task, int episode_cap);

}  // namespace mts
