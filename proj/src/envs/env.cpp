#include "mtsched/envs/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtsched/core/errors.hpp"
#include "mtsched/core/instance.hpp"

namespace mts {

Env::Env(const TaskDescriptor& task, int union_action_count, int episode_cap)
    : signature_(task.signature),
      union_actions_(union_action_count),
      native_actions_(task.action_count()),
      cap_(episode_cap) {
  if (union_actions_ < native_actions_)
    throw ValidationError("union_action_count", "smaller than task '" + task.name + "' action count");
  if (cap_ < 1) throw ValidationError("episode_cap", "must be positive");
}

Observation Env::observe() const {
  Observation obs(signature_.size() + kStateDim, 0.0);
  std::copy(signature_.begin(), signature_.end(), obs.begin());
  encode_state(std::span<double>(obs).subspan(signature_.size()));
  return obs;
}

Observation Env::reset(Rng& rng) {
  steps_ = 0;
  done_ = false;
  started_ = true;
  reset_state(rng);
  return observe();
}

StepResult Env::step(int action, Rng& rng) {
  if (!started_) throw DomainError("Env::step before reset");
  if (done_) throw DomainError("Env::step after the episode ended");
  if (action < 0 || action >= union_actions_)
    throw DomainError("Env::step: action " + std::to_string(action) + " outside the union action space");
  StepResult r;
  bool terminal = false;
  if (action < native_actions_) r.reward = transition(action, rng, terminal);
  ++steps_;
  done_ = terminal || time_limit_reached() || steps_ >= cap_;
  r.done = done_;
  r.obs = observe();
  return r;
}

namespace {

class ChainEnv final : public Env {
 public:
  ChainEnv(const TaskDescriptor& t, int u, int cap) : Env(t, u, cap), p_(std::get<ChainParams>(t.params)) {}
  int optimal_action() const override { return 1; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<ChainEnv>(*this); }

 protected:
  void reset_state(Rng&) override { pos_ = 0; }
  double transition(int action, Rng& rng, bool& terminal) override {
    if (p_.slip > 0.0 && rng.bernoulli(p_.slip)) {
      terminal = true;
      return 0.0;
    }
    pos_ = action == 1 ? pos_ + 1 : std::max(pos_ - 1, 0);
    if (pos_ >= p_.length) {
      terminal = true;
      return 1.0;
    }
    return 0.0;
  }
  void encode_state(std::span<double> out) const override {
    out[0] = static_cast<double>(pos_) / p_.length;
  }

 private:
  ChainParams p_;
  int pos_ = 0;
};

class BanditEnv final : public Env {
 public:
  BanditEnv(const TaskDescriptor& t, int u, int cap) : Env(t, u, cap), p_(std::get<BanditParams>(t.params)) {
    best_ = static_cast<int>(std::max_element(p_.payoffs.begin(), p_.payoffs.end()) - p_.payoffs.begin());
  }
  int optimal_action() const override { return best_; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<BanditEnv>(*this); }

 protected:
  void reset_state(Rng&) override {}
  double transition(int action, Rng& rng, bool&) override {
    return rng.bernoulli(p_.payoffs[static_cast<std::size_t>(action)]) ? 1.0 : 0.0;
  }
  bool time_limit_reached() const override { return steps() >= p_.horizon; }
  void encode_state(std::span<double> out) const override {
    out[0] = static_cast<double>(steps()) / p_.horizon;
  }

 private:
  BanditParams p_;
  int best_ = 0;
};

constexpr int kDx[4] = {0, 0, -1, 1};
constexpr int kDy[4] = {-1, 1, 0, 0};

class GridEnv final : public Env {
 public:
  GridEnv(const TaskDescriptor& t, int u, int cap)
      : Env(t, u, cap), p_(std::get<GridParams>(t.params)), values_(grid_values(p_)) {}
  int optimal_action() const override;
  std::unique_ptr<Env> clone() const override { return std::make_unique<GridEnv>(*this); }

 protected:
  void reset_state(Rng&) override { x_ = y_ = 0; }
  double transition(int action, Rng& rng, bool& terminal) override {
    int a = action;
    if (p_.slip > 0.0 && rng.bernoulli(p_.slip)) a = static_cast<int>(rng.below(4));
    x_ = std::clamp(x_ + kDx[a], 0, p_.width - 1);
    y_ = std::clamp(y_ + kDy[a], 0, p_.height - 1);
    double r = -p_.step_cost;
    if (x_ == p_.goal_x && y_ == p_.goal_y) {
      terminal = true;
      r += p_.goal_reward;
    }
    return r;
  }
  void encode_state(std::span<double> out) const override {
    const double w = p_.width - 1, h = p_.height - 1;
    out[0] = x_ / w;
    out[1] = y_ / h;
    out[2] = (p_.goal_x - x_) / w;
    out[3] = (p_.goal_y - y_) / h;
  }

 private:
  GridParams p_;
  std::vector<double> values_;
  int x_ = 0;
  int y_ = 0;
};

double grid_q(const GridParams& p, const std::vector<double>& v, int x, int y, int a) {
  auto outcome = [&](int dir) {
    const int nx = std::clamp(x + kDx[dir], 0, p.width - 1);
    const int ny = std::clamp(y + kDy[dir], 0, p.height - 1);
    const bool goal = nx == p.goal_x && ny == p.goal_y;
    return -p.step_cost + (goal ? p.goal_reward : v[static_cast<std::size_t>(ny * p.width + nx)]);
  };
  double q = (1.0 - p.slip) * outcome(a);
  if (p.slip > 0.0) {
    for (int d = 0; d < 4; ++d) q += 0.25 * p.slip * outcome(d);
  }
  return q;
}

int GridEnv::optimal_action() const {
  int best = 0;
  double best_q = -INFINITY;
  for (int a = 0; a < 4; ++a) {
    const double q = grid_q(p_, values_, x_, y_, a);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = a;
    }
  }
  return best;
}

}  // namespace

std::vector<double> grid_values(const GridParams& p, double tolerance) {
  const auto n = static_cast<std::size_t>(p.width * p.height);
  std::vector<double> v(n, 0.0), next(n, 0.0);
  const auto goal = static_cast<std::size_t>(p.goal_y * p.width + p.goal_x);
  for (int iter = 0; iter < 1'000'000; ++iter) {
    double delta = 0.0;
    for (int y = 0; y < p.height; ++y) {
      for (int x = 0; x < p.width; ++x) {
        const auto s = static_cast<std::size_t>(y * p.width + x);
        if (s == goal) {
          next[s] = 0.0;
          continue;
        }
        double best = -INFINITY;
        for (int a = 0; a < 4; ++a) best = std::max(best, grid_q(p, v, x, y, a));
        next[s] = best;
        delta = std::max(delta, std::abs(next[s] - v[s]));
      }
    }
    v.swap(next);
    if (delta < tolerance) return v;
  }
  throw DomainError("grid_values: value iteration did not converge");
}

std::unique_ptr<Env> make_env(const TaskDescriptor& task, int union_action_count, int episode_cap) {
  switch (task.family()) {
    case Family::chain: return std::make_unique<ChainEnv>(task, union_action_count, episode_cap);
    case Family::bandit_room: return std::make_unique<BanditEnv>(task, union_action_count, episode_cap);
    case Family::grid_nav: return std::make_unique<GridEnv>(task, union_action_count, episode_cap);
  }
  throw DomainError("make_env: unsupported task family");
}

double oracle_target(const TaskDescriptor& task) {
  if (const auto* c = std::get_if<ChainParams>(&task.params))
    return std::pow(1.0 - c->slip, c->length);
  if (const auto* b = std::get_if<BanditParams>(&task.params))
    return b->horizon * *std::max_element(b->payoffs.begin(), b->payoffs.end());
  if (const auto* g = std::get_if<GridParams>(&task.params)) return grid_values(*g).front();
  throw DomainError("oracle_target: unsupported task family");
}

}  // namespace mts
