#include "mtsched/learner/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "mtsched/core/errors.hpp"

namespace mts {

double LrSchedule::at(std::int64_t step) const {
  if (total_steps <= 0) return final;
  const double frac = std::clamp(static_cast<double>(step) / static_cast<double>(total_steps), 0.0, 1.0);
  return initial + (final - initial) * frac;
}

RmsProp::RmsProp(std::size_t n, double decay, double epsilon) : decay_(decay), epsilon_(epsilon), ms_(n, 0.0) {
  if (!(decay_ >= 0.0 && decay_ < 1.0)) throw ValidationError("learner.rms_decay", "must be in [0, 1)");
  if (!(epsilon_ > 0.0)) throw ValidationError("learner.rms_epsilon", "must be positive");
}

void RmsProp::apply(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != ms_.size() || grad.size() != ms_.size())
    throw DomainError("RmsProp: size mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i])) throw NumericalError("non-finite gradient coordinate", i);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double gi = grad[i];
    ms_[i] = decay_ * ms_[i] + (1.0 - decay_) * gi * gi;
    params[i] -= lr * gi / std::sqrt(ms_[i] + epsilon_);
  }
}

void RmsProp::set_mean_square(std::vector<double> ms) {
  if (ms.size() != ms_.size()) throw DomainError("RmsProp: accumulator size mismatch");
  ms_ = std::move(ms);
}

ParameterStore::ParameterStore(ActorCriticNet net, LrSchedule schedule, double rms_decay, double rms_epsilon)
    : net_(std::move(net)), opt_(net_.param_count(), rms_decay, rms_epsilon), schedule_(schedule) {}

void ParameterStore::read_into(ActorCriticNet& net) const {
  std::shared_lock lock(mu_);
  net.set_params(net_.params());
}

ActorCriticNet ParameterStore::snapshot() const {
  std::shared_lock lock(mu_);
  return net_;
}

void ParameterStore::apply(std::span<const double> grad) {
  std::unique_lock lock(mu_);
  opt_.apply(net_.params(), grad, schedule_.at(steps_));
  ++updates_;
}

void ParameterStore::advance_steps(std::int64_t n) {
  std::unique_lock lock(mu_);
  steps_ += n;
}

std::int64_t ParameterStore::steps() const {
  std::shared_lock lock(mu_);
  return steps_;
}

std::int64_t ParameterStore::updates() const {
  std::shared_lock lock(mu_);
  return updates_;
}

RmsProp ParameterStore::optimizer() const {
  std::shared_lock lock(mu_);
  return opt_;
}

std::uint64_t ParameterStore::checksum() const {
  std::shared_lock lock(mu_);
  return mts::checksum(net_.params());
}

void ParameterStore::restore(const ActorCriticNet& net, std::vector<double> mean_square, std::int64_t steps,
                             std::int64_t updates) {
  std::unique_lock lock(mu_);
  if (!(net.shape() == net_.shape())) throw DomainError("ParameterStore::restore: shape mismatch");
  net_ = net;
  opt_.set_mean_square(std::move(mean_square));
  steps_ = steps;
  updates_ = updates;
}

}  // namespace mts
