#include "mtsched/core/targets.hpp"

#include <cmath>

#include "mtsched/core/errors.hpp"

namespace mts {

TargetRegistry::TargetRegistry(std::vector<double> base, double multiplier)
    : mode_(TargetMode::fixed), multiplier_(multiplier), values_(std::move(base)) {
  if (!(multiplier_ > 0.0) || !std::isfinite(multiplier_))
    throw ValidationError("targets.multiplier", "must be a positive finite number");
  for (double& v : values_) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError("targets", "every target score must be positive and finite");
    v *= multiplier_;
  }
}

TargetRegistry TargetRegistry::doubling(std::size_t k, double initial) {
  TargetRegistry r(std::vector<double>(k, initial));
  r.mode_ = TargetMode::doubling;
  return r;
}

bool TargetRegistry::observe_score(std::size_t i, double score) {
  if (mode_ != TargetMode::doubling)
    throw DomainError("TargetRegistry: doubling update on a fixed registry");
  double& ta = values_.at(i);
  if (score >= ta) {
    ta *= 2.0;
    return true;
  }
  return false;
}

}  // namespace mts
