#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mts {

enum class TargetMode { fixed, doubling };

/// Per-task target scores ta_i used to normalize performance.
///
/// In doubling mode the targets start at 1 and a target is doubled whenever the
/// agent reaches it, so values only ever grow by exact factors of two.
class TargetRegistry {
 public:
  TargetRegistry() = default;
  TargetRegistry(std::vector<double> base, double multiplier = 1.0);

  static TargetRegistry doubling(std::size_t k, double initial = 1.0);

  TargetMode mode() const noexcept { return mode_; }
  double multiplier() const noexcept { return multiplier_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_.at(i); }
  std::span<const double> values() const noexcept { return values_; }

  /// Doubling mode only: doubles ta_i when `score >= ta_i`. Returns whether it did.
  bool observe_score(std::size_t i, double score);

  friend bool operator==(const TargetRegistry&, const TargetRegistry&) = default;

 private:
  TargetMode mode_ = TargetMode::fixed;
  double multiplier_ = 1.0;
  std::vector<double> values_;
};

}  // namespace mts
