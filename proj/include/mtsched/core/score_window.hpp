#pragma once

#include <cstddef>
#include <deque>
#include <optional>

namespace mts {

/// Rolling window of the most recent training scores of one task.
class ScoreWindow {
 public:
  explicit ScoreWindow(std::size_t capacity = 10);

  /// Appends a score; once full, the oldest entry is evicted first.
  void push(double score);

  std::size_t size() const noexcept { return scores_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return scores_.empty(); }
  bool full() const noexcept { return scores_.size() == capacity_; }
  const std::deque<double>& scores() const noexcept { return scores_; }

 private:
  std::size_t capacity_;
  std::deque<double> scores_;
};

/// Arithmetic mean of the stored scores, or nullopt when there is no estimate yet.
std::optional<double> window_average(const ScoreWindow& w);

/// Mean used by the schedulers: an empty window counts as a score of 0
/// (maximal lag), which is what the uniform warmup assumes.
double window_average_or_zero(const ScoreWindow& w);

/// (ta - a) / ta. Throws DomainError when ta <= 0.
double normalized_lag(double a, double ta);

}  // namespace mts
