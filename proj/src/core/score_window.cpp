#include "mtsched/core/score_window.hpp"

#include <numeric>

#include "mtsched/core/errors.hpp"

namespace mts {

ScoreWindow::ScoreWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw DomainError("ScoreWindow: capacity must be at least 1");
}

void ScoreWindow::push(double score) {
  scores_.push_back(score);
  while (scores_.size() > capacity_) scores_.pop_front();
}

std::optional<double> window_average(const ScoreWindow& w) {
  if (w.empty()) return std::nullopt;
  const auto& s = w.scores();
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

double window_average_or_zero(const ScoreWindow& w) { return window_average(w).value_or(0.0); }

double normalized_lag(double a, double ta) {
  if (!(ta > 0.0)) throw DomainError("normalized_lag: target must be positive");
  return (ta - a) / ta;
}

}  // namespace mts
