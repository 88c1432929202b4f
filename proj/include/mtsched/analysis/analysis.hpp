#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mtsched/core/instance.hpp"
#include "mtsched/learner/network.hpp"
#include "mtsched/metrics/metrics.hpp"

namespace mts {

/// f[i][j]: fraction of evaluated steps of task i where |h_j| >= fire_threshold.
struct FiringMatrix {
  std::vector<std::vector<double>> f;
  double fire_threshold = 0.3;
  double fraction_threshold = 0.01;

  std::size_t tasks() const noexcept { return f.size(); }
  std::size_t units() const noexcept { return f.empty() ? 0 : f.front().size(); }
  /// Number of tasks for which unit j fires (f_ij >= fraction_threshold).
  std::size_t task_count(std::size_t unit) const;
  bool fires_for(std::size_t task, std::size_t unit) const { return f.at(task).at(unit) >= fraction_threshold; }
};

/// Fraction of activations with magnitude >= threshold (0 for an empty series).
double firing_fraction(std::span<const double> activations, double threshold = 0.3);

/// Runs `spec.episodes` episodes per task and records the last hidden layer.
FiringMatrix firing_matrix(const ActorCriticNet& net, const MultiTaskInstance& inst, const EvalSpec& spec,
                           double fire_threshold = 0.3, double fraction_threshold = 0.01);

struct NeuronOrder {
  /// Unit indices, most widely firing first.
  std::vector<std::size_t> order;
  /// Task count of order[r]; this is the step curve to plot against r.
  std::vector<std::size_t> task_counts;
};

/// Descending by task count, then by sum over tasks of f, then ascending index.
NeuronOrder sort_neurons(const FiringMatrix& f);

struct TurnoffMatrix {
  /// A[i][j]: L1-normalized absolute percentage change of task i when unit j is off.
  std::vector<std::vector<double>> A;
  /// Variance over included tasks of each column.
  std::vector<double> variance;
  /// Unit indices sorted by ascending variance (ties by index).
  std::vector<std::size_t> order;
  /// Tasks whose baseline score is nonzero; only they enter a column.
  std::vector<bool> included;
  std::vector<double> baseline;
};

/// Builds the matrix from baseline scores and clamped scores (`clamped[j][i]`
/// is task i with unit j off). Throws DomainError when every baseline is 0.
TurnoffMatrix turnoff_from_scores(std::span<const double> baseline, const std::vector<std::vector<double>>& clamped);

/// Re-evaluates `net` once per last-layer hidden unit with that unit forced to 0.
TurnoffMatrix turnoff_matrix(const ActorCriticNet& net, const MultiTaskInstance& inst, const EvalSpec& spec);

/// unit,task_count,sum_f,f_<task>... in sorted order.
std::string firing_csv(const FiringMatrix& f, const NeuronOrder& order, const MultiTaskInstance& inst);
/// rank,unit,task_count
std::string firing_plot_data(const NeuronOrder& order);
/// rank,unit,variance,A_<task>... in ascending-variance order; excluded tasks are empty cells.
std::string turnoff_csv(const TurnoffMatrix& t, const MultiTaskInstance& inst);

}  // namespace mts
