#include "mtsched/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtsched/core/errors.hpp"
#include "mtsched/core/format.hpp"

namespace mts {

std::size_t FiringMatrix::task_count(std::size_t unit) const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < tasks(); ++i) c += fires_for(i, unit) ? 1 : 0;
  return c;
}

double firing_fraction(std::span<const double> activations, double threshold) {
  if (activations.empty()) return 0.0;
  std::size_t hits = 0;
  for (double h : activations) hits += std::abs(h) >= threshold ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(activations.size());
}

FiringMatrix firing_matrix(const ActorCriticNet& net, const MultiTaskInstance& inst, const EvalSpec& spec,
                           double fire_threshold, double fraction_threshold) {
  const std::size_t H = net.hidden_width();
  std::vector<std::vector<double>> hits(inst.k(), std::vector<double>(H, 0.0));
  std::vector<double> steps(inst.k(), 0.0);
  evaluate(net, inst, spec, [&](std::size_t task, std::span<const double> h) {
    steps[task] += 1.0;
    for (std::size_t j = 0; j < H; ++j) hits[task][j] += std::abs(h[j]) >= fire_threshold ? 1.0 : 0.0;
  });
  FiringMatrix m;
  m.fire_threshold = fire_threshold;
  m.fraction_threshold = fraction_threshold;
  m.f = std::move(hits);
  for (std::size_t i = 0; i < inst.k(); ++i)
    for (double& v : m.f[i]) v = steps[i] > 0.0 ? v / steps[i] : 0.0;
  return m;
}

NeuronOrder sort_neurons(const FiringMatrix& f) {
  const std::size_t H = f.units();
  std::vector<std::size_t> count(H);
  std::vector<double> sum(H, 0.0);
  for (std::size_t j = 0; j < H; ++j) {
    count[j] = f.task_count(j);
    for (std::size_t i = 0; i < f.tasks(); ++i) sum[j] += f.f[i][j];
  }
  NeuronOrder r;
  r.order.resize(H);
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    if (count[a] != count[b]) return count[a] > count[b];
    if (sum[a] != sum[b]) return sum[a] > sum[b];
    return a < b;
  });
  for (std::size_t j : r.order) r.task_counts.push_back(count[j]);
  return r;
}

TurnoffMatrix turnoff_from_scores(std::span<const double> baseline, const std::vector<std::vector<double>>& clamped) {
  const std::size_t k = baseline.size();
  const std::size_t H = clamped.size();
  TurnoffMatrix t;
  t.baseline.assign(baseline.begin(), baseline.end());
  t.included.resize(k);
  std::size_t n_in = 0;
  for (std::size_t i = 0; i < k; ++i) {
    t.included[i] = baseline[i] != 0.0;
    n_in += t.included[i] ? 1 : 0;
  }
  if (n_in == 0) throw DomainError("turnoff: every baseline score is 0");
  t.A.assign(k, std::vector<double>(H, 0.0));
  t.variance.assign(H, 0.0);
  for (std::size_t j = 0; j < H; ++j) {
    if (clamped[j].size() != k) throw DomainError("turnoff: clamped scores have the wrong size");
    double col = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!t.included[i]) continue;
      t.A[i][j] = 100.0 * std::abs(clamped[j][i] - baseline[i]) / std::abs(baseline[i]);
      col += t.A[i][j];
    }
    if (col > 0.0)
      for (std::size_t i = 0; i < k; ++i) t.A[i][j] /= col;
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (t.included[i]) mean += t.A[i][j];
    mean /= static_cast<double>(n_in);
    double var = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (t.included[i]) var += (t.A[i][j] - mean) * (t.A[i][j] - mean);
    t.variance[j] = var / static_cast<double>(n_in);
  }
  t.order.resize(H);
  std::iota(t.order.begin(), t.order.end(), std::size_t{0});
  std::stable_sort(t.order.begin(), t.order.end(),
                   [&](std::size_t a, std::size_t b) { return t.variance[a] < t.variance[b]; });
  return t;
}

TurnoffMatrix turnoff_matrix(const ActorCriticNet& net, const MultiTaskInstance& inst, const EvalSpec& spec) {
  EvalSpec base = spec;
  base.clamp_unit.reset();
  const EvalReport baseline = evaluate(net, inst, base);
  std::vector<std::vector<double>> clamped;
  for (std::size_t j = 0; j < net.hidden_width(); ++j) {
    EvalSpec s = base;
    s.clamp_unit = j;
    clamped.push_back(evaluate(net, inst, s).raw);
  }
  return turnoff_from_scores(baseline.raw, clamped);
}

std::string firing_csv(const FiringMatrix& f, const NeuronOrder& order, const MultiTaskInstance& inst) {
  std::string s = "unit,task_count,sum_f";
  for (const auto& t : inst.tasks) s += ",f_" + t.name;
  s += '\n';
  for (std::size_t r = 0; r < order.order.size(); ++r) {
    const std::size_t j = order.order[r];
    double sum = 0.0;
    for (std::size_t i = 0; i < f.tasks(); ++i) sum += f.f[i][j];
    s += std::to_string(j) + ',' + std::to_string(order.task_counts[r]) + ',' + format_double(sum);
    for (std::size_t i = 0; i < f.tasks(); ++i) s += ',' + format_double(f.f[i][j]);
    s += '\n';
  }
  return s;
}

std::string firing_plot_data(const NeuronOrder& order) {
  std::string s = "rank,unit,task_count\n";
  for (std::size_t r = 0; r < order.order.size(); ++r)
    s += std::to_string(r) + ',' + std::to_string(order.order[r]) + ',' + std::to_string(order.task_counts[r]) + '\n';
  return s;
}

std::string turnoff_csv(const TurnoffMatrix& t, const MultiTaskInstance& inst) {
  std::string s = "rank,unit,variance";
  for (const auto& task : inst.tasks) s += ",A_" + task.name;
  s += '\n';
  for (std::size_t r = 0; r < t.order.size(); ++r) {
    const std::size_t j = t.order[r];
    s += std::to_string(r) + ',' + std::to_string(j) + ',' + format_double(t.variance[j]);
    for (std::size_t i = 0; i < t.A.size(); ++i) s += t.included[i] ? ',' + format_double(t.A[i][j]) : std::string(",");
    s += '\n';
  }
  return s;
}

}  // namespace mts
