#include "mtsched/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mtsched/core/errors.hpp"
#include "mtsched/core/format.hpp"

namespace mts {

Metrics compute_metrics(std::span<const double> a, std::span<const double> ta) {
  if (a.size() != ta.size() || a.empty()) throw DomainError("compute_metrics: size mismatch");
  const double k = static_cast<double>(a.size());
  Metrics m;
  double log_sum = 0.0, inv_sum = 0.0;
  bool any_zero = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(ta[i] > 0.0) || !std::isfinite(ta[i])) throw DomainError("compute_metrics: targets must be positive");
    if (!(a[i] >= 0.0) || !std::isfinite(a[i])) throw DomainError("compute_metrics: scores must be >= 0");
    const double r = a[i] / ta[i];
    const double c = std::min(r, 1.0);
    m.p_am += r;
    m.q_am += c;
    if (a[i] == 0.0) {
      any_zero = true;
    } else {
      log_sum += std::log(c);
      inv_sum += std::max(ta[i] / a[i], 1.0);
    }
  }
  m.p_am /= k;
  m.q_am /= k;
  if (!any_zero) {
    m.q_gm = std::exp(log_sum / k);
    m.q_hm = k / inv_sum;
    // The means are ordered mathematically; keep rounding from inverting them.
    m.q_gm = std::min(m.q_gm, m.q_am);
    m.q_hm = std::min(m.q_hm, m.q_gm);
  }
  return m;
}

EvalReport make_report(std::vector<double> raw, std::span<const double> targets, std::int64_t step) {
  if (raw.size() != targets.size()) throw DomainError("make_report: size mismatch");
  EvalReport r;
  r.step = step;
  std::vector<double> clamped(raw.size());
  r.ratios.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    clamped[i] = std::max(raw[i], 0.0);
    r.ratios[i] = clamped[i] / targets[i];
  }
  r.metrics = compute_metrics(clamped, targets);
  r.raw = std::move(raw);
  return r;
}

namespace {

using StepFn = std::function<int(std::size_t task, const Env& env, const Observation& obs, Rng& act_rng)>;

std::vector<double> run_protocol(const MultiTaskInstance& inst, const EvalSpec& spec,
                                 const std::function<void()>& begin_episode, const StepFn& choose) {
  if (spec.episodes == 0) throw DomainError("evaluate: episodes must be >= 1");
  if (spec.cap <= 0) throw DomainError("evaluate: cap must be >= 1");
  std::vector<double> raw(inst.k(), 0.0);
  for (std::size_t i = 0; i < inst.k(); ++i) {
    auto env = make_env(inst.tasks[i], inst.union_action_count, spec.cap);
    double total = 0.0;
    for (std::size_t e = 0; e < spec.episodes; ++e) {
      const std::uint64_t idx = i * spec.episodes + e;
      Rng env_rng(derive_seed(spec.seed, "eval-env", idx));
      Rng act_rng(derive_seed(spec.seed, "eval-act", idx));
      Observation obs = env->reset(env_rng);
      begin_episode();
      while (!env->done()) {
        const int a = choose(i, *env, obs, act_rng);
        StepResult s = env->step(a, env_rng);
        total += s.reward;
        obs = std::move(s.obs);
      }
    }
    raw[i] = total / static_cast<double>(spec.episodes);
  }
  return raw;
}

}  // namespace

EvalReport evaluate(const ActorCriticNet& net, const MultiTaskInstance& inst, const EvalSpec& spec,
                    const HiddenObserver& observer) {
  std::vector<double> hidden;
  const std::size_t head_count = net.shape().heads;
  auto raw = run_protocol(
      inst, spec, [&] { hidden.clear(); },
      [&](std::size_t task, const Env&, const Observation& obs, Rng& rng) {
        StepOutput out = net.forward(obs, head_count > 0 ? task : 0, hidden, spec.clamp_unit);
        if (observer) observer(task, out.hidden);
        const int a = static_cast<int>(rng.categorical(out.policy));
        if (net.shape().recurrent) hidden = std::move(out.hidden);
        return a;
      });
  return make_report(std::move(raw), inst.targets.values());
}

EvalReport evaluate_policy(const PolicyFn& policy, const MultiTaskInstance& inst, const EvalSpec& spec) {
  auto raw = run_protocol(inst, spec, [] {}, policy);
  return make_report(std::move(raw), inst.targets.values());
}

PolicyFn oracle_policy() {
  return [](std::size_t, const Env& env, const Observation&, Rng&) { return env.optimal_action(); };
}

std::string metrics_csv_header(const MultiTaskInstance& inst) {
  std::string h = "step";
  for (const auto& t : inst.tasks) h += ",raw_" + t.name;
  for (const auto& t : inst.tasks) h += ",norm_" + t.name;
  h += ",p_am,q_am,q_gm,q_hm";
  return h;
}

namespace {
void put(std::string& s, double v) {
  s += ',';
  s += format_double(v);
}
}  // namespace

std::string metrics_csv_row(const EvalReport& r) {
  std::string s = std::to_string(r.step);
  for (double v : r.raw) put(s, v);
  for (double v : r.ratios) put(s, v);
  put(s, r.metrics.p_am);
  put(s, r.metrics.q_am);
  put(s, r.metrics.q_gm);
  put(s, r.metrics.q_hm);
  return s;
}

}  // namespace mts
