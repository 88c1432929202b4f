#include "mtsched/learner/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "mtsched/core/errors.hpp"

namespace mts {

struct ActorCriticNet::Trace {
  // acts[0] is the input, acts[l + 1] the output of hidden layer l.
  std::vector<std::vector<double>> acts;
  std::vector<double> prev_hidden;
  std::vector<double> logits;
  std::vector<double> head_logits;
  std::vector<double> probs;
  std::vector<double> log_probs;
  double value = 0.0;
  std::optional<std::size_t> clamp;
};

ActorCriticNet::ActorCriticNet(NetShape shape) : shape_(std::move(shape)) {
  if (shape_.input_dim == 0 || shape_.hidden.empty() || shape_.actions < 2)
    throw ValidationError("network", "need inputs, at least one hidden layer and two actions");
  std::size_t off = 0;
  std::size_t in = shape_.input_dim;
  for (std::size_t h : shape_.hidden) {
    if (h == 0) throw ValidationError("network.hidden", "layer widths must be positive");
    layers_.push_back({off, off + h * in, in, h});
    off += h * in + h;
    in = h;
  }
  if (shape_.recurrent) {
    recurrent_offset_ = off;
    off += in * in;
  }
  policy_ = {off, off + shape_.actions * in, in, shape_.actions};
  off += shape_.actions * in + shape_.actions;
  value_ = {off, off + in, in, 1};
  off += in + 1;
  heads_offset_ = off;
  const std::size_t a = shape_.actions;
  off += shape_.heads * a * a;
  params_.assign(off, 0.0);
  for (std::size_t k = 0; k < shape_.heads; ++k)
    for (std::size_t i = 0; i < a; ++i) params_[heads_offset_ + k * a * a + i * a + i] = 1.0;
}

void ActorCriticNet::initialize(Rng& rng) {
  for (const auto& l : layers_) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(l.in));
    for (std::size_t i = 0; i < l.in * l.out; ++i) params_[l.w + i] = scale * rng.normal();
  }
  if (shape_.recurrent) {
    const std::size_t h = hidden_width();
    const double scale = 0.5 / std::sqrt(static_cast<double>(h));
    for (std::size_t i = 0; i < h * h; ++i) params_[recurrent_offset_ + i] = scale * rng.normal();
  }
}

void ActorCriticNet::set_params(std::span<const double> p) {
  if (p.size() != params_.size()) throw DomainError("set_params: parameter count mismatch");
  std::copy(p.begin(), p.end(), params_.begin());
}

void ActorCriticNet::zero_outgoing(std::size_t unit) {
  const std::size_t h = hidden_width();
  if (unit >= h) throw DomainError("zero_outgoing: unit out of range");
  for (std::size_t a = 0; a < shape_.actions; ++a) params_[policy_.w + a * h + unit] = 0.0;
  params_[value_.w + unit] = 0.0;
  if (shape_.recurrent)
    for (std::size_t r = 0; r < h; ++r) params_[recurrent_offset_ + r * h + unit] = 0.0;
}

void ActorCriticNet::forward_into(std::span<const double> obs, std::size_t head,
                                  std::span<const double> prev_hidden,
                                  std::optional<std::size_t> clamp_unit, Trace& tr) const {
  if (obs.size() != shape_.input_dim)
    throw DomainError("network: observation has dimension " + std::to_string(obs.size()) +
                      ", expected " + std::to_string(shape_.input_dim));
  const std::size_t width = hidden_width();
  if (shape_.heads > 0 && head >= shape_.heads) throw DomainError("network: head index out of range");
  if (clamp_unit && *clamp_unit >= width) throw DomainError("network: clamped unit out of range");

  tr.clamp = clamp_unit;
  tr.acts.resize(layers_.size() + 1);
  tr.acts[0].assign(obs.begin(), obs.end());
  if (shape_.recurrent) {
    if (prev_hidden.empty())
      tr.prev_hidden.assign(width, 0.0);
    else if (prev_hidden.size() != width)
      throw DomainError("network: recurrent state has the wrong width");
    else
      tr.prev_hidden.assign(prev_hidden.begin(), prev_hidden.end());
  }

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Dense& d = layers_[l];
    const auto& x = tr.acts[l];
    auto& y = tr.acts[l + 1];
    y.assign(d.out, 0.0);
    const bool last = l + 1 == layers_.size();
    for (std::size_t o = 0; o < d.out; ++o) {
      double s = params_[d.b + o];
      const double* w = &params_[d.w + o * d.in];
      for (std::size_t i = 0; i < d.in; ++i) s += w[i] * x[i];
      if (last && shape_.recurrent) {
        const double* u = &params_[recurrent_offset_ + o * width];
        for (std::size_t i = 0; i < width; ++i) s += u[i] * tr.prev_hidden[i];
      }
      y[o] = std::tanh(s);
    }
    if (last && clamp_unit) y[*clamp_unit] = 0.0;
  }

  const auto& h = tr.acts.back();
  const std::size_t A = shape_.actions;
  tr.logits.assign(A, 0.0);
  for (std::size_t a = 0; a < A; ++a) {
    double s = params_[policy_.b + a];
    const double* w = &params_[policy_.w + a * width];
    for (std::size_t i = 0; i < width; ++i) s += w[i] * h[i];
    tr.logits[a] = s;
  }
  if (shape_.heads > 0) {
    tr.head_logits.assign(A, 0.0);
    const double* W = &params_[heads_offset_ + head * A * A];
    for (std::size_t r = 0; r < A; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < A; ++c) s += W[r * A + c] * tr.logits[c];
      tr.head_logits[r] = s;
    }
  } else {
    tr.head_logits = tr.logits;
  }
  const double mx = *std::max_element(tr.head_logits.begin(), tr.head_logits.end());
  double z = 0.0;
  for (double v : tr.head_logits) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  tr.probs.resize(A);
  tr.log_probs.resize(A);
  for (std::size_t a = 0; a < A; ++a) {
    tr.log_probs[a] = tr.head_logits[a] - lse;
    tr.probs[a] = std::exp(tr.log_probs[a]);
  }

  double v = params_[value_.b];
  for (std::size_t i = 0; i < width; ++i) v += params_[value_.w + i] * h[i];
  tr.value = v;
}

StepOutput ActorCriticNet::forward(std::span<const double> obs, std::size_t head,
                                   std::span<const double> prev_hidden,
                                   std::optional<std::size_t> clamp_unit) const {
  Trace tr;
  forward_into(obs, head, prev_hidden, clamp_unit, tr);
  return {std::move(tr.probs), tr.value, std::move(tr.acts.back())};
}

std::vector<double> nstep_returns(std::span<const double> rewards, double bootstrap, double gamma) {
  std::vector<double> out(rewards.size());
  double acc = bootstrap;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + gamma * acc;
    out[t] = acc;
  }
  return out;
}

BatchGradient ActorCriticNet::gradients(const TransitionBatch& batch, double gamma,
                                        double entropy_beta, LossTerms terms) const {
  const std::size_t T = batch.size();
  if (T == 0) throw DomainError("gradients: empty batch");
  if (batch.observations.size() != T || batch.rewards.size() != T)
    throw DomainError("gradients: batch fields have inconsistent lengths");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gradients: gamma must be in (0, 1]");

  std::vector<Trace> traces(T);
  std::vector<double> carry = batch.initial_hidden;
  for (std::size_t t = 0; t < T; ++t) {
    forward_into(batch.observations[t], batch.head, carry, std::nullopt, traces[t]);
    const auto& tr = traces[t];
    if (!std::isfinite(tr.value)) throw NumericalError("non-finite value estimate", t);
    for (double p : tr.probs)
      if (!std::isfinite(p)) throw NumericalError("non-finite policy", t);
    if (shape_.recurrent) carry = tr.acts.back();
  }

  BatchGradient out;
  out.grad.assign(params_.size(), 0.0);
  out.returns = nstep_returns(batch.rewards, batch.terminal ? 0.0 : batch.bootstrap, gamma);
  out.advantages.resize(T);

  const std::size_t width = hidden_width();
  const std::size_t A = shape_.actions;
  auto& g = out.grad;
  std::vector<double> rec_carry(shape_.recurrent ? width : 0, 0.0);
  std::vector<double> g_head(A), g_logit(A), g_h, g_pre, g_in;

  for (std::size_t t = T; t-- > 0;) {
    const Trace& tr = traces[t];
    const auto action = static_cast<std::size_t>(batch.actions[t]);
    if (action >= A) throw DomainError("gradients: action index out of range");
    const double R = out.returns[t];
    const double adv = R - tr.value;
    out.advantages[t] = adv;
    if (!std::isfinite(R) || !std::isfinite(adv)) throw NumericalError("non-finite return", t);

    double H = 0.0;
    for (std::size_t a = 0; a < A; ++a) H -= tr.probs[a] * tr.log_probs[a];
    out.policy_loss -= adv * tr.log_probs[action];
    out.value_loss += 0.5 * adv * adv;
    out.entropy += H;

    for (std::size_t a = 0; a < A; ++a) {
      double gz = 0.0;
      if (terms.policy) gz += adv * (tr.probs[a] - (a == action ? 1.0 : 0.0));
      if (terms.entropy) gz += entropy_beta * tr.probs[a] * (tr.log_probs[a] + H);
      g_head[a] = gz;
    }

    if (shape_.heads > 0) {
      const std::size_t base = heads_offset_ + batch.head * A * A;
      for (std::size_t r = 0; r < A; ++r)
        for (std::size_t c = 0; c < A; ++c) g[base + r * A + c] += g_head[r] * tr.logits[c];
      for (std::size_t c = 0; c < A; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < A; ++r) s += params_[base + r * A + c] * g_head[r];
        g_logit[c] = s;
      }
    } else {
      g_logit = g_head;
    }

    const auto& h = tr.acts.back();
    g_h.assign(width, 0.0);
    for (std::size_t a = 0; a < A; ++a) {
      g[policy_.b + a] += g_logit[a];
      for (std::size_t i = 0; i < width; ++i) {
        g[policy_.w + a * width + i] += g_logit[a] * h[i];
        g_h[i] += params_[policy_.w + a * width + i] * g_logit[a];
      }
    }
    if (terms.value) {
      const double gv = tr.value - R;
      g[value_.b] += gv;
      for (std::size_t i = 0; i < width; ++i) {
        g[value_.w + i] += gv * h[i];
        g_h[i] += gv * params_[value_.w + i];
      }
    }
    if (shape_.recurrent)
      for (std::size_t i = 0; i < width; ++i) g_h[i] += rec_carry[i];

    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Dense& d = layers_[l];
      const auto& y = tr.acts[l + 1];
      const auto& x = tr.acts[l];
      g_pre.assign(d.out, 0.0);
      for (std::size_t o = 0; o < d.out; ++o) g_pre[o] = g_h[o] * (1.0 - y[o] * y[o]);
      if (l + 1 == layers_.size() && tr.clamp) g_pre[*tr.clamp] = 0.0;
      g_in.assign(d.in, 0.0);
      for (std::size_t o = 0; o < d.out; ++o) {
        const double go = g_pre[o];
        g[d.b + o] += go;
        const double* w = &params_[d.w + o * d.in];
        double* gw = &g[d.w + o * d.in];
        for (std::size_t i = 0; i < d.in; ++i) {
          gw[i] += go * x[i];
          g_in[i] += w[i] * go;
        }
      }
      if (l + 1 == layers_.size() && shape_.recurrent) {
        std::fill(rec_carry.begin(), rec_carry.end(), 0.0);
        for (std::size_t o = 0; o < width; ++o) {
          const double go = g_pre[o];
          for (std::size_t i = 0; i < width; ++i) {
            g[recurrent_offset_ + o * width + i] += go * tr.prev_hidden[i];
            rec_carry[i] += params_[recurrent_offset_ + o * width + i] * go;
          }
        }
      }
      g_h.swap(g_in);
    }
    for (double v : g_h)
      if (!std::isfinite(v)) throw NumericalError("non-finite gradient", t);
  }
  return out;
}

std::uint64_t checksum(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace mts
