#include "qrocket/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qrocket/errors.hpp"

namespace qrocket::nets {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ConfigError("Mlp needs at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw ConfigError("Mlp layer sizes must be positive");
  }
  std::size_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(sizes_.size()); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::xavier(std::vector<int> sizes, Rng& rng) {
  Mlp net(std::move(sizes));
  for (int l = 0; l < net.num_layers(); ++l) {
    const int fan_in = net.sizes_[l];
    const int fan_out = net.sizes_[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    double* w = net.params_.data() + net.weight_offset(l);
    for (int i = 0; i < fan_out * fan_in; ++i) w[i] = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return net;
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input,
                                ForwardCache* cache) {
  if (static_cast<int>(input.size()) != net.input_size()) {
    throw std::invalid_argument("mlp_forward: input size mismatch");
  }
  std::vector<double> cur(input.begin(), input.end());
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(cur);
  }
  const auto& p = net.params();
  for (int l = 0; l < net.num_layers(); ++l) {
    const int in = net.sizes()[l];
    const int out = net.sizes()[l + 1];
    const double* w = p.data() + net.weight_offset(l);
    const double* b = p.data() + net.bias_offset(l);
    std::vector<double> next(out);
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * cur[i];
      next[o] = acc;
    }
    if (l + 1 < net.num_layers()) {
      for (double& x : next) x = std::max(0.0, x);
    }
    cur = std::move(next);
    if (cache) cache->activations.push_back(cur);
  }
  return cur;
}

void mlp_backward_acc(const Mlp& net, const ForwardCache& cache,
                      std::span<const double> dloss_dout, std::vector<double>& grads) {
  const int layers = net.num_layers();
  if (static_cast<int>(cache.activations.size()) != layers + 1 ||
      static_cast<int>(cache.activations.front().size()) != net.input_size()) {
    throw std::invalid_argument("mlp_backward: cache does not match network");
  }
  if (static_cast<int>(dloss_dout.size()) != net.output_size()) {
    throw std::invalid_argument("mlp_backward: output gradient size mismatch");
  }
  if (grads.size() != net.count_params()) {
    throw std::invalid_argument("mlp_backward: gradient buffer size mismatch");
  }

  std::vector<double> delta(dloss_dout.begin(), dloss_dout.end());
  const auto& p = net.params();
  for (int l = layers - 1; l >= 0; --l) {
    const int in = net.sizes()[l];
    const int out = net.sizes()[l + 1];
    const auto& a_in = cache.activations[l];
    const double* w = p.data() + net.weight_offset(l);
    double* gw = grads.data() + net.weight_offset(l);
    double* gb = grads.data() + net.bias_offset(l);

    for (int o = 0; o < out; ++o) {
      gb[o] += delta[o];
      double* grow = gw + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) grow[i] += delta[o] * a_in[i];
    }
    if (l > 0) {
      std::vector<double> prev(in, 0.0);
      for (int o = 0; o < out; ++o) {
        const double* row = w + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) prev[i] += row[i] * delta[o];
      }
      // ReLU mask from the stored post-activation of layer l.
      for (int i = 0; i < in; ++i) {
        if (cache.activations[l][i] <= 0.0) prev[i] = 0.0;
      }
      delta = std::move(prev);
    }
  }
}

std::vector<double> mlp_backward(const Mlp& net, const ForwardCache& cache,
                                 std::span<const double> dloss_dout) {
  std::vector<double> grads(net.count_params(), 0.0);
  mlp_backward_acc(net, cache, dloss_dout, grads);
  return grads;
}

void adam_step(std::vector<double>& params, std::span<const double> grads,
               AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace qrocket::nets
