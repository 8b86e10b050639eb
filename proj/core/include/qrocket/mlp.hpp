#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qrocket/rng.hpp"

namespace qrocket::nets {

// Dense network with ReLU hidden layers and identity output. Parameters are
// stored flat, per layer as [weights row-major (out x in), biases].
class Mlp {
 public:
  explicit Mlp(std::vector<int> sizes);  // all-zero parameters
  static Mlp xavier(std::vector<int> sizes, Rng& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::size_t count_params() const { return params_.size(); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Offset of layer l's weight block; biases follow the weights.
  std::size_t weight_offset(int layer) const { return offsets_[layer]; }
  std::size_t bias_offset(int layer) const {
    return offsets_[layer] + static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1];
  }

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Post-activation values per layer, retained for the backward pass.
struct ForwardCache {
  std::vector<std::vector<double>> activations;  // [0] = input, last = output
};

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input,
                                ForwardCache* cache = nullptr);

// Exact gradients of the forward composition; layout matches net.params().
// Throws std::invalid_argument if the cache does not match the network.
std::vector<double> mlp_backward(const Mlp& net, const ForwardCache& cache,
                                 std::span<const double> dloss_dout);

// Accumulating variant used for mini-batches.
void mlp_backward_acc(const Mlp& net, const ForwardCache& cache,
                      std::span<const double> dloss_dout, std::vector<double>& grads);

struct AdamConfig {
  double lr = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  long step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam update, in place.
void adam_step(std::vector<double>& params, std::span<const double> grads,
               AdamState& state, const AdamConfig& cfg);

}  // namespace qrocket::nets
