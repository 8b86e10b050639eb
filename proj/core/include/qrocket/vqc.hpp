#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "qrocket/rng.hpp"
#include "qrocket/statevector.hpp"

namespace qrocket::vqc {

inline constexpr int kNumQubits = 4;
inline constexpr int kNumActions = 4;
inline constexpr int kAnglesPerLayer = kNumQubits * 3;  // RX, RY, RZ per qubit

// Trainable parameters of the quantum Q-function:
// depth * 12 rotation angles plus one readout weight per action.
struct PolicyParams {
  int depth = 5;
  std::vector<double> angles;  // [layer][qubit][axis], flat, size depth*12
  std::array<double, kNumActions> output_weights{1.0, 1.0, 1.0, 1.0};

  static PolicyParams zeros(int depth);
  // Angles uniform in (-pi, pi), output weights at 1.
  static PolicyParams random_init(int depth, Rng& rng);

  std::size_t count_params() const { return angles.size() + kNumActions; }
  double& angle(int layer, int qubit, int axis) {
    return angles[static_cast<std::size_t>(layer) * kAnglesPerLayer + qubit * 3 + axis];
  }
  double angle(int layer, int qubit, int axis) const {
    return angles[static_cast<std::size_t>(layer) * kAnglesPerLayer + qubit * 3 + axis];
  }
};

// Observation mapped to encoding angles, each in (-pi/2, pi/2].
using FeatureVector = std::array<double, 8>;

// arctan squashing for the six continuous fields; the contact flags map to
// {0, pi/4}. Throws ConfigError on non-finite input.
FeatureVector encode(const std::array<double, 8>& obs);

// Q-values: output_weights[a] * <Z_a> after the encoding and variational
// layers. Pure and deterministic.
std::array<double, kNumActions> forward(const PolicyParams& params,
                                        const FeatureVector& features,
                                        bool encoder_entangler = true);

// Gradient of sum_a dloss_dq[a] * Q_a over all trainable parameters, laid
// out as [angles..., output_weights...]. Rotation-angle derivatives come
// from the two-point symmetric rule at shifts of +-pi/2, which is exact for
// rotation generators.
std::vector<double> parameter_shift_grad(const PolicyParams& params,
                                         const FeatureVector& features,
                                         const std::array<double, kNumActions>& dloss_dq,
                                         bool encoder_entangler = true);

// The same circuit as an explicit gate list, used to cross-check the fast
// path against the generic statevector engine.
quantum::Circuit build_circuit(const PolicyParams& params, const FeatureVector& features,
                               bool encoder_entangler = true);

}  // namespace qrocket::vqc
