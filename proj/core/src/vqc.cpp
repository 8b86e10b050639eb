#include "qrocket/vqc.hpp"

#include <cmath>

#include "qrocket/errors.hpp"

namespace qrocket::vqc {

namespace {

using quantum::cdouble;

constexpr int kDim = 1 << kNumQubits;
constexpr double kHalfPi = 1.5707963267948966;

// Split real/imaginary layout; the whole register is 32 doubles, which lets
// the compiler keep the hot gradient loops vectorized.
struct Amps {
  std::array<double, kDim> re;
  std::array<double, kDim> im;
};

// Fixed-size kernels for the 4-qubit register; qubit k lives at bit (3-k)
// to match the statevector engine's ordering.
inline int stride_of(int qubit) { return 1 << (kNumQubits - 1 - qubit); }

template <int ST, class Body>
inline void for_pairs(Body body) {
  for (int base = 0; base < kDim; base += 2 * ST) {
    for (int i = base; i < base + ST; ++i) body(i, i + ST);
  }
}

template <int ST>
inline void rx_impl(Amps& a, double c, double s) {
  for_pairs<ST>([&](int i, int j) {
    const double x0 = a.re[i], y0 = a.im[i], x1 = a.re[j], y1 = a.im[j];
    a.re[i] = c * x0 + s * y1;
    a.im[i] = c * y0 - s * x1;
    a.re[j] = s * y0 + c * x1;
    a.im[j] = -s * x0 + c * y1;
  });
}

template <int ST>
inline void ry_impl(Amps& a, double c, double s) {
  for_pairs<ST>([&](int i, int j) {
    const double x0 = a.re[i], y0 = a.im[i], x1 = a.re[j], y1 = a.im[j];
    a.re[i] = c * x0 - s * x1;
    a.im[i] = c * y0 - s * y1;
    a.re[j] = s * x0 + c * x1;
    a.im[j] = s * y0 + c * y1;
  });
}

template <int ST>
inline void rz_impl(Amps& a, double c, double s) {
  for_pairs<ST>([&](int i, int j) {
    const double x0 = a.re[i], y0 = a.im[i], x1 = a.re[j], y1 = a.im[j];
    a.re[i] = c * x0 + s * y0;
    a.im[i] = c * y0 - s * x0;
    a.re[j] = c * x1 - s * y1;
    a.im[j] = c * y1 + s * x1;
  });
}

inline void rx(Amps& a, int qubit, double angle) {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  switch (stride_of(qubit)) {
    case 1: rx_impl<1>(a, c, s); break;
    case 2: rx_impl<2>(a, c, s); break;
    case 4: rx_impl<4>(a, c, s); break;
    default: rx_impl<8>(a, c, s); break;
  }
}

inline void ry(Amps& a, int qubit, double angle) {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  switch (stride_of(qubit)) {
    case 1: ry_impl<1>(a, c, s); break;
    case 2: ry_impl<2>(a, c, s); break;
    case 4: ry_impl<4>(a, c, s); break;
    default: ry_impl<8>(a, c, s); break;
  }
}

inline void rz(Amps& a, int qubit, double angle) {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  switch (stride_of(qubit)) {
    case 1: rz_impl<1>(a, c, s); break;
    case 2: rz_impl<2>(a, c, s); break;
    case 4: rz_impl<4>(a, c, s); break;
    default: rz_impl<8>(a, c, s); break;
  }
}

inline void cz(Amps& a, int qa, int qb) {
  const int ba = stride_of(qa), bb = stride_of(qb);
  for (int i = 0; i < kDim; ++i) {
    if ((i & ba) && (i & bb)) {
      a.re[i] = -a.re[i];
      a.im[i] = -a.im[i];
    }
  }
}

inline void cz_ring(Amps& a) {
  cz(a, 0, 1);
  cz(a, 1, 2);
  cz(a, 2, 3);
  cz(a, 3, 0);
}

struct RotCoeffs {
  double c, s;  // cos(angle/2), sin(angle/2)
};
using LayerCoeffs = std::array<RotCoeffs, kAnglesPerLayer>;

inline RotCoeffs coeffs_of(double angle) {
  return {std::cos(0.5 * angle), std::sin(0.5 * angle)};
}

std::vector<LayerCoeffs> precompute_coeffs(const PolicyParams& p) {
  std::vector<LayerCoeffs> out(static_cast<std::size_t>(p.depth));
  for (int d = 0; d < p.depth; ++d) {
    for (int k = 0; k < kAnglesPerLayer; ++k) {
      out[d][k] = coeffs_of(p.angles[static_cast<std::size_t>(d) * kAnglesPerLayer + k]);
    }
  }
  return out;
}

inline void apply_rot(Amps& a, int qubit, int axis, const RotCoeffs& rc) {
  switch (axis) {
    case 0:
      switch (stride_of(qubit)) {
        case 1: rx_impl<1>(a, rc.c, rc.s); break;
        case 2: rx_impl<2>(a, rc.c, rc.s); break;
        case 4: rx_impl<4>(a, rc.c, rc.s); break;
        default: rx_impl<8>(a, rc.c, rc.s); break;
      }
      break;
    case 1:
      switch (stride_of(qubit)) {
        case 1: ry_impl<1>(a, rc.c, rc.s); break;
        case 2: ry_impl<2>(a, rc.c, rc.s); break;
        case 4: ry_impl<4>(a, rc.c, rc.s); break;
        default: ry_impl<8>(a, rc.c, rc.s); break;
      }
      break;
    default:
      switch (stride_of(qubit)) {
        case 1: rz_impl<1>(a, rc.c, rc.s); break;
        case 2: rz_impl<2>(a, rc.c, rc.s); break;
        case 4: rz_impl<4>(a, rc.c, rc.s); break;
        default: rz_impl<8>(a, rc.c, rc.s); break;
      }
      break;
  }
}

// Product Rz*Ry*Rx of one qubit's rotation triple, applied as one 2x2 pass.
struct FusedU {
  double r00, i00, r01, i01, r10, i10, r11, i11;
};
using LayerFused = std::array<FusedU, kNumQubits>;

inline FusedU fuse(const RotCoeffs& x, const RotCoeffs& y, const RotCoeffs& z) {
  // Rx = [[c1, -i s1], [-i s1, c1]], Ry = [[c2, -s2], [s2, c2]],
  // Rz = diag(c3 - i s3, c3 + i s3); matrix product in that order.
  const cdouble rx00{x.c, 0.0}, rx01{0.0, -x.s};
  const cdouble m00 = y.c * rx00 - y.s * rx01;  // (Ry*Rx)_00
  const cdouble m01 = y.c * rx01 - y.s * rx00;
  const cdouble m10 = y.s * rx00 + y.c * rx01;
  const cdouble m11 = y.s * rx01 + y.c * rx00;
  const cdouble p0{z.c, -z.s}, p1{z.c, z.s};
  const cdouble u00 = p0 * m00, u01 = p0 * m01, u10 = p1 * m10, u11 = p1 * m11;
  return {u00.real(), u00.imag(), u01.real(), u01.imag(),
          u10.real(), u10.imag(), u11.real(), u11.imag()};
}

template <int ST>
inline void apply_u_impl(Amps& a, const FusedU& u) {
  for_pairs<ST>([&](int i, int j) {
    const double x0 = a.re[i], y0 = a.im[i], x1 = a.re[j], y1 = a.im[j];
    a.re[i] = u.r00 * x0 - u.i00 * y0 + u.r01 * x1 - u.i01 * y1;
    a.im[i] = u.r00 * y0 + u.i00 * x0 + u.r01 * y1 + u.i01 * x1;
    a.re[j] = u.r10 * x0 - u.i10 * y0 + u.r11 * x1 - u.i11 * y1;
    a.im[j] = u.r10 * y0 + u.i10 * x0 + u.r11 * y1 + u.i11 * x1;
  });
}

inline void apply_u(Amps& a, int qubit, const FusedU& u) {
  switch (stride_of(qubit)) {
    case 1: apply_u_impl<1>(a, u); break;
    case 2: apply_u_impl<2>(a, u); break;
    case 4: apply_u_impl<4>(a, u); break;
    default: apply_u_impl<8>(a, u); break;
  }
}

std::vector<LayerFused> precompute_fused(const std::vector<LayerCoeffs>& coeffs) {
  std::vector<LayerFused> out(coeffs.size());
  for (std::size_t d = 0; d < coeffs.size(); ++d) {
    for (int q = 0; q < kNumQubits; ++q) {
      out[d][q] = fuse(coeffs[d][q * 3], coeffs[d][q * 3 + 1], coeffs[d][q * 3 + 2]);
    }
  }
  return out;
}

inline void apply_layer_fused(Amps& a, const LayerFused& lf) {
  for (int q = 0; q < kNumQubits; ++q) apply_u(a, q, lf[q]);
  cz_ring(a);
}

inline void apply_layer(Amps& a, const PolicyParams& p, int layer) {
  for (int q = 0; q < kNumQubits; ++q) {
    rx(a, q, p.angle(layer, q, 0));
    ry(a, q, p.angle(layer, q, 1));
    rz(a, q, p.angle(layer, q, 2));
  }
  cz_ring(a);
}

inline Amps encoded_state(const FeatureVector& f, bool encoder_entangler) {
  Amps a{};
  a.re[0] = 1.0;
  for (int q = 0; q < kNumQubits; ++q) rx(a, q, f[q]);
  if (encoder_entangler) cz_ring(a);
  for (int q = 0; q < kNumQubits; ++q) rx(a, q, f[kNumQubits + q]);
  return a;
}

inline std::array<double, kNumActions> expectations(const Amps& a) {
  std::array<double, kNumActions> e{};
  for (int i = 0; i < kDim; ++i) {
    const double p = a.re[i] * a.re[i] + a.im[i] * a.im[i];
    for (int q = 0; q < kNumQubits; ++q) {
      e[q] += (i & stride_of(q)) ? -p : p;
    }
  }
  return e;
}

}  // namespace

PolicyParams PolicyParams::zeros(int depth) {
  if (depth < 1) throw ConfigError("vqc depth must be >= 1");
  PolicyParams p;
  p.depth = depth;
  p.angles.assign(static_cast<std::size_t>(depth) * kAnglesPerLayer, 0.0);
  return p;
}

PolicyParams PolicyParams::random_init(int depth, Rng& rng) {
  PolicyParams p = zeros(depth);
  for (double& a : p.angles) a = rng.uniform(-3.141592653589793, 3.141592653589793);
  return p;
}

FeatureVector encode(const std::array<double, 8>& obs) {
  FeatureVector f{};
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(obs[i])) throw ConfigError("non-finite observation component");
    f[i] = std::atan(obs[i]);
  }
  for (int i = 6; i < 8; ++i) {
    if (!std::isfinite(obs[i])) throw ConfigError("non-finite observation component");
    f[i] = obs[i] != 0.0 ? 0.25 * 3.141592653589793 : 0.0;
  }
  return f;
}

std::array<double, kNumActions> forward(const PolicyParams& params,
                                        const FeatureVector& features,
                                        bool encoder_entangler) {
  Amps a = encoded_state(features, encoder_entangler);
  for (int d = 0; d < params.depth; ++d) apply_layer(a, params, d);
  std::array<double, kNumActions> q = expectations(a);
  for (int i = 0; i < kNumActions; ++i) q[i] *= params.output_weights[i];
  return q;
}

std::vector<double> parameter_shift_grad(const PolicyParams& params,
                                         const FeatureVector& features,
                                         const std::array<double, kNumActions>& dloss_dq,
                                         bool encoder_entangler) {
  const int depth = params.depth;
  std::vector<double> grad(params.count_params(), 0.0);

  // Cache the state entering each layer; shifted evaluations then only
  // re-run the suffix of the circuit.
  std::vector<Amps> entry(static_cast<std::size_t>(depth) + 1);
  entry[0] = encoded_state(features, encoder_entangler);
  for (int d = 0; d < depth; ++d) {
    entry[d + 1] = entry[d];
    apply_layer(entry[d + 1], params, d);
  }

  const std::array<double, kNumActions> ez = expectations(entry[depth]);
  for (int a = 0; a < kNumActions; ++a) {
    grad[static_cast<std::size_t>(depth) * kAnglesPerLayer + a] = dloss_dq[a] * ez[a];
  }

  const auto coeffs = precompute_coeffs(params);
  const auto fused = precompute_fused(coeffs);
  for (int d = 0; d < depth; ++d) {
    for (int k = 0; k < kAnglesPerLayer; ++k) {
      const double theta = params.angles[static_cast<std::size_t>(d) * kAnglesPerLayer + k];
      const int q_shift = k / 3;
      std::array<double, kNumActions> eplus{}, eminus{};
      for (int sgn = 0; sgn < 2; ++sgn) {
        LayerCoeffs shifted = coeffs[d];
        shifted[k] = coeffs_of(theta + (sgn == 0 ? kHalfPi : -kHalfPi));
        const FusedU u_shift =
            fuse(shifted[q_shift * 3], shifted[q_shift * 3 + 1], shifted[q_shift * 3 + 2]);
        Amps a = entry[d];
        for (int q = 0; q < kNumQubits; ++q) {
          apply_u(a, q, q == q_shift ? u_shift : fused[d][q]);
        }
        cz_ring(a);
        for (int dd = d + 1; dd < depth; ++dd) apply_layer_fused(a, fused[dd]);
        (sgn == 0 ? eplus : eminus) = expectations(a);
      }
      double g = 0.0;
      for (int a = 0; a < kNumActions; ++a) {
        const double dz = 0.5 * (eplus[a] - eminus[a]);
        g += dloss_dq[a] * params.output_weights[a] * dz;
      }
      grad[static_cast<std::size_t>(d) * kAnglesPerLayer + k] = g;
    }
  }
  return grad;
}

quantum::Circuit build_circuit(const PolicyParams& params, const FeatureVector& features,
                               bool encoder_entangler) {
  using quantum::Gate;
  quantum::Circuit c;
  c.num_qubits = kNumQubits;
  for (int q = 0; q < kNumQubits; ++q) c.gates.push_back(Gate::rx(q, features[q]));
  if (encoder_entangler) {
    for (int q = 0; q < kNumQubits; ++q)
      c.gates.push_back(Gate::cz(q, (q + 1) % kNumQubits));
  }
  for (int q = 0; q < kNumQubits; ++q)
    c.gates.push_back(Gate::rx(q, features[kNumQubits + q]));
  for (int d = 0; d < params.depth; ++d) {
    for (int q = 0; q < kNumQubits; ++q) {
      c.gates.push_back(Gate::rx(q, params.angle(d, q, 0)));
      c.gates.push_back(Gate::ry(q, params.angle(d, q, 1)));
      c.gates.push_back(Gate::rz(q, params.angle(d, q, 2)));
    }
    for (int q = 0; q < kNumQubits; ++q)
      c.gates.push_back(Gate::cz(q, (q + 1) % kNumQubits));
  }
  return c;
}

}  // namespace qrocket::vqc
