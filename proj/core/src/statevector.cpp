#include "qrocket/statevector.hpp"

#include <cmath>
#include <stdexcept>

#include "qrocket/errors.hpp"

namespace qrocket::quantum {

namespace {

// Bit position of a qubit inside a basis index (qubit 0 = most significant).
inline int bit_of(int num_qubits, int qubit) { return num_qubits - 1 - qubit; }

inline void check_target(int num_qubits, int qubit) {
  if (qubit < 0 || qubit >= num_qubits) {
    throw std::out_of_range("gate target out of range for register size");
  }
}

}  // namespace

StateVector StateVector::zero(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 16) {
    throw ConfigError("qubit count must be in [1, 16]");
  }
  StateVector s(num_qubits, std::size_t{1} << num_qubits);
  s.amps_[0] = cdouble{1.0, 0.0};
  return s;
}

void StateVector::apply(const Gate& g) {
  const std::size_t n = amps_.size();
  cdouble* a = amps_.data();

  if (g.is_rotation()) {
    check_target(num_qubits_, g.targets[0]);
    const std::size_t stride = std::size_t{1} << bit_of(num_qubits_, g.targets[0]);
    const double h = 0.5 * g.angle;
    const double c = std::cos(h);
    const double s = std::sin(h);

    switch (g.kind) {
      case GateKind::RX: {
        // [[c, -i s], [-i s, c]]
        const cdouble m01{0.0, -s};
        for (std::size_t base = 0; base < n; base += 2 * stride) {
          for (std::size_t i = base; i < base + stride; ++i) {
            const cdouble a0 = a[i];
            const cdouble a1 = a[i + stride];
            a[i] = c * a0 + m01 * a1;
            a[i + stride] = m01 * a0 + c * a1;
          }
        }
        break;
      }
      case GateKind::RY: {
        // [[c, -s], [s, c]]
        for (std::size_t base = 0; base < n; base += 2 * stride) {
          for (std::size_t i = base; i < base + stride; ++i) {
            const cdouble a0 = a[i];
            const cdouble a1 = a[i + stride];
            a[i] = c * a0 - s * a1;
            a[i + stride] = s * a0 + c * a1;
          }
        }
        break;
      }
      case GateKind::RZ: {
        // diag(e^{-i h}, e^{+i h})
        const cdouble p0{c, -s};
        const cdouble p1{c, s};
        for (std::size_t base = 0; base < n; base += 2 * stride) {
          for (std::size_t i = base; i < base + stride; ++i) {
            a[i] *= p0;
            a[i + stride] *= p1;
          }
        }
        break;
      }
      default:
        break;
    }
    return;
  }

  check_target(num_qubits_, g.targets[0]);
  check_target(num_qubits_, g.targets[1]);
  if (g.targets[0] == g.targets[1]) {
    throw std::out_of_range("two-qubit gate requires distinct targets");
  }
  const std::size_t b0 = std::size_t{1} << bit_of(num_qubits_, g.targets[0]);
  const std::size_t b1 = std::size_t{1} << bit_of(num_qubits_, g.targets[1]);

  if (g.kind == GateKind::CZ) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((i & b0) && (i & b1)) a[i] = -a[i];
    }
  } else {  // CNOT: flip target bit where control bit is set
    for (std::size_t i = 0; i < n; ++i) {
      if ((i & b0) && !(i & b1)) std::swap(a[i], a[i | b1]);
    }
  }
}

void StateVector::apply(const Circuit& c) {
  if (c.num_qubits != num_qubits_) {
    throw std::out_of_range("circuit register size does not match state");
  }
  for (const Gate& g : c.gates) apply(g);
}

double StateVector::expectation_z(int qubit) const {
  check_target(num_qubits_, qubit);
  const std::size_t bit = std::size_t{1} << bit_of(num_qubits_, qubit);
  double e = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    e += (i & bit) ? -p : p;
  }
  return e;
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const cdouble& a : amps_) s += std::norm(a);
  return s;
}

StateVector new_zero_state(int num_qubits) { return StateVector::zero(num_qubits); }

StateVector apply_gate(StateVector state, const Gate& gate) {
  state.apply(gate);
  return state;
}

double expectation_z(const StateVector& state, int qubit) {
  return state.expectation_z(qubit);
}

}  // namespace qrocket::quantum
