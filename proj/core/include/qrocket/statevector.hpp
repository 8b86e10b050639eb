#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qrocket::quantum {

using cdouble = std::complex<double>;

enum class GateKind { RX, RY, RZ, CZ, CNOT };

// One gate instance. Rotation kinds use targets[0] and angle; CZ/CNOT use
// targets[0] (control for CNOT) and targets[1].
struct Gate {
  GateKind kind;
  double angle = 0.0;
  int targets[2] = {0, 0};

  static Gate rx(int qubit, double angle) { return {GateKind::RX, angle, {qubit, 0}}; }
  static Gate ry(int qubit, double angle) { return {GateKind::RY, angle, {qubit, 0}}; }
  static Gate rz(int qubit, double angle) { return {GateKind::RZ, angle, {qubit, 0}}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, 0.0, {a, b}}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, 0.0, {control, target}}; }

  bool is_rotation() const {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
  }
};

struct Circuit {
  int num_qubits = 1;
  std::vector<Gate> gates;
};

// Exact statevector of a q-qubit register. Qubit 0 is the leftmost position
// in a ket string, i.e. qubit k maps to bit (q-1-k) of the basis index, so
// |10> on two qubits is index 2.
class StateVector {
 public:
  // |00...0>. Throws ConfigError unless 1 <= q <= 16.
  static StateVector zero(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  const std::vector<cdouble>& amplitudes() const { return amps_; }
  std::vector<cdouble>& amplitudes() { return amps_; }
  cdouble amplitude(std::size_t i) const { return amps_[i]; }

  // In-place gate application via strided pair updates.
  // Throws std::out_of_range on invalid target indices.
  void apply(const Gate& g);
  void apply(const Circuit& c);

  // <Z> on one qubit: sum of (+1/-1)-signed probabilities. In [-1, 1].
  double expectation_z(int qubit) const;

  double norm_squared() const;

 private:
  StateVector(int num_qubits, std::size_t dim) : num_qubits_(num_qubits), amps_(dim) {}

  int num_qubits_;
  std::vector<cdouble> amps_;
};

// Value-style wrappers matching the pure-function view of the operations.
StateVector new_zero_state(int num_qubits);
StateVector apply_gate(StateVector state, const Gate& gate);
double expectation_z(const StateVector& state, int qubit);

}  // namespace qrocket::quantum
