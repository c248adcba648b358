#pragma once

// Ideal (matrix-level) gate library: rotations, Hadamard, CNOT, the partial
// swap family, the controlled reservoir phase v_t, and the interferometer
// circuit that reads the heat characteristic function off an ancilla.

#include <cmath>
#include <string>
#include <vector>

#include "landauer/core.hpp"
#include "landauer/state.hpp"

namespace landauer {

enum class Axis { x, y, z };

/// R_k(theta) = exp(-i theta sigma_k / 2).
inline UnitaryOperator rotation(const std::string& label, Axis axis, double theta) {
  if (!std::isfinite(theta)) throw DomainError("rotation angle must be finite");
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Matrix m(2, 2);
  switch (axis) {
    case Axis::x:
      m << c, cx(0, -s), cx(0, -s), c;
      break;
    case Axis::y:
      m << c, -s, s, c;
      break;
    case Axis::z:
      m << cx(c, -s), 0, 0, cx(c, s);
      break;
  }
  return UnitaryOperator(QubitRegister({label}), std::move(m));
}

/// Rotation about an equatorial axis at azimuth phi (0 = x, pi/2 = y).
inline Matrix rotation_xy_matrix(double azimuth, double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Matrix m(2, 2);
  m << c, cx(0, -s) * std::exp(cx(0, -azimuth)), cx(0, -s) * std::exp(cx(0, azimuth)), c;
  return m;
}

inline UnitaryOperator pauli_gate(const std::string& label, Axis axis) {
  QubitRegister reg({label});
  switch (axis) {
    case Axis::x: return UnitaryOperator(reg, paulis::x());
    case Axis::y: return UnitaryOperator(reg, paulis::y());
    default: return UnitaryOperator(reg, paulis::z());
  }
}

/// H |0> = |+>.
inline UnitaryOperator hadamard(const std::string& label) {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  m << r, r, r, -r;
  return UnitaryOperator(QubitRegister({label}), std::move(m));
}

/// Flips `target` when `control` is |1>. In the canonical order of the
/// two-qubit register this reproduces the textbook matrix when the control
/// label sorts first.
inline UnitaryOperator cnot(const std::string& control, const std::string& target) {
  if (control == target) throw ValidationError("cnot: control and target must differ");
  QubitRegister reg({control, target});
  const std::size_t cpos = reg.position(control), tpos = reg.position(target);
  Matrix m = Matrix::Zero(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    Eigen::Index j = i;
    if (reg.bit(i, cpos)) j = i ^ (Eigen::Index(1) << (reg.size() - 1 - tpos));
    m(j, i) = 1.0;
  }
  return UnitaryOperator(std::move(reg), std::move(m));
}

/// Partial swap U_PS(phi) = P_triplet + e^{i phi} P_singlet between two
/// qubits. phi = 0 is the identity, phi = pi/2 the square root of swap and
/// phi = pi the full swap; values outside [0, pi] are accepted as
/// extrapolation. Symmetric under exchange of the two labels.
inline UnitaryOperator partial_swap(const std::string& a, const std::string& b, double phi) {
  if (a == b) throw ValidationError("partial_swap: labels must differ");
  if (!std::isfinite(phi)) throw DomainError("partial_swap: angle must be finite");
  QubitRegister reg({a, b});
  const cx w = unit_phase(phi);
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(3, 3) = 1.0;
  m(1, 1) = m(2, 2) = 0.5 * (1.0 + w);
  m(1, 2) = m(2, 1) = 0.5 * (1.0 - w);
  return UnitaryOperator(std::move(reg), std::move(m));
}

/// Controlled v_t with v_t = exp(-i H_R t): identity on the reservoir when
/// the control is |0>, v_t (or its adjoint) when it is |1>. The sign
/// convention makes the interferometer estimate equal to the spectral sum
/// Theta(t) = sum_mn p_m p_{n|m} e^{-i(E_n - E_m) t}.
inline UnitaryOperator controlled_v(const std::string& control, const Observable& h_r, double t,
                                    bool dagger = false) {
  if (t < 0) throw DomainError("controlled_v: time must be >= 0");
  if (h_r.reg().contains(control))
    throw ValidationError("controlled_v: control label '" + control +
                          "' coincides with a reservoir label");
  const EighResult es = eigh(h_r);
  const double sign = dagger ? 1.0 : -1.0;
  Vector phases(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(cx(0, sign * es.eigenvalues(i) * t));
  const Matrix v = es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();

  QubitRegister reg = QubitRegister::merge(QubitRegister({control}), h_r.reg());
  const std::size_t cpos = reg.position(control);
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < reg.size(); ++p)
    if (p != cpos) rest.push_back(p);

  Matrix m = Matrix::Zero(reg.dim(), reg.dim());
  for (Eigen::Index i = 0; i < reg.dim(); ++i) {
    const int ci = reg.bit(i, cpos);
    for (Eigen::Index j = 0; j < reg.dim(); ++j) {
      if (reg.bit(j, cpos) != ci) continue;
      const Eigen::Index si = detail::extract_bits(i, rest, reg.size());
      const Eigen::Index sj = detail::extract_bits(j, rest, reg.size());
      m(i, j) = ci ? v(si, sj) : (si == sj ? cx(1.0) : cx(0.0));
    }
  }
  return UnitaryOperator(std::move(reg), std::move(m));
}

/// Interferometer circuit: Hadamard on the ancilla, controlled v_t into the
/// reservoir, the system-reservoir process, controlled v_t^dag, then readout
/// of <sigma_x> and <sigma_y> on the ancilla.
struct CircuitSpec {
  QubitRegister reg;
  std::vector<UnitaryOperator> gates;  // chronological
  std::string readout_label;
};

inline CircuitSpec build_interferometer(const UnitaryOperator& u_process, const Observable& h_r,
                                        double t, const std::string& ancilla = "A") {
  if (u_process.reg().contains(ancilla))
    throw ProtocolError("interferometer process must not touch the ancilla '" + ancilla + "'");
  if (!u_process.reg().contains_all(h_r.reg().labels()))
    throw ProtocolError("reservoir labels must lie inside the process register");
  CircuitSpec circ{QubitRegister::merge(QubitRegister({ancilla}), u_process.reg()), {}, ancilla};
  circ.gates.push_back(hadamard(ancilla));
  circ.gates.push_back(controlled_v(ancilla, h_r, t, false));
  circ.gates.push_back(u_process);
  circ.gates.push_back(controlled_v(ancilla, h_r, t, true));
  return circ;
}

/// Run the circuit from |0><0|_A (x) rho_R (x) rho_S and return
/// Theta = <sigma_x>_A - i <sigma_y>_A.
inline cx run_interferometer(const CircuitSpec& circ, const DensityOperator& rho_r,
                             const DensityOperator& rho_s) {
  DensityOperator state = tensor_compose(
      {DensityOperator::basis_state(QubitRegister({circ.readout_label}), 0), rho_r, rho_s});
  if (state.reg() != circ.reg)
    throw ShapeError("interferometer inputs do not match circuit register " + circ.reg.str());
  for (const auto& g : circ.gates) state = evolve(state, g);
  const double sx = expectation(state, pauli_observable(circ.readout_label, 'x'));
  const double sy = expectation(state, pauli_observable(circ.readout_label, 'y'));
  return {sx, -sy};
}

}  // namespace landauer
