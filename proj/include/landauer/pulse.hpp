#pragma once

// Pulse-level model of the spin system: the Ising Hamiltonian in the ancilla
// rotating frame, free evolutions, pulse-sequence compilation of the gates,
// z-phase compensation, gradient dephasing, pseudopure scaling and the
// phase-damping noise model.
//
// Rf pulses are idealised as instantaneous rotations about equatorial axes.
// The compiler keeps a per-qubit phase accumulator and advances every pulse
// azimuth by the z phase the qubit's frequency offset has accrued, so the
// offsets contribute only a final local z rotation per qubit. Couplings to
// qubits not taking part in a gate are cancelled with refocusing pi-pulse
// pairs. What is left after z_compensation matches the ideal gate up to a
// global phase.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "landauer/core.hpp"
#include "landauer/gates.hpp"
#include "landauer/molecule.hpp"
#include "landauer/state.hpp"

namespace landauer {

/// Per-qubit phase-damping rates; disabled by default.
struct NoiseSpec {
  bool enabled = false;
  std::map<std::string, double> t2star_s;

  static NoiseSpec off() { return {}; }
  static NoiseSpec from_molecule(const MoleculeSpec& m, bool on = true) {
    return {on, m.t2star_s};
  }

  /// Coherence decay factor e^{-dt/T2*} for one qubit, 1 when disabled.
  double decay(const std::string& q, double dt) const {
    if (!enabled || dt == 0.0) return 1.0;
    if (dt < 0) throw DomainError("decay duration must be >= 0");
    auto it = t2star_s.find(q);
    if (it == t2star_s.end()) throw LookupError("no T2* entry for qubit '" + q + "'");
    if (!(it->second > 0)) throw ValidationError("T2* must be positive for qubit '" + q + "'");
    return std::exp(-dt / it->second);
  }
};

struct PulseElement {
  enum class Kind { rotation, free_evolution, gradient, z_correction };
  Kind kind;
  std::string qubit;                 // rotation / z_correction
  double azimuth = 0;                // rotation axis in the equatorial plane (0 = x, pi/2 = y)
  double angle = 0;                  // rotation / z_correction
  double duration = 0;               // free_evolution, seconds
  std::vector<std::string> targets;  // gradient

  static PulseElement rotation(std::string q, double azimuth, double angle) {
    PulseElement e{Kind::rotation, std::move(q)};
    e.azimuth = azimuth;
    e.angle = angle;
    return e;
  }
  static PulseElement free_evolution(double duration) {
    if (duration < 0) throw DomainError("free evolution duration must be >= 0");
    PulseElement e{Kind::free_evolution};
    e.duration = duration;
    return e;
  }
  static PulseElement gradient(std::vector<std::string> targets) {
    if (targets.empty()) throw ValidationError("gradient needs at least one target qubit");
    PulseElement e{Kind::gradient};
    e.targets = std::move(targets);
    return e;
  }
  static PulseElement z_correction(std::string q, double angle) {
    PulseElement e{Kind::z_correction, std::move(q)};
    e.angle = angle;
    return e;
  }
};

/// Chronological element list, optionally carrying the ideal gate it
/// realises (used by z_compensation and the equivalence tests).
struct PulseProgram {
  std::vector<PulseElement> elements;
  std::optional<UnitaryOperator> target;

  double total_duration() const {
    double t = 0;
    for (const auto& e : elements)
      if (e.kind == PulseElement::Kind::free_evolution) t += e.duration;
    return t;
  }
};

/// Diagonal of the rotating-frame Ising Hamiltonian (rad/s) over the basis
/// of `spec.reg()`: H = sum_j 2pi off_j I_z^j + sum_{j<k} 2pi J_jk I_z^j I_z^k.
inline Eigen::VectorXd ising_diagonal(const MoleculeSpec& spec) {
  const QubitRegister reg = spec.reg();
  const auto& labels = reg.labels();
  const std::size_t n = labels.size();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(reg.dim());
  for (Eigen::Index b = 0; b < reg.dim(); ++b) {
    double e = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double zj = reg.bit(b, j) ? -1.0 : 1.0;  // sigma_z |0> = +|0>
      e += 2.0 * pi * spec.offset(labels[j]) * 0.5 * zj;
      for (std::size_t k = j + 1; k < n; ++k) {
        const double zk = reg.bit(b, k) ? -1.0 : 1.0;
        e += 2.0 * pi * spec.coupling(labels[j], labels[k]) * 0.25 * zj * zk;
      }
    }
    diag(b) = e;
  }
  return diag;
}

inline Observable ising_hamiltonian(const MoleculeSpec& spec) {
  return Observable(spec.reg(), ising_diagonal(spec).cast<cx>().asDiagonal());
}

/// U_0(t) = exp(-i H t), diagonal in the computational basis.
inline UnitaryOperator free_evolution(const MoleculeSpec& spec, double t) {
  if (t < 0) throw DomainError("free evolution duration must be >= 0");
  const Eigen::VectorXd diag = ising_diagonal(spec);
  Vector phases(diag.size());
  for (Eigen::Index i = 0; i < diag.size(); ++i) phases(i) = std::exp(cx(0, -diag(i) * t));
  return UnitaryOperator(spec.reg(), Matrix(phases.asDiagonal()));
}

/// Effective two-level reservoir gap realised by the controlled-v pulse
/// construction: the ancilla-reservoir coupling sets the splitting.
inline double reservoir_gap(const MoleculeSpec& spec) {
  return 2.0 * pi * spec.coupling(spec.ancilla, spec.reservoir);
}

enum class GateKind { cnot, partial_swap, controlled_v, controlled_v_dagger };

struct GateRequest {
  GateKind kind = GateKind::cnot;
  double tau = 0;  // partial swap evolution time, seconds
  double t = 0;    // controlled-v phase time, seconds

  static GateRequest cnot_gate() { return {GateKind::cnot, 0, 0}; }
  static GateRequest partial_swap_time(double tau) { return {GateKind::partial_swap, tau, 0}; }
  static GateRequest partial_swap_angle(double phi, const MoleculeSpec& spec) {
    const double j = spec.coupling(spec.reservoir, spec.system);
    if (!(j > 0)) throw CompileError("partial swap needs a positive R-S coupling");
    return partial_swap_time(phi / (2.0 * pi * j));
  }
  static GateRequest controlled_v_t(double t, bool dagger) {
    return {dagger ? GateKind::controlled_v_dagger : GateKind::controlled_v, 0, t};
  }
};

/// Emits pulse sequences with offset phase tracking. All gate cores below
/// leave every qubit outside the gate refocused; the only uncompensated
/// residue is a local z rotation per qubit plus a global phase.
class PulseSequencer {
 public:
  explicit PulseSequencer(const MoleculeSpec& spec) : spec_(spec) {}

  void pulse(const std::string& q, double azimuth, double angle) {
    elements_.push_back(
        PulseElement::rotation(q, azimuth + 2.0 * pi * spec_.offset(q) * elapsed_, angle));
  }

  void delay(double t) {
    if (t < 0) throw DomainError("delay must be >= 0");
    if (t == 0) return;
    elements_.push_back(PulseElement::free_evolution(t));
    elapsed_ += t;
  }

  void gradient(std::vector<std::string> targets) {
    elements_.push_back(PulseElement::gradient(std::move(targets)));
  }

  /// |0> -> |+> on the ancilla.
  void superposition_pulse() { pulse(spec_.ancilla, pi / 2, pi / 2); }

  /// R_y^R(pi/2), J-coupling evolution of total angle pi with the ancilla
  /// refocused, R_x^R(pi/2). Control is the system qubit, target the
  /// reservoir qubit.
  void cnot_core() {
    const double j = coupling_or_throw(spec_.reservoir, spec_.system, "cnot");
    const double half = 1.0 / (4.0 * j);
    pulse(spec_.reservoir, pi / 2, pi / 2);
    delay(half);
    pulse(spec_.ancilla, 0, pi);
    delay(half);
    pulse(spec_.ancilla, 0, pi);
    pulse(spec_.reservoir, 0, pi / 2);
  }

  /// Heisenberg exchange of angle phi = 2 pi J_RS tau, built from three
  /// commuting two-spin segments (zz, xx, yy). Each segment runs the zz
  /// coupling for tau with simultaneous pi-pulse pairs on R and S that cancel
  /// the couplings to the ancilla, conjugated into the wanted axis by basis
  /// pulses on both qubits.
  void partial_swap_core(double tau) {
    coupling_or_throw(spec_.reservoir, spec_.system, "partial swap");
    if (tau < 0) throw CompileError("partial swap evolution time must be >= 0");
    rs_zz_block(tau);  // zz
    basis_change(pi / 2, tau);   // xx: conjugate by R_y(+-pi/2)
    basis_change(0.0, tau);      // yy: conjugate by R_x(+-pi/2)
  }

  /// Free evolution t/2, pi pulse on the system qubit, free evolution t/2,
  /// closing pi pulse. Leaves the A-R coupling phase running for the full t
  /// while everything else refocuses; relative to the idle ancilla branch
  /// this is exactly controlled-v_t with gap 2 pi J_AR.
  void controlled_v_core(double t, bool dagger) {
    coupling_or_throw(spec_.ancilla, spec_.reservoir, "controlled-v");
    if (t < 0) throw CompileError("controlled-v time must be >= 0");
    if (dagger) pulse(spec_.ancilla, 0, pi);
    delay(t / 2);
    pulse(spec_.system, 0, pi);
    delay(t / 2);
    pulse(spec_.system, 0, pi);
    if (dagger) pulse(spec_.ancilla, 0, pi);
  }

  void gate_core(const GateRequest& req) {
    switch (req.kind) {
      case GateKind::cnot: cnot_core(); break;
      case GateKind::partial_swap: partial_swap_core(req.tau); break;
      case GateKind::controlled_v: controlled_v_core(req.t, false); break;
      case GateKind::controlled_v_dagger: controlled_v_core(req.t, true); break;
    }
  }

  PulseProgram take(std::optional<UnitaryOperator> target = std::nullopt) {
    PulseProgram p{std::move(elements_), std::move(target)};
    elements_.clear();
    elapsed_ = 0;
    return p;
  }

  double elapsed() const { return elapsed_; }

 private:
  double coupling_or_throw(const std::string& a, const std::string& b, const char* what) {
    const double j = spec_.coupling(a, b);
    if (!(j > 0)) {
      std::ostringstream os;
      os << "cannot compile " << what << ": coupling J(" << a << "," << b
         << ") = " << j << " must be positive";
      throw CompileError(os.str());
    }
    return j;
  }

  void rs_zz_block(double tau) {
    delay(tau / 2);
    pulse(spec_.reservoir, 0, pi);
    pulse(spec_.system, 0, pi);
    delay(tau / 2);
    pulse(spec_.reservoir, 0, pi);
    pulse(spec_.system, 0, pi);
  }

  void basis_change(double azimuth, double tau) {
    pulse(spec_.reservoir, azimuth, -pi / 2);
    pulse(spec_.system, azimuth, -pi / 2);
    rs_zz_block(tau);
    pulse(spec_.reservoir, azimuth, pi / 2);
    pulse(spec_.system, azimuth, pi / 2);
  }

  const MoleculeSpec& spec_;
  std::vector<PulseElement> elements_;
  double elapsed_ = 0;
};

/// Ideal gate a compiled request should realise, on its natural sub-register.
inline UnitaryOperator ideal_gate_for(const GateRequest& req, const MoleculeSpec& spec) {
  switch (req.kind) {
    case GateKind::cnot: return cnot(spec.system, spec.reservoir);
    case GateKind::partial_swap: {
      const double phi = 2.0 * pi * spec.coupling(spec.reservoir, spec.system) * req.tau;
      return partial_swap(spec.reservoir, spec.system, phi);
    }
    case GateKind::controlled_v:
    case GateKind::controlled_v_dagger: {
      Matrix h = Matrix::Zero(2, 2);
      h(1, 1) = reservoir_gap(spec);
      const Observable h_r(QubitRegister({spec.reservoir}), std::move(h));
      return controlled_v(spec.ancilla, h_r, req.t, req.kind == GateKind::controlled_v_dagger);
    }
  }
  throw CompileError("unknown gate request");
}

inline PulseProgram compile_pulse_program(const GateRequest& req, const MoleculeSpec& spec) {
  PulseSequencer seq(spec);
  seq.gate_core(req);
  return seq.take(ideal_gate_for(req, spec));
}

/// Net unitary of a program over the full molecule register. Fails on
/// gradient elements, which are not unitary.
inline UnitaryOperator program_unitary(const PulseProgram& prog, const MoleculeSpec& spec) {
  const QubitRegister reg = spec.reg();
  const Eigen::VectorXd h_diag = ising_diagonal(spec);
  Matrix u = Matrix::Identity(reg.dim(), reg.dim());
  for (const auto& e : prog.elements) {
    switch (e.kind) {
      case PulseElement::Kind::rotation:
        u = detail::embed(rotation_xy_matrix(e.azimuth, e.angle), QubitRegister({e.qubit}), reg) *
            u;
        break;
      case PulseElement::Kind::free_evolution: {
        Vector phases(h_diag.size());
        for (Eigen::Index i = 0; i < h_diag.size(); ++i)
          phases(i) = std::exp(cx(0, -h_diag(i) * e.duration));
        u = phases.asDiagonal() * u;
        break;
      }
      case PulseElement::Kind::z_correction: {
        Matrix z(2, 2);
        z << std::exp(cx(0, -e.angle / 2)), 0, 0, std::exp(cx(0, e.angle / 2));
        u = detail::embed(z, QubitRegister({e.qubit}), reg) * u;
        break;
      }
      case PulseElement::Kind::gradient:
        throw ValidationError("program contains gradient dephasing and has no net unitary");
    }
  }
  return UnitaryOperator(reg, std::move(u));
}

/// ||U - e^{i gamma} V||_F / sqrt(dim), minimised over the global phase.
inline double process_distance(const UnitaryOperator& u, const UnitaryOperator& v) {
  if (u.reg() != v.reg())
    throw ShapeError("process_distance: registers differ: " + u.reg().str() + " vs " +
                     v.reg().str());
  const double d = static_cast<double>(u.reg().dim());
  const double overlap = std::abs((v.matrix().adjoint() * u.matrix()).trace()) / d;
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - overlap)));
}

/// Append virtual z rotations so the program's net unitary matches its ideal
/// target with no residual local z phases. Throws CorrectionError when the
/// residual is not a product of local z rotations.
inline PulseProgram z_compensation(const PulseProgram& prog, const MoleculeSpec& spec) {
  if (!prog.target)
    throw ValidationError("z_compensation: program carries no ideal target gate");
  const QubitRegister reg = spec.reg();
  const UnitaryOperator v = program_unitary(prog, spec);
  const Matrix g = detail::embed(prog.target->matrix(), prog.target->reg(), reg);
  const Matrix r = v.matrix() * g.adjoint();

  const Eigen::Index dim = reg.dim();
  double offdiag = 0;
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(r(i, j)));
  if (offdiag > 1e-8) {
    std::ostringstream os;
    os << "residual is not diagonal (off-diagonal magnitude " << offdiag
       << "); the program does not reduce to the target up to z rotations";
    throw CorrectionError(os.str());
  }

  const std::size_t n = reg.size();
  std::vector<double> theta(n);
  for (std::size_t q = 0; q < n; ++q) {
    const Eigen::Index e_q = Eigen::Index(1) << (n - 1 - q);
    theta[q] = std::arg(r(e_q, e_q) / r(0, 0));
  }
  for (Eigen::Index b = 0; b < dim; ++b) {
    cx predicted = r(0, 0);
    for (std::size_t q = 0; q < n; ++q)
      if (reg.bit(b, q)) predicted *= std::exp(cx(0, theta[q]));
    if (std::abs(r(b, b) - predicted) > 1e-8) {
      std::ostringstream os;
      os << "residual diagonal does not factor into per-qubit z rotations (basis state " << b
         << ", defect " << std::abs(r(b, b) - predicted) << ")";
      throw CorrectionError(os.str());
    }
  }

  PulseProgram out = prog;
  for (std::size_t q = 0; q < n; ++q)
    if (std::abs(theta[q]) > 1e-13)
      out.elements.push_back(PulseElement::z_correction(reg.labels()[q], -theta[q]));
  return out;
}

/// Remove every coherence between basis states that differ in any targeted
/// qubit; idempotent, populations untouched.
inline QuantumChannel gradient_channel(const std::vector<std::string>& targets) {
  QubitRegister reg(targets);
  std::vector<Matrix> kraus;
  for (Eigen::Index b = 0; b < reg.dim(); ++b) {
    Matrix k = Matrix::Zero(reg.dim(), reg.dim());
    k(b, b) = 1.0;
    kraus.push_back(std::move(k));
  }
  return QuantumChannel(std::move(reg), std::move(kraus));
}

/// (1 - eps) 1/d + eps rho. Traceless observables read eps-scaled copies of
/// the target expectations.
inline DensityOperator pseudopure(const DensityOperator& rho, double eps) {
  if (!(eps > 0) || eps > 1) throw DomainError("pseudopure fraction must lie in (0, 1]");
  const Eigen::Index d = rho.reg().dim();
  Matrix m = (1.0 - eps) / static_cast<double>(d) * Matrix::Identity(d, d) +
             eps * rho.matrix();
  return DensityOperator(rho.reg(), std::move(m));
}

namespace detail {

/// Multiply each coherence by the per-qubit decay of every bit that differs.
inline void damp_in_place(Matrix& m, const QubitRegister& reg, const NoiseSpec& noise,
                          double dt) {
  if (!noise.enabled || dt == 0.0) return;
  std::vector<double> decay(reg.size());
  for (std::size_t q = 0; q < reg.size(); ++q) decay[q] = noise.decay(reg.labels()[q], dt);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i == j) continue;
      double f = 1.0;
      for (std::size_t q = 0; q < reg.size(); ++q)
        if (reg.bit(i, q) != reg.bit(j, q)) f *= decay[q];
      m(i, j) *= f;
    }
}

inline void dephase_in_place(Matrix& m, const QubitRegister& reg,
                             const std::vector<std::string>& targets) {
  std::vector<std::size_t> pos;
  for (const auto& t : targets) pos.push_back(reg.position(t));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i == j) continue;
      for (std::size_t p : pos)
        if (reg.bit(i, p) != reg.bit(j, p)) {
          m(i, j) = 0.0;
          break;
        }
    }
}

}  // namespace detail

/// Independent per-qubit phase damping for `duration`: coherences shrink by
/// e^{-t/T2*} per differing qubit, populations stay. Diagonal-preserving, so
/// it commutes with free evolution.
inline DensityOperator phase_damping_evolution(const DensityOperator& state, double duration,
                                               const NoiseSpec& noise) {
  if (duration < 0) throw DomainError("phase damping duration must be >= 0");
  Matrix m = state.matrix();
  detail::damp_in_place(m, state.reg(), noise, duration);
  return DensityOperator(state.reg(), std::move(m));
}

/// Step a state through a program. Free evolutions optionally interleave the
/// phase-damping noise; gradients dephase their targets.
inline DensityOperator apply_program(const DensityOperator& state, const PulseProgram& prog,
                                     const MoleculeSpec& spec,
                                     const NoiseSpec& noise = NoiseSpec::off()) {
  const QubitRegister reg = spec.reg();
  if (state.reg() != reg)
    throw ShapeError("apply_program: state register " + state.reg().str() +
                     " does not match molecule register " + reg.str());
  const Eigen::VectorXd h_diag = ising_diagonal(spec);
  Matrix m = state.matrix();
  for (const auto& e : prog.elements) {
    switch (e.kind) {
      case PulseElement::Kind::rotation: {
        const Matrix u =
            detail::embed(rotation_xy_matrix(e.azimuth, e.angle), QubitRegister({e.qubit}), reg);
        m = u * m * u.adjoint();
        break;
      }
      case PulseElement::Kind::free_evolution: {
        Vector phases(h_diag.size());
        for (Eigen::Index i = 0; i < h_diag.size(); ++i)
          phases(i) = std::exp(cx(0, -h_diag(i) * e.duration));
        m = phases.asDiagonal() * m * phases.conjugate().asDiagonal();
        detail::damp_in_place(m, reg, noise, e.duration);
        break;
      }
      case PulseElement::Kind::z_correction: {
        Matrix z(2, 2);
        z << std::exp(cx(0, -e.angle / 2)), 0, 0, std::exp(cx(0, e.angle / 2));
        const Matrix u = detail::embed(z, QubitRegister({e.qubit}), reg);
        m = u * m * u.adjoint();
        break;
      }
      case PulseElement::Kind::gradient:
        detail::dephase_in_place(m, reg, e.targets);
        break;
    }
  }
  return DensityOperator(reg, std::move(m));
}

/// Rotate the reservoir qubit by `alpha` about y and dephase it: prepares the
/// thermal populations cos^2(alpha/2), sin^2(alpha/2) from |0>.
inline PulseProgram reservoir_preparation(double alpha, const MoleculeSpec& spec) {
  if (!(alpha > 0) || alpha > pi / 2 + 1e-15)
    throw DomainError("preparation angle must lie in (0, pi/2]");
  PulseSequencer seq(spec);
  seq.pulse(spec.reservoir, pi / 2, alpha);
  seq.gradient({spec.reservoir});
  return seq.take();
}

/// Full pulse-level interferometer for one sample time: ancilla
/// superposition pulse, controlled-v_t, the process, controlled-v_t^dag.
/// Assembled in a single sequencer pass so offset phase tracking stays
/// consistent across the blocks.
inline PulseProgram interferometer_program(const GateRequest& process, double t,
                                           const MoleculeSpec& spec) {
  PulseSequencer seq(spec);
  seq.superposition_pulse();
  seq.controlled_v_core(t, false);
  seq.gate_core(process);
  seq.controlled_v_core(t, true);
  return seq.take();
}

}  // namespace landauer
