#pragma once

// Two-point-measurement heat statistics: the exact distribution, the heat
// characteristic function (spectral sum, trace form, and ancilla
// interferometry at either the ideal or the pulse level), discrete Fourier
// inversion back to a distribution, moments, and the decay correction for
// phase-damped traces.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "landauer/core.hpp"
#include "landauer/gates.hpp"
#include "landauer/molecule.hpp"
#include "landauer/pulse.hpp"
#include "landauer/state.hpp"
#include "landauer/thermo.hpp"

namespace landauer {

/// Uniform sample grid t_k = k dt, k = 0 .. n-1. A grid is leakage-free for
/// gap omega when omega dt n is an integer multiple of 2 pi, which
/// `for_gap` guarantees by spanning exactly one gap period.
struct TimeGrid {
  double dt;
  int n;

  TimeGrid(double dt_, int n_) : dt(dt_), n(n_) {
    if (n < 3) throw ValidationError("time grid needs at least 3 samples");
    if (!(dt > 0)) throw ValidationError("time grid step must be positive");
  }

  static TimeGrid for_gap(double omega, int n = 8) {
    if (!(omega > 0)) throw DomainError("gap must be positive");
    return TimeGrid(2.0 * pi / (static_cast<double>(n) * omega), n);
  }

  double time(int k) const { return dt * k; }
  double bin_width() const { return 2.0 * pi / (n * dt); }  // rad/s per frequency bin

  /// Distance of omega from the nearest frequency bin, in bin units.
  double misalignment(double omega) const {
    const double m = omega / bin_width();
    return std::abs(m - std::round(m));
  }
  bool aligned(double omega, double tolerance = 1e-9) const {
    return misalignment(omega) < tolerance;
  }
};

enum class Provenance { exact_tpm, fourier };

struct HeatAtom {
  double q;  // heat value, rad/s (hbar = 1)
  double p;  // probability
};

/// Finite set of (heat value, probability) atoms, sorted by heat value.
struct HeatDistribution {
  std::vector<HeatAtom> atoms;
  Provenance provenance = Provenance::exact_tpm;
  bool leakage_warning = false;
  double leakage_misalignment = 0;  // bin units; 0 for exact-TPM distributions

  void validate() const {
    double sum = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].p < -1e-10) {
        std::ostringstream os;
        os << "heat atom " << i << " has probability " << atoms[i].p;
        throw ValidationError(os.str());
      }
      if (i > 0 && !(atoms[i].q > atoms[i - 1].q))
        throw ValidationError("heat atoms must have distinct ascending values");
      sum += atoms[i].p;
    }
    if (std::abs(sum - 1.0) > 1e-8) {
      std::ostringstream os;
      os << "heat probabilities sum to " << sum;
      throw ValidationError(os.str());
    }
  }
};

/// Total variation distance; atoms are matched by heat value within a
/// tolerance set by the overall heat scale.
inline double total_variation(const HeatDistribution& a, const HeatDistribution& b) {
  double scale = 1.0;
  for (const auto& atom : a.atoms) scale = std::max(scale, std::abs(atom.q));
  for (const auto& atom : b.atoms) scale = std::max(scale, std::abs(atom.q));
  const double atol = 1e-9 * scale;
  std::map<double, double> diff;
  auto bucket = [&](double q) {
    for (const auto& [key, val] : diff) {
      (void)val;
      if (std::abs(key - q) < atol) return key;
    }
    return q;
  };
  for (const auto& atom : a.atoms) diff[bucket(atom.q)] += atom.p;
  for (const auto& atom : b.atoms) diff[bucket(atom.q)] -= atom.p;
  double tv = 0;
  for (const auto& [q, d] : diff) {
    (void)q;
    tv += std::abs(d);
  }
  return 0.5 * tv;
}

/// Samples Theta(t_k) of the heat characteristic function. For pulse-level
/// traces `acquisition_s` holds each sample's physical acquisition span
/// (total free-evolution time of its circuit); ideal traces use t_k itself.
struct CharFnTrace {
  TimeGrid grid;
  std::vector<cx> values;
  std::vector<double> acquisition_s;
  std::vector<bool> reliable;  // cleared by decay_correction below the envelope floor

  CharFnTrace(TimeGrid g, std::vector<cx> vals, std::vector<double> acq)
      : grid(g), values(std::move(vals)), acquisition_s(std::move(acq)) {
    if (static_cast<int>(values.size()) != grid.n || acquisition_s.size() != values.size())
      throw ShapeError("trace sample count does not match its grid");
    reliable.assign(values.size(), true);
  }

  /// Invariants of a noiseless trace: Theta(0) = 1 and |Theta| <= 1.
  void check_normalized(double tolerance = 1e-10) const {
    if (std::abs(values[0] - cx(1.0)) > tolerance) {
      std::ostringstream os;
      os << "Theta(0) = " << values[0] << " differs from 1";
      throw ValidationError(os.str());
    }
    for (const auto& v : values)
      if (std::abs(v) > 1.0 + tolerance)
        throw ValidationError("characteristic function exceeds unit magnitude");
  }
};

/// System-reservoir process selector: the two gates realised in hardware
/// plus an escape hatch for arbitrary unitaries (ideal mode only).
struct Process {
  enum class Kind { cnot, partial_swap, custom };
  Kind kind = Kind::cnot;
  double phi = 0;
  std::optional<UnitaryOperator> matrix;

  static Process cnot_process() { return {Kind::cnot, 0, std::nullopt}; }
  static Process partial_swap_process(double phi) { return {Kind::partial_swap, phi, std::nullopt}; }
  static Process custom(UnitaryOperator u) { return {Kind::custom, 0, std::move(u)}; }

  /// Ideal unitary: the CNOT has the system as control and the reservoir as
  /// target.
  UnitaryOperator ideal(const std::string& reservoir = "R",
                        const std::string& system = "S") const {
    switch (kind) {
      case Kind::cnot: return cnot(system, reservoir);
      case Kind::partial_swap: return partial_swap(reservoir, system, phi);
      case Kind::custom: return *matrix;
    }
    throw ValidationError("unknown process kind");
  }

  GateRequest request(const MoleculeSpec& spec) const {
    switch (kind) {
      case Kind::cnot: return GateRequest::cnot_gate();
      case Kind::partial_swap: return GateRequest::partial_swap_angle(phi, spec);
      case Kind::custom:
        throw ConfigError("custom process unitaries have no pulse realisation");
    }
    throw ValidationError("unknown process kind");
  }

  std::string name() const {
    switch (kind) {
      case Kind::cnot: return "cnot";
      case Kind::partial_swap: return "partial_swap";
      default: return "custom";
    }
  }
};

namespace detail {

inline void check_process_labels(const ThermalReservoirSpec& res, const DensityOperator& rho_s,
                                 const UnitaryOperator& u) {
  if (rho_s.reg().contains(res.label()))
    throw ProtocolError("system state must not contain the reservoir label '" + res.label() +
                        "'");
  const QubitRegister rs = QubitRegister::merge(QubitRegister({res.label()}), rho_s.reg());
  if (!rs.contains_all(u.reg().labels()))
    throw ProtocolError("process acts outside the system+reservoir register " + rs.str());
}

}  // namespace detail

/// Exact two-point-measurement distribution: project the reservoir onto an
/// energy eigenstate, run the process, project again. Atom Q = E_n - E_m
/// carries probability p_m p_{n|m}.
inline HeatDistribution tpm_distribution(const DensityOperator& rho_s,
                                         const ThermalReservoirSpec& res,
                                         const UnitaryOperator& u) {
  detail::check_process_labels(res, rho_s, u);
  const Observable h_r = res.hamiltonian();
  const EighResult es = eigh(h_r);
  const std::vector<double> pops = {res.ground_population(), res.excited_population()};

  std::vector<std::pair<double, double>> raw;  // (Q, probability)
  for (Eigen::Index m = 0; m < 2; ++m) {
    if (pops[m] == 0.0) continue;
    const Vector psi_m = es.eigenvectors.col(m);
    const DensityOperator proj_m(h_r.reg(), psi_m * psi_m.adjoint());
    const DensityOperator out = evolve(tensor_compose(proj_m, rho_s), u);
    const DensityOperator out_r = partial_trace(out, {res.label()});
    for (Eigen::Index n = 0; n < 2; ++n) {
      const Vector psi_n = es.eigenvectors.col(n);
      const double p_cond =
          std::max(0.0, (psi_n.adjoint() * out_r.matrix() * psi_n).value().real());
      raw.emplace_back(es.eigenvalues(n) - es.eigenvalues(m), pops[m] * p_cond);
    }
  }

  // Merge atoms landing on the same heat value; drop empty transitions.
  const double atol = 1e-9 * std::max(1.0, res.gap());
  std::sort(raw.begin(), raw.end());
  std::vector<HeatAtom> merged;
  for (const auto& [q, p] : raw) {
    if (!merged.empty() && std::abs(merged.back().q - q) < atol)
      merged.back().p += p;
    else
      merged.push_back({q, p});
  }
  HeatDistribution dist;
  dist.provenance = Provenance::exact_tpm;
  for (const auto& atom : merged)
    if (atom.p > 1e-14) dist.atoms.push_back(atom);
  dist.validate();
  return dist;
}

/// Theta(t_k) = tr[U rho_R v_t^dag (x) rho_S U^dag v_t] with
/// v_t = exp(-i H_R t); equal to the spectral sum
/// sum_mn p_m p_{n|m} e^{-i(E_n - E_m) t}.
inline CharFnTrace char_fn_direct(const DensityOperator& rho_s, const ThermalReservoirSpec& res,
                                  const UnitaryOperator& u, const TimeGrid& grid) {
  detail::check_process_labels(res, rho_s, u);
  const QubitRegister rs = QubitRegister::merge(QubitRegister({res.label()}), rho_s.reg());
  const Matrix u_full = detail::embed(u.matrix(), u.reg(), rs);
  const Matrix rho_s_full = detail::embed(rho_s.matrix(), rho_s.reg(), rs);

  std::vector<cx> values(grid.n);
  std::vector<double> acq(grid.n);
  for (int k = 0; k < grid.n; ++k) {
    const double t = grid.time(k);
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = 1.0;
    v(1, 1) = std::exp(cx(0, -res.gap() * t));
    const Matrix v_full = detail::embed(v, QubitRegister({res.label()}), rs);
    Matrix rho_r_vdag = Matrix::Zero(2, 2);
    rho_r_vdag(0, 0) = res.ground_population();
    rho_r_vdag(1, 1) = res.excited_population() * std::exp(cx(0, res.gap() * t));
    const Matrix weighted = detail::embed(rho_r_vdag, QubitRegister({res.label()}), rs);
    values[k] = (u_full * weighted * rho_s_full * u_full.adjoint() * v_full).trace();
    acq[k] = t;
  }
  CharFnTrace trace(grid, std::move(values), std::move(acq));
  trace.check_normalized();
  return trace;
}

enum class SimMode { ideal, pulse };

/// Ancilla-interferometric estimate of the characteristic function,
/// Theta(t) = <sigma_x>_A - i <sigma_y>_A after the controlled-v circuit.
/// `ideal` runs the matrix-level circuit; `pulse` compiles and steps the
/// full pulse sequence, optionally with phase damping.
inline CharFnTrace char_fn_interferometric(const DensityOperator& rho_s,
                                           const ThermalReservoirSpec& res, const Process& proc,
                                           const TimeGrid& grid, SimMode mode,
                                           const MoleculeSpec* molecule = nullptr,
                                           const NoiseSpec& noise = NoiseSpec::off()) {
  std::vector<cx> values(grid.n);
  std::vector<double> acq(grid.n);

  if (mode == SimMode::ideal) {
    const std::string sys =
        rho_s.reg().size() == 1 ? rho_s.reg().labels().front() : std::string("S");
    const UnitaryOperator u = proc.ideal(res.label(), sys);
    detail::check_process_labels(res, rho_s, u);
    for (int k = 0; k < grid.n; ++k) {
      const CircuitSpec circ = build_interferometer(u, res.hamiltonian(), grid.time(k));
      values[k] = run_interferometer(circ, res.state(), rho_s);
      acq[k] = grid.time(k);
    }
    CharFnTrace trace(grid, std::move(values), std::move(acq));
    trace.check_normalized();
    return trace;
  }

  if (molecule == nullptr)
    throw ConfigError("pulse-mode characteristic function needs a molecule spec");
  const MoleculeSpec& mol = *molecule;
  const double gap = reservoir_gap(mol);
  if (std::abs(gap - res.gap()) > 1e-9 * std::max(1.0, gap)) {
    std::ostringstream os;
    os << "reservoir gap " << res.gap() << " rad/s does not match the pulse-level gap "
       << gap << " rad/s set by the A-R coupling";
    throw ConfigError(os.str());
  }

  const QubitRegister reg = mol.reg();
  const DensityOperator init =
      tensor_compose({DensityOperator::basis_state(QubitRegister({mol.ancilla}), 0), res.state(),
                      rho_s});
  if (init.reg() != reg)
    throw ConfigError("system state register does not complete the molecule register " +
                      reg.str());
  const Observable sx = pauli_observable(mol.ancilla, 'x');
  const Observable sy = pauli_observable(mol.ancilla, 'y');
  const GateRequest gate = proc.request(mol);
  for (int k = 0; k < grid.n; ++k) {
    const PulseProgram prog = interferometer_program(gate, grid.time(k), mol);
    const DensityOperator out = apply_program(init, prog, mol, noise);
    values[k] = cx(expectation(out, sx), -expectation(out, sy));
    acq[k] = prog.total_duration();
  }
  return CharFnTrace(grid, std::move(values), std::move(acq));
}

/// Discrete inverse Fourier transform of a trace. Frequency bins are fixed
/// by the grid, Q_b = b * 2 pi / (n dt); the reservoir spec only declares
/// which bins should carry weight. A gap that misses the bin lattice tags
/// the output with a leakage warning instead of failing.
inline HeatDistribution invert_to_distribution(const CharFnTrace& trace,
                                               const ThermalReservoirSpec& res) {
  const int n = trace.grid.n;
  const double bin = trace.grid.bin_width();
  HeatDistribution dist;
  dist.provenance = Provenance::fourier;
  dist.leakage_misalignment = trace.grid.misalignment(res.gap());
  dist.leakage_warning = dist.leakage_misalignment > 1e-9;

  const int b_lo = -((n - 1) / 2), b_hi = n / 2;
  std::vector<std::pair<double, double>> bins;
  double imag_residue = 0, negative = 0, sum = 0;
  for (int b = b_lo; b <= b_hi; ++b) {
    cx acc = 0;
    for (int k = 0; k < n; ++k)
      acc += trace.values[k] * std::exp(cx(0, 2.0 * pi * b * k / n));
    acc /= static_cast<double>(n);
    imag_residue = std::max(imag_residue, std::abs(acc.imag()));
    double p = acc.real();
    if (p < 0) {
      if (p < -1e-8 && !dist.leakage_warning) {
        std::ostringstream os;
        os << "Fourier inversion produced probability " << p << " in bin " << b
           << "; trace is inconsistent with a heat distribution (Theta(0) = "
           << trace.values[0] << ", imag residue " << imag_residue << ")";
        throw ValidationError(os.str());
      }
      negative = std::min(negative, p);
      p = 0;
    }
    sum += p;
    bins.emplace_back(b * bin, p);
  }
  if (dist.leakage_warning)
    dist.leakage_misalignment = std::max(dist.leakage_misalignment, imag_residue);
  if (sum <= 0) throw ValidationError("Fourier inversion produced an empty distribution");
  for (auto& [q, p] : bins) {
    p /= sum;
    if (p > 1e-12) dist.atoms.push_back({q, p});
  }
  if (!dist.leakage_warning) dist.validate();
  return dist;
}

struct HeatMoments {
  double mean;      // <Q>, rad/s
  double variance;  // rad^2/s^2
  double p_negative;
};

inline HeatMoments heat_moments(const HeatDistribution& dist) {
  double scale = 0;
  for (const auto& atom : dist.atoms) scale = std::max(scale, std::abs(atom.q));
  const double zero_tol = 1e-9 * std::max(1.0, scale);
  HeatMoments m{0, 0, 0};
  for (const auto& atom : dist.atoms) {
    m.mean += atom.p * atom.q;
    if (atom.q < -zero_tol) m.p_negative += atom.p;
  }
  for (const auto& atom : dist.atoms) m.variance += atom.p * (atom.q - m.mean) * (atom.q - m.mean);
  return m;
}

/// Undo the phase-damping envelope of a pulse-level trace: each sample is
/// divided by e^{-t_acq/T2*} of the readout qubit. Samples whose envelope
/// fell below the floor are flagged unreliable and left unamplified.
inline CharFnTrace decay_correction(const CharFnTrace& trace, const NoiseSpec& noise,
                                    const std::string& readout = "A") {
  if (!noise.enabled) return trace;
  constexpr double envelope_floor = 1e-3;
  CharFnTrace out = trace;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double env = noise.decay(readout, trace.acquisition_s[k]);
    if (env < envelope_floor) {
      out.reliable[k] = false;
      continue;
    }
    out.values[k] /= env;
  }
  return out;
}

inline void write_trace_csv(const CharFnTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace to '" + path + "'");
  out << "t,re,im\n" << std::setprecision(12);
  for (int k = 0; k < trace.grid.n; ++k)
    out << trace.grid.time(k) << "," << trace.values[k].real() << "," << trace.values[k].imag()
        << "\n";
}

inline void write_distribution_csv(const HeatDistribution& dist, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write distribution to '" + path + "'");
  out << "q,p\n" << std::setprecision(12);
  for (const auto& atom : dist.atoms) out << atom.q << "," << atom.p << "\n";
}

}  // namespace landauer
