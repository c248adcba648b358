#pragma once

// Thermodynamic and information-theoretic functionals: Gibbs states, the
// temperature <-> preparation-angle mapping, entropies, average heat, and the
// entropy-production bookkeeping for a full erasure process.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "landauer/core.hpp"
#include "landauer/state.hpp"

namespace landauer {

/// Two-level reservoir with level gap `omega` (rad/s, hbar = 1) and inverse
/// temperature `beta` (s). The Hamiltonian convention is diag(0, omega), so
/// the ground state is |0> and beta >= 0 gives ground-state dominance.
class ThermalReservoirSpec {
 public:
  ThermalReservoirSpec(double omega, double beta, std::string label = "R")
      : label_(std::move(label)), omega_(omega), beta_(beta) {
    if (!(omega_ > 0)) throw DomainError("reservoir gap must be positive");
    if (beta_ < 0 || std::isnan(beta_)) throw DomainError("inverse temperature must be >= 0");
  }

  /// Temperature given as (beta*hbar)^{-1} in Hz; +infinity means beta = 0.
  static ThermalReservoirSpec from_beta_inv_hz(double f_hz, double omega,
                                               std::string label = "R") {
    if (!(f_hz > 0)) throw DomainError("temperature (beta hbar)^{-1} must be positive");
    return ThermalReservoirSpec(omega, std::isinf(f_hz) ? 0.0 : 1.0 / f_hz, std::move(label));
  }

  static ThermalReservoirSpec from_alpha(double alpha, double omega, std::string label = "R");

  double omega() const { return omega_; }
  double gap() const { return omega_; }  // hbar = 1
  double beta() const { return beta_; }
  const std::string& label() const { return label_; }

  /// Dimensionless beta * gap.
  double x() const { return beta_ * omega_; }

  double partition_function() const { return 1.0 + std::exp(-x()); }
  double ground_population() const { return 1.0 / (1.0 + std::exp(-x())); }
  double excited_population() const { return 1.0 - ground_population(); }

  Observable hamiltonian() const {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = omega_;
    return Observable(QubitRegister({label_}), std::move(h));
  }

  DensityOperator state() const {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = ground_population();
    m(1, 1) = excited_population();
    return DensityOperator(QubitRegister({label_}), std::move(m));
  }

 private:
  std::string label_;
  double omega_;
  double beta_;
};

/// beta = log[cot^2(alpha/2)] / gap, the preparation-angle mapping. The
/// rotation angle alpha in (0, pi/2] sweeps the whole range beta in [0, inf),
/// with gibbs populations p0 = cos^2(alpha/2).
inline double beta_from_alpha(double alpha, double omega) {
  if (!(alpha > 0) || alpha > pi / 2 + 1e-15)
    throw DomainError("preparation angle must lie in (0, pi/2]");
  if (!(omega > 0)) throw DomainError("reservoir gap must be positive");
  const double c = 1.0 / std::tan(alpha / 2.0);
  return std::log(c * c) / omega;
}

inline double alpha_from_beta(double beta, double omega) {
  if (beta < 0) throw DomainError("inverse temperature must be >= 0");
  if (!(omega > 0)) throw DomainError("reservoir gap must be positive");
  return 2.0 * std::atan(std::exp(-0.5 * beta * omega));
}

inline ThermalReservoirSpec ThermalReservoirSpec::from_alpha(double alpha, double omega,
                                                             std::string label) {
  return ThermalReservoirSpec(omega, beta_from_alpha(alpha, omega), std::move(label));
}

/// exp(-beta H)/Z in the eigenbasis of H. beta = +infinity selects the
/// ground-state projector (uniform over a degenerate ground space).
inline DensityOperator gibbs_state(const Observable& h, double beta) {
  if (beta < 0 || std::isnan(beta)) throw DomainError("inverse temperature must be >= 0");
  const EighResult es = eigh(h);
  const Eigen::Index d = es.eigenvalues.size();
  Eigen::VectorXd pops(d);
  const double e_min = es.eigenvalues.minCoeff();
  if (std::isinf(beta)) {
    const double span = std::max(1.0, es.eigenvalues.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < d; ++i)
      pops(i) = (es.eigenvalues(i) - e_min < 1e-12 * span) ? 1.0 : 0.0;
  } else {
    for (Eigen::Index i = 0; i < d; ++i) pops(i) = std::exp(-beta * (es.eigenvalues(i) - e_min));
  }
  pops /= pops.sum();
  Matrix m = es.eigenvectors * pops.asDiagonal() * es.eigenvectors.adjoint();
  return DensityOperator(h.reg(), std::move(m));
}

/// -tr[rho log rho] in nats, with 0 log 0 := 0. Eigenvalues in [-1e-10, 0)
/// are clipped to zero inside the computation only.
inline double von_neumann_entropy(const DensityOperator& rho) {
  const EighResult es = eigh(rho.matrix());
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
    const double p = es.eigenvalues(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

/// Delta S = S(before) - S(after); positive when information was erased.
inline double entropy_change(const DensityOperator& before, const DensityOperator& after) {
  if (before.reg() != after.reg())
    throw ShapeError("entropy_change: registers differ: " + before.reg().str() + " vs " +
                     after.reg().str());
  return von_neumann_entropy(before) - von_neumann_entropy(after);
}

/// <Q> = tr[H (rho_after - rho_before)].
inline double average_heat(const Observable& h, const DensityOperator& before,
                           const DensityOperator& after) {
  if (before.reg() != after.reg() || h.reg() != before.reg())
    throw ShapeError("average_heat: Hamiltonian and states must share one register");
  return expectation(after, h) - expectation(before, h);
}

/// D(x||y) = tr[x log x] - tr[x log y] in nats. Returns +infinity when the
/// support of x leaks outside the support of y, so sweep reports stay
/// machine-readable.
inline double relative_entropy(const DensityOperator& x, const DensityOperator& y) {
  if (x.reg() != y.reg())
    throw ShapeError("relative_entropy: registers differ: " + x.reg().str() + " vs " +
                     y.reg().str());
  constexpr double support_tol = 1e-12;
  const EighResult ey = eigh(y.matrix());
  double cross = 0.0;  // -tr[x log y]
  for (Eigen::Index i = 0; i < ey.eigenvalues.size(); ++i) {
    const double mu = ey.eigenvalues(i);
    const double w =
        std::max(0.0, (ey.eigenvectors.col(i).adjoint() * x.matrix() * ey.eigenvectors.col(i))
                          .value()
                          .real());
    if (mu <= support_tol) {
      if (w > support_tol) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross -= w * std::log(mu);
  }
  return cross - von_neumann_entropy(x);
}

/// I(A:B) = S(A) + S(B) - S(AB) for a bipartition of `joint`.
inline double mutual_information(const DensityOperator& joint,
                                 const std::vector<std::string>& part_a,
                                 const std::vector<std::string>& part_b) {
  QubitRegister ra(part_a), rb(part_b);
  for (const auto& l : ra.labels())
    if (rb.contains(l)) throw LookupError("mutual_information: partitions overlap on '" + l + "'");
  if (QubitRegister::merge(ra, rb) != joint.reg())
    throw LookupError("mutual_information: partition does not cover register " +
                      joint.reg().str());
  const double sa = von_neumann_entropy(partial_trace(joint, part_a));
  const double sb = von_neumann_entropy(partial_trace(joint, part_b));
  return sa + sb - von_neumann_entropy(joint);
}

/// Result of one Landauer process. All entropic quantities in nats,
/// beta_heat dimensionless. The two identities
///   sigma = beta_heat - delta_entropy
///   sigma = mutual_info + rel_entropy
/// hold within 1e-10 for every valid process and are asserted on
/// construction of the report.
struct LandauerReport {
  double delta_entropy;       // Delta S of the system
  double beta_heat;           // beta <Q>
  double entropy_production;  // <Sigma>
  double mutual_info;         // I(S':R')
  double rel_entropy;         // D(rho_R' || rho_R)
};

namespace detail {

/// Extract beta from a state that should be Gibbs w.r.t. `h`; throws
/// ProtocolError (naming criterion iii) if it is not thermal.
inline double extract_beta(const Observable& h, const DensityOperator& rho) {
  const EighResult es = eigh(h);
  const Matrix in_basis = es.eigenvectors.adjoint() * rho.matrix() * es.eigenvectors;
  double offdiag = 0.0;
  for (Eigen::Index i = 0; i < in_basis.rows(); ++i)
    for (Eigen::Index j = 0; j < in_basis.cols(); ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(in_basis(i, j)));
  if (offdiag > 1e-10)
    throw ProtocolError(
        "criterion (iii) violated: reservoir state does not commute with its Hamiltonian");

  // Fit log p = -beta E + c over populated levels and check the residual.
  std::vector<std::pair<double, double>> pts;  // (E, log p)
  for (Eigen::Index i = 0; i < in_basis.rows(); ++i) {
    const double p = in_basis(i, i).real();
    if (p > 1e-14) pts.emplace_back(es.eigenvalues(i), std::log(p));
  }
  if (pts.size() < 2) return std::numeric_limits<double>::infinity();  // ground projector
  double se = 0, sl = 0, see = 0, sel = 0;
  for (auto& [e, l] : pts) {
    se += e;
    sl += l;
    see += e * e;
    sel += e * l;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * see - se * se;
  if (std::abs(denom) < 1e-30)
    throw ProtocolError("criterion (iii) violated: reservoir Hamiltonian is fully degenerate");
  const double beta = -(n * sel - se * sl) / denom;
  const double c = (sl + beta * se) / n;
  for (auto& [e, l] : pts)
    if (std::abs(l - (c - beta * e)) > 1e-8)
      throw ProtocolError(
          "criterion (iii) violated: reservoir populations are not Boltzmann distributed");
  if (beta < -1e-12)
    throw ProtocolError("criterion (iii) violated: reservoir has negative temperature");
  return std::max(0.0, beta);
}

}  // namespace detail

/// Run the full Landauer process rho_R (x) rho_S -> U (.) U^dag and collect
/// the entropy/heat bookkeeping. The initial state is an uncorrelated product
/// by construction (criterion ii); the reservoir must be Gibbs w.r.t. h_r
/// (criterion iii) and u must act on R and S only (criteria i and iv).
inline LandauerReport landauer_analyze(const Observable& h_r, const DensityOperator& rho_s,
                                       const DensityOperator& rho_r, const UnitaryOperator& u) {
  if (h_r.reg() != rho_r.reg())
    throw ProtocolError("criterion (i) violated: reservoir Hamiltonian and state disagree on " +
                        h_r.reg().str() + " vs " + rho_r.reg().str());
  for (const auto& l : rho_s.reg().labels())
    if (rho_r.reg().contains(l))
      throw ProtocolError("criterion (ii) violated: system and reservoir share label '" + l +
                          "'");
  const QubitRegister rs = QubitRegister::merge(rho_r.reg(), rho_s.reg());
  if (!rs.contains_all(u.reg().labels()))
    throw ProtocolError("criterion (iv) violated: interaction acts outside system+reservoir");
  const double beta = detail::extract_beta(h_r, rho_r);

  const DensityOperator joint = tensor_compose(rho_r, rho_s);
  const DensityOperator joint_out = evolve(joint, u);
  const DensityOperator rho_s_out = partial_trace(joint_out, rho_s.reg().labels());
  const DensityOperator rho_r_out = partial_trace(joint_out, rho_r.reg().labels());

  LandauerReport rep{};
  rep.delta_entropy = entropy_change(rho_s, rho_s_out);
  rep.beta_heat = beta * average_heat(h_r, rho_r, rho_r_out);
  rep.entropy_production = rep.beta_heat - rep.delta_entropy;
  rep.mutual_info = mutual_information(joint_out, rho_s.reg().labels(), rho_r.reg().labels());
  rep.rel_entropy = relative_entropy(rho_r_out, rho_r);

  if (std::isfinite(rep.entropy_production)) {
    const double defect = std::abs(rep.entropy_production - (rep.mutual_info + rep.rel_entropy));
    if (defect > 1e-10) {
      std::ostringstream os;
      os << "entropy production decomposition violated by " << defect;
      throw ProtocolError(os.str());
    }
  }
  return rep;
}

inline LandauerReport landauer_analyze(const ThermalReservoirSpec& reservoir,
                                       const DensityOperator& rho_s, const UnitaryOperator& u) {
  return landauer_analyze(reservoir.hamiltonian(), rho_s, reservoir.state(), u);
}

}  // namespace landauer
