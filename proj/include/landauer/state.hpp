#pragma once

// Dense operator algebra on labelled qubit registers: density operators,
// unitaries, observables, Kraus channels, and the contraction/evolution
// operations connecting them. Everything is immutable after construction
// and validated against the type invariants at construction time.

#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "landauer/core.hpp"
#include "landauer/register.hpp"

namespace landauer {

namespace detail {

inline void check_square(const Matrix& m, Eigen::Index dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream os;
    os << what << ": matrix is " << m.rows() << "x" << m.cols() << ", register dimension is "
       << dim;
    throw ShapeError(os.str());
  }
}

inline double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Extract the sub-index of `idx` formed by the bits at `positions`
/// (msb-first order of the sub-register).
inline Eigen::Index extract_bits(Eigen::Index idx, const std::vector<std::size_t>& positions,
                                 std::size_t n_full) {
  Eigen::Index sub = 0;
  for (std::size_t p : positions) sub = (sub << 1) | ((idx >> (n_full - 1 - p)) & 1);
  return sub;
}

/// Embed `op` (on `sub`) into `full` with identity on the remaining qubits.
inline Matrix embed(const Matrix& op, const QubitRegister& sub, const QubitRegister& full) {
  if (sub == full) return op;
  if (!full.contains_all(sub.labels()))
    throw ShapeError("operator register " + sub.str() + " is not contained in " + full.str());
  const std::size_t n = full.size();
  std::vector<std::size_t> sub_pos, rest_pos;
  for (const auto& l : sub.labels()) sub_pos.push_back(full.position(l));
  for (std::size_t p = 0; p < n; ++p)
    if (std::find(sub_pos.begin(), sub_pos.end(), p) == sub_pos.end()) rest_pos.push_back(p);

  const Eigen::Index dim = full.dim();
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Eigen::Index ri = extract_bits(i, rest_pos, n);
    const Eigen::Index si = extract_bits(i, sub_pos, n);
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (extract_bits(j, rest_pos, n) != ri) continue;
      out(i, j) = op(si, extract_bits(j, sub_pos, n));
    }
  }
  return out;
}

}  // namespace detail

/// Hermitian, unit-trace, positive matrix on a labelled register.
class DensityOperator {
 public:
  DensityOperator(QubitRegister reg, Matrix matrix)
      : reg_(std::move(reg)), matrix_(std::move(matrix)) {
    detail::check_square(matrix_, reg_.dim(), "DensityOperator");
    const double herm = detail::hermiticity_defect(matrix_);
    if (herm > tol::hermitian) {
      std::ostringstream os;
      os << "density matrix not Hermitian (defect " << herm << ")";
      throw ValidationError(os.str());
    }
    const double trace_defect = std::abs(matrix_.trace() - cx(1.0, 0.0));
    if (trace_defect > tol::trace) {
      std::ostringstream os;
      os << "density matrix trace differs from 1 by " << trace_defect;
      throw ValidationError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol::eigenvalue) {
      std::ostringstream os;
      os << "density matrix has negative eigenvalue " << min_eig;
      throw ValidationError(os.str());
    }
  }

  const QubitRegister& reg() const { return reg_; }
  const Matrix& matrix() const { return matrix_; }

  static DensityOperator pure(QubitRegister reg, const Vector& psi) {
    Vector v = psi / psi.norm();
    return DensityOperator(std::move(reg), v * v.adjoint());
  }

  /// Computational-basis state |b0 b1 ...> with bits in register label order.
  static DensityOperator basis_state(QubitRegister reg, Eigen::Index index) {
    Matrix m = Matrix::Zero(reg.dim(), reg.dim());
    m(index, index) = 1.0;
    return DensityOperator(std::move(reg), std::move(m));
  }

  static DensityOperator maximally_mixed(QubitRegister reg) {
    const Eigen::Index d = reg.dim();
    return DensityOperator(std::move(reg), Matrix::Identity(d, d) / static_cast<double>(d));
  }

 private:
  QubitRegister reg_;
  Matrix matrix_;
};

/// Unitary matrix on a labelled (sub-)register.
class UnitaryOperator {
 public:
  UnitaryOperator(QubitRegister reg, Matrix matrix)
      : reg_(std::move(reg)), matrix_(std::move(matrix)) {
    detail::check_square(matrix_, reg_.dim(), "UnitaryOperator");
    const Matrix defect =
        matrix_.adjoint() * matrix_ - Matrix::Identity(reg_.dim(), reg_.dim());
    const double u = defect.cwiseAbs().maxCoeff();
    if (u > tol::unitary) {
      std::ostringstream os;
      os << "matrix is not unitary (defect " << u << ")";
      throw ValidationError(os.str());
    }
  }

  const QubitRegister& reg() const { return reg_; }
  const Matrix& matrix() const { return matrix_; }

  UnitaryOperator dagger() const { return UnitaryOperator(reg_, matrix_.adjoint()); }

  static UnitaryOperator identity(QubitRegister reg) {
    const Eigen::Index d = reg.dim();
    return UnitaryOperator(std::move(reg), Matrix::Identity(d, d));
  }

 private:
  QubitRegister reg_;
  Matrix matrix_;
};

/// Hermitian matrix on a labelled (sub-)register. Dimensionless for Pauli
/// observables, rad/s for Hamiltonians.
class Observable {
 public:
  Observable(QubitRegister reg, Matrix matrix)
      : reg_(std::move(reg)), matrix_(std::move(matrix)) {
    detail::check_square(matrix_, reg_.dim(), "Observable");
    const double herm = detail::hermiticity_defect(matrix_);
    if (herm > tol::hermitian) {
      std::ostringstream os;
      os << "observable not Hermitian (defect " << herm << ")";
      throw ValidationError(os.str());
    }
  }

  const QubitRegister& reg() const { return reg_; }
  const Matrix& matrix() const { return matrix_; }

 private:
  QubitRegister reg_;
  Matrix matrix_;
};

/// CPTP map in Kraus form on a sub-register. Completeness sum_k K_k^dag K_k = 1
/// is enforced at construction.
class QuantumChannel {
 public:
  QuantumChannel(QubitRegister reg, std::vector<Matrix> kraus)
      : reg_(std::move(reg)), kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw ValidationError("channel needs at least one Kraus operator");
    Matrix sum = Matrix::Zero(reg_.dim(), reg_.dim());
    for (const auto& k : kraus_) {
      detail::check_square(k, reg_.dim(), "QuantumChannel");
      sum += k.adjoint() * k;
    }
    const double defect =
        (sum - Matrix::Identity(reg_.dim(), reg_.dim())).cwiseAbs().maxCoeff();
    if (defect > tol::kraus) {
      std::ostringstream os;
      os << "Kraus set is not trace preserving (completeness defect " << defect << ")";
      throw ValidationError(os.str());
    }
  }

  const QubitRegister& reg() const { return reg_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

 private:
  QubitRegister reg_;
  std::vector<Matrix> kraus_;
};

/// Tensor product of states on disjoint registers. The factor order in the
/// result follows the canonical label order of the union register, not the
/// argument order.
inline DensityOperator tensor_compose(const std::vector<DensityOperator>& factors) {
  if (factors.empty()) throw ValidationError("tensor_compose needs at least one factor");
  QubitRegister full = factors.front().reg();
  for (std::size_t i = 1; i < factors.size(); ++i)
    full = QubitRegister::merge(full, factors[i].reg());
  Matrix out = Matrix::Identity(full.dim(), full.dim());
  for (const auto& f : factors) out = out * detail::embed(f.matrix(), f.reg(), full);
  return DensityOperator(std::move(full), std::move(out));
}

inline DensityOperator tensor_compose(const DensityOperator& a, const DensityOperator& b) {
  return tensor_compose(std::vector<DensityOperator>{a, b});
}

/// Operator variant, e.g. for assembling multi-qubit Hamiltonians.
inline Observable tensor_compose(const std::vector<Observable>& factors) {
  if (factors.empty()) throw ValidationError("tensor_compose needs at least one factor");
  QubitRegister full = factors.front().reg();
  for (std::size_t i = 1; i < factors.size(); ++i)
    full = QubitRegister::merge(full, factors[i].reg());
  Matrix out = Matrix::Identity(full.dim(), full.dim());
  for (const auto& f : factors) out = out * detail::embed(f.matrix(), f.reg(), full);
  return Observable(std::move(full), std::move(out));
}

/// Contract away all qubits not in `keep`.
inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<std::string>& keep) {
  if (keep.empty()) throw LookupError("partial_trace: keep set must be nonempty");
  QubitRegister kept(keep);
  const QubitRegister& full = rho.reg();
  std::vector<std::size_t> keep_pos, rest_pos;
  for (const auto& l : kept.labels()) keep_pos.push_back(full.position(l));
  for (std::size_t p = 0; p < full.size(); ++p)
    if (std::find(keep_pos.begin(), keep_pos.end(), p) == keep_pos.end()) rest_pos.push_back(p);

  const Eigen::Index dim = full.dim();
  Matrix out = Matrix::Zero(kept.dim(), kept.dim());
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Eigen::Index ki = detail::extract_bits(i, keep_pos, full.size());
    const Eigen::Index ri = detail::extract_bits(i, rest_pos, full.size());
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (detail::extract_bits(j, rest_pos, full.size()) != ri) continue;
      out(ki, detail::extract_bits(j, keep_pos, full.size())) += rho.matrix()(i, j);
    }
  }
  return DensityOperator(std::move(kept), std::move(out));
}

/// rho -> U rho U^dag. The unitary may live on a sub-register; it is embedded
/// with identity on the rest.
inline DensityOperator evolve(const DensityOperator& rho, const UnitaryOperator& u) {
  const Matrix u_full = detail::embed(u.matrix(), u.reg(), rho.reg());
  return DensityOperator(rho.reg(), u_full * rho.matrix() * u_full.adjoint());
}

inline DensityOperator apply_channel(const DensityOperator& rho, const QuantumChannel& ch) {
  Matrix out = Matrix::Zero(rho.reg().dim(), rho.reg().dim());
  for (const auto& k : ch.kraus()) {
    const Matrix k_full = detail::embed(k, ch.reg(), rho.reg());
    out += k_full * rho.matrix() * k_full.adjoint();
  }
  return DensityOperator(rho.reg(), std::move(out));
}

/// tr(rho O). The imaginary residue must stay below 1e-10.
inline double expectation(const DensityOperator& rho, const Observable& obs) {
  const Matrix o_full = detail::embed(obs.matrix(), obs.reg(), rho.reg());
  const cx value = (rho.matrix() * o_full).trace();
  if (std::abs(value.imag()) > 1e-10) {
    std::ostringstream os;
    os << "expectation value has imaginary residue " << value.imag();
    throw ValidationError(os.str());
  }
  return value.real();
}

struct EighResult {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix eigenvectors;          // columns, orthonormal
};

inline EighResult eigh(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw ValidationError("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline EighResult eigh(const Observable& obs) { return eigh(obs.matrix()); }

/// (1/2) ||a - b||_1 for Hermitian a, b.
inline double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.reg() != b.reg())
    throw ShapeError("trace_distance: registers differ: " + a.reg().str() + " vs " +
                     b.reg().str());
  const EighResult es = eigh(Matrix(a.matrix() - b.matrix()));
  return 0.5 * es.eigenvalues.cwiseAbs().sum();
}

namespace paulis {
inline Matrix x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
inline Matrix y() { return (Matrix(2, 2) << 0, cx(0, -1), cx(0, 1), 0).finished(); }
inline Matrix z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }
}  // namespace paulis

inline Observable pauli_observable(const std::string& label, char axis) {
  QubitRegister reg({label});
  switch (axis) {
    case 'x': return Observable(reg, paulis::x());
    case 'y': return Observable(reg, paulis::y());
    case 'z': return Observable(reg, paulis::z());
    default: throw LookupError(std::string("unknown Pauli axis '") + axis + "'");
  }
}

}  // namespace landauer
