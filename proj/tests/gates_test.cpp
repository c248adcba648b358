#include <gtest/gtest.h>

#include <cmath>

#include "landauer/gates.hpp"
#include "landauer/thermo.hpp"
#include "test_util.hpp"

using namespace landauer;
using testutil::max_abs_diff;

namespace {

constexpr double kGap = 805.556775965;

const std::vector<double>& sweep_angles() {
  static const std::vector<double> phis = {pi / 6,     pi / 3, pi / 2,        2 * pi / 3,
                                           5 * pi / 6, pi,     3 * pi / 2};
  return phis;
}

Matrix swap_matrix() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = 1;
  return m;
}

}  // namespace

TEST(ElementaryGates, SpinorPeriodicity) {
  auto full_turn = rotation("A", Axis::x, 2 * pi);
  EXPECT_LE(max_abs_diff(full_turn.matrix(), -Matrix::Identity(2, 2)), 1e-15);
}

TEST(ElementaryGates, HadamardSquaresToIdentity) {
  auto h = hadamard("A");
  EXPECT_LE(max_abs_diff(h.matrix() * h.matrix(), Matrix::Identity(2, 2)), 1e-15);
  Vector zero(2);
  zero << 1, 0;
  Vector plus = h.matrix() * zero;
  EXPECT_NEAR(plus(0).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(plus(1).real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(ElementaryGates, CompositionsStayUnitary) {
  // Matrix product oracle: products of rotations must satisfy U^dag U = 1.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> angle(-2 * pi, 2 * pi);
  for (int rep = 0; rep < 50; ++rep) {
    Matrix u = rotation("A", Axis::y, angle(rng)).matrix() *
               rotation("A", Axis::x, angle(rng)).matrix() *
               rotation("A", Axis::z, angle(rng)).matrix();
    EXPECT_LE(max_abs_diff(u.adjoint() * u, Matrix::Identity(2, 2)), 1e-12);
  }
  EXPECT_THROW(rotation("A", Axis::x, std::nan("")), DomainError);
}

TEST(Cnot, MatchesComputationalBasisMatrix) {
  // Control sorts first here, giving the textbook block form.
  auto cn = cnot("A", "B");
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = expected(1, 1) = 1;
  expected(2, 3) = expected(3, 2) = 1;
  EXPECT_EQ(max_abs_diff(cn.matrix(), expected), 0.0);

  // |10> -> |11>, control off leaves the state alone.
  Vector in = Vector::Zero(4);
  in(2) = 1;
  Vector out = cn.matrix() * in;
  EXPECT_EQ(out(3), cx(1.0));
  in.setZero();
  in(1) = 1;
  EXPECT_EQ((cn.matrix() * in)(1), cx(1.0));
}

TEST(Cnot, SelfInverseAndLabelValidation) {
  auto cn = cnot("S", "R");
  EXPECT_EQ(max_abs_diff(cn.matrix() * cn.matrix(), Matrix::Identity(4, 4)), 0.0);
  EXPECT_THROW(cnot("R", "R"), ValidationError);
}

TEST(PartialSwap, LandmarkAngles) {
  EXPECT_EQ(max_abs_diff(partial_swap("R", "S", 0.0).matrix(), Matrix::Identity(4, 4)), 0.0);
  EXPECT_EQ(max_abs_diff(partial_swap("R", "S", pi).matrix(), swap_matrix()), 0.0);

  Matrix sqrt_swap = Matrix::Zero(4, 4);
  sqrt_swap(0, 0) = sqrt_swap(3, 3) = 1;
  sqrt_swap(1, 1) = sqrt_swap(2, 2) = cx(0.5, 0.5);
  sqrt_swap(1, 2) = sqrt_swap(2, 1) = cx(0.5, -0.5);
  EXPECT_EQ(max_abs_diff(partial_swap("R", "S", pi / 2).matrix(), sqrt_swap), 0.0);
}

TEST(PartialSwap, ComposesAdditively) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> angle(0, pi);
  for (int rep = 0; rep < 30; ++rep) {
    const double a = angle(rng), b = angle(rng);
    Matrix lhs = partial_swap("R", "S", a).matrix() * partial_swap("R", "S", b).matrix();
    EXPECT_LE(max_abs_diff(lhs, partial_swap("R", "S", a + b).matrix()), 1e-14);
  }
}

TEST(PartialSwap, SweepAnglesAreUnitaryAndSwapSymmetric) {
  for (double phi : sweep_angles()) {
    auto u = partial_swap("R", "S", phi);
    EXPECT_LE(max_abs_diff(u.matrix().adjoint() * u.matrix(), Matrix::Identity(4, 4)), 1e-12);
    EXPECT_LE(max_abs_diff(u.matrix() * swap_matrix(), swap_matrix() * u.matrix()), 1e-14);
  }
}

TEST(PartialSwap, FullSwapErasesAnySystemState) {
  std::mt19937 rng(31);
  const double x = 2.2;
  ThermalReservoirSpec res(kGap, x / kGap);
  auto swap = partial_swap("R", "S", pi);
  for (int rep = 0; rep < 50; ++rep) {
    auto rho_s = testutil::random_density(QubitRegister({"S"}), rng);
    auto out = evolve(tensor_compose(res.state(), rho_s), swap);
    auto marginal = partial_trace(out, {"S"});
    DensityOperator target(QubitRegister({"S"}), res.state().matrix());
    EXPECT_LE(trace_distance(marginal, target), 1e-12);
  }
}

TEST(ControlledV, IdentityCases) {
  ThermalReservoirSpec res(kGap, 1.0 / kGap);
  auto cv0 = controlled_v("A", res.hamiltonian(), 0.0);
  EXPECT_LE(max_abs_diff(cv0.matrix(), Matrix::Identity(4, 4)), 1e-15);

  // Control |0> leaves the reservoir untouched.
  auto cv = controlled_v("A", res.hamiltonian(), 1.3e-3);
  auto joint = tensor_compose(DensityOperator::basis_state(QubitRegister({"A"}), 0),
                              res.state());
  EXPECT_LE(max_abs_diff(evolve(joint, cv).matrix(), joint.matrix()), 1e-15);
  EXPECT_THROW(controlled_v("R", res.hamiltonian(), 1.0), ValidationError);
  EXPECT_THROW(controlled_v("A", res.hamiltonian(), -1.0), DomainError);
}

TEST(ControlledV, CoherencePhasesAtHalfPeriod) {
  // 4x4 evolution by hand: with control |+> and thermal rho_R, the ancilla
  // coherence block is rho_R v_t^dag / 2; at t = pi/omega the excited level
  // contributes the phase e^{i pi} = -1.
  const double x = 1.9;
  ThermalReservoirSpec res(kGap, x / kGap);
  const double t = pi / res.gap();
  Vector plus(2);
  plus << 1, 1;
  auto joint = tensor_compose(DensityOperator::pure(QubitRegister({"A"}), plus), res.state());
  auto out = evolve(joint, controlled_v("A", res.hamiltonian(), t));
  const double p0 = res.ground_population(), p1 = res.excited_population();
  // Basis order |a r>: coherence block <0 r| rho |1 r'>.
  EXPECT_NEAR(out.matrix()(0, 2).real(), p0 / 2, 1e-14);   // ground: e^{+i*0}
  EXPECT_NEAR(out.matrix()(1, 3).real(), -p1 / 2, 1e-12);  // excited: e^{+i pi}
  EXPECT_NEAR(std::abs(out.matrix()(1, 3).imag()), 0.0, 1e-12);
}

TEST(Interferometer, TrivialCases) {
  const double x = 2.3;
  ThermalReservoirSpec res(kGap, x / kGap);
  auto mixed_s = DensityOperator::maximally_mixed(QubitRegister({"S"}));
  auto identity_process = UnitaryOperator::identity(QubitRegister({"R", "S"}));

  for (double t : {0.0, 1e-3, 3.7e-3}) {
    auto circ = build_interferometer(identity_process, res.hamiltonian(), t);
    EXPECT_NEAR(std::abs(run_interferometer(circ, res.state(), mixed_s) - cx(1.0)), 0.0, 1e-12);
  }
  auto circ0 = build_interferometer(cnot("S", "R"), res.hamiltonian(), 0.0);
  EXPECT_NEAR(std::abs(run_interferometer(circ0, res.state(), mixed_s) - cx(1.0)), 0.0, 1e-12);
}

TEST(Interferometer, RejectsProcessOnAncilla) {
  ThermalReservoirSpec res(kGap, 1.0 / kGap);
  EXPECT_THROW(build_interferometer(cnot("A", "R"), res.hamiltonian(), 0.0), ProtocolError);
}

TEST(Interferometer, CnotMatchesAnalyticEnumeration) {
  // Analytic two-point-measurement enumeration for the CNOT on a maximally
  // mixed system: Theta(t) = 1/2 + (p0 e^{-i w t} + p1 e^{+i w t}) / 2.
  const double x = 6.577;
  ThermalReservoirSpec res(kGap, x / kGap);
  auto mixed_s = DensityOperator::maximally_mixed(QubitRegister({"S"}));
  const double p0 = res.ground_population(), p1 = res.excited_population();
  for (int k = 0; k < 16; ++k) {
    const double t = k * 2 * pi / (16 * res.gap());
    auto circ = build_interferometer(cnot("S", "R"), res.hamiltonian(), t);
    const cx theta = run_interferometer(circ, res.state(), mixed_s);
    const cx expected = 0.5 + 0.5 * (p0 * std::exp(cx(0, -res.gap() * t)) +
                                     p1 * std::exp(cx(0, res.gap() * t)));
    EXPECT_NEAR(std::abs(theta - expected), 0.0, 1e-12);
  }
}

TEST(Interferometer, MatchesSpectralSumForAllSweepAngles) {
  // Circuit estimator against the direct spectral sum over 64 samples.
  const double x = 1.7;
  ThermalReservoirSpec res(kGap, x / kGap);
  auto mixed_s = DensityOperator::maximally_mixed(QubitRegister({"S"}));
  const double p0 = res.ground_population();

  std::vector<UnitaryOperator> processes;
  processes.push_back(cnot("S", "R"));
  for (double phi : sweep_angles()) processes.push_back(partial_swap("R", "S", phi));

  for (const auto& u : processes) {
    double worst = 0;
    for (int k = 0; k < 64; ++k) {
      const double t = k * 2 * pi / (64 * res.gap());
      // Spectral sum: enumerate p_m p_{n|m} from the evolved projector.
      cx direct = 0;
      for (int m = 0; m < 2; ++m) {
        auto proj = DensityOperator::basis_state(QubitRegister({"R"}), m);
        auto out_r = partial_trace(evolve(tensor_compose(proj, mixed_s), u), {"R"});
        for (int n = 0; n < 2; ++n) {
          const double p_cond = out_r.matrix()(n, n).real();
          const double pm = m == 0 ? p0 : 1 - p0;
          direct += pm * p_cond * std::exp(cx(0, -res.gap() * (n - m) * t));
        }
      }
      auto circ = build_interferometer(u, res.hamiltonian(), t);
      worst = std::max(worst, std::abs(run_interferometer(circ, res.state(), mixed_s) - direct));
    }
    EXPECT_LT(worst, 1e-10);
  }
}
