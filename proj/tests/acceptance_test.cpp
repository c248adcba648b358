// End-to-end acceptance suite. Each test covers one exit criterion and
// prints a single summary line with the measured margin.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "landauer/landauer.hpp"
#include "test_util.hpp"

using namespace landauer;

namespace {

const MoleculeSpec& molecule() {
  static const MoleculeSpec m = MoleculeSpec::reference();
  return m;
}

const GapFit& calibration() {
  static const GapFit fit = fit_reservoir_gap(cnot_calibration_rows());
  return fit;
}

ExperimentConfig calibrated_cnot_config() {
  ExperimentConfig cfg = ExperimentConfig::cnot_defaults();
  cfg.gap = calibration().gap;
  return cfg;
}

ExperimentConfig calibrated_swap_config() {
  ExperimentConfig cfg = ExperimentConfig::swap_defaults();
  cfg.gap = calibration().gap;
  return cfg;
}

DensityOperator mixed_system() {
  return DensityOperator::maximally_mixed(QubitRegister({"S"}));
}

std::vector<Process> sweep_processes() {
  std::vector<Process> ps;
  ps.push_back(Process::cnot_process());
  for (double phi : reference_swap_angles()) ps.push_back(Process::partial_swap_process(phi));
  return ps;
}

void report(const char* tag, const std::string& detail) {
  std::cout << "[criterion " << tag << "] " << detail << "\n";
}

}  // namespace

TEST(Acceptance, Criterion01_ReferenceSweepReproduction) {
  const auto t0 = std::chrono::steady_clock::now();
  const GapFit& fit = calibration();
  auto rows = run_cnot_sweep(calibrated_cnot_config());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto& ref = cnot_calibration_rows();
  ASSERT_EQ(rows.size(), ref.size());
  double worst = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double rel = std::abs(rows[i].beta_q - ref[i].gamma) / ref[i].gamma;
    worst = std::max(worst, rel);
    EXPECT_LT(rel, 0.02) << "at (beta hbar)^{-1} = " << ref[i].beta_inv_hz << " Hz";
  }
  EXPECT_LT(seconds, 1.0);
  std::ostringstream os;
  os << "13-temperature beta<Q> vs reference within 2% (worst " << worst * 100 << "%), gap "
     << fit.gap << " rad/s, runtime " << seconds << " s";
  report("01", os.str());
}

TEST(Acceptance, Criterion02_GapFitConsistency) {
  const GapFit& fit = calibration();
  EXPECT_LT(fit.max_gap_spread(), 0.02);
  std::ostringstream os;
  os << "per-row gaps within " << fit.max_gap_spread() * 100 << "% of the fit ("
     << fit.gap / (2 * pi) << " Hz)";
  report("02", os.str());
}

TEST(Acceptance, Criterion03_CnotEntropyChangeVanishes) {
  auto rows = run_cnot_sweep(calibrated_cnot_config());
  double worst = 0;
  for (const auto& row : rows) {
    worst = std::max(worst, std::abs(row.delta_s));
    EXPECT_LT(std::abs(row.delta_s), 1e-12);
  }
  std::ostringstream os;
  os << "|delta_S| <= " << worst << " across all temperatures";
  report("03", os.str());
}

TEST(Acceptance, Criterion04_EntropyProductionIdentities) {
  double worst = 0;
  auto check = [&](double sigma, double beta_q, double delta_s, double info, double div) {
    const double d1 = std::abs(sigma - (beta_q - delta_s));
    const double d2 = std::abs(sigma - (info + div));
    worst = std::max({worst, d1, d2});
    EXPECT_LT(d1, 1e-10);
    EXPECT_LT(d2, 1e-10);
  };
  for (const auto& row : run_cnot_sweep(calibrated_cnot_config()))
    check(row.sigma, row.beta_q, row.delta_s, row.mutual_info, row.rel_entropy);
  for (const auto& row : run_partial_swap_sweep(calibrated_swap_config()))
    check(row.sigma, row.beta_q, row.delta_s, row.mutual_info, row.rel_entropy);

  std::mt19937 rng(1234);
  const double gap = calibration().gap;
  std::uniform_real_distribution<double> beta_draw(0.0, 10.0 / gap);
  for (int rep = 0; rep < 200; ++rep) {
    ThermalReservoirSpec res(gap, beta_draw(rng));
    auto rho_s = testutil::random_density(QubitRegister({"S"}), rng);
    auto u = testutil::random_unitary(QubitRegister({"R", "S"}), rng);
    auto rep_out = landauer_analyze(res, rho_s, u);
    check(rep_out.entropy_production, rep_out.beta_heat, rep_out.delta_entropy,
          rep_out.mutual_info, rep_out.rel_entropy);
  }
  std::ostringstream os;
  os << "sigma identities hold to " << worst << " over sweeps and 200 random processes";
  report("04", os.str());
}

TEST(Acceptance, Criterion05_LandauerBound) {
  double most_negative = 0;
  auto check = [&](double sigma) {
    most_negative = std::min(most_negative, sigma);
    EXPECT_GE(sigma, -1e-10);
  };
  for (const auto& row : run_cnot_sweep(calibrated_cnot_config())) check(row.sigma);
  for (const auto& row : run_partial_swap_sweep(calibrated_swap_config())) check(row.sigma);
  std::mt19937 rng(1234);
  const double gap = calibration().gap;
  std::uniform_real_distribution<double> beta_draw(0.0, 10.0 / gap);
  for (int rep = 0; rep < 200; ++rep) {
    ThermalReservoirSpec res(gap, beta_draw(rng));
    auto rho_s = testutil::random_density(QubitRegister({"S"}), rng);
    auto u = testutil::random_unitary(QubitRegister({"R", "S"}), rng);
    check(landauer_analyze(res, rho_s, u).entropy_production);
  }
  std::ostringstream os;
  os << "sigma >= -1e-10 everywhere (most negative " << most_negative << ")";
  report("05", os.str());
}

TEST(Acceptance, Criterion06_OracleTriangle) {
  double worst_tv = 0, worst_theta = 0;
  for (double f_hz : {123.0, 862.0}) {
    ThermalReservoirSpec res =
        ThermalReservoirSpec::from_beta_inv_hz(f_hz, calibration().gap);
    const TimeGrid grid = TimeGrid::for_gap(res.gap(), 64);
    for (const auto& proc : sweep_processes()) {
      const UnitaryOperator u = proc.ideal();
      auto exact = tpm_distribution(mixed_system(), res, u);
      auto direct_trace = char_fn_direct(mixed_system(), res, u, grid);
      auto circuit_trace =
          char_fn_interferometric(mixed_system(), res, proc, grid, SimMode::ideal);
      for (int k = 0; k < grid.n; ++k)
        worst_theta =
            std::max(worst_theta, std::abs(circuit_trace.values[k] - direct_trace.values[k]));
      auto from_direct = invert_to_distribution(direct_trace, res);
      auto from_circuit = invert_to_distribution(circuit_trace, res);
      worst_tv = std::max({worst_tv, total_variation(exact, from_direct),
                           total_variation(exact, from_circuit),
                           total_variation(from_direct, from_circuit)});
    }
  }
  EXPECT_LT(worst_tv, 1e-8);
  EXPECT_LT(worst_theta, 1e-10);
  std::ostringstream os;
  os << "pairwise total variation <= " << worst_tv << ", circuit-vs-direct Theta deviation <= "
     << worst_theta << " over 64 samples";
  report("06", os.str());
}

TEST(Acceptance, Criterion07_MomentConsistency) {
  double worst = 0;
  const double gap = calibration().gap;
  for (const auto& ref : cnot_calibration_rows()) {
    ThermalReservoirSpec res = ThermalReservoirSpec::from_beta_inv_hz(ref.beta_inv_hz, gap);
    for (const auto& proc : sweep_processes()) {
      const UnitaryOperator u = proc.ideal();
      auto dist = tpm_distribution(mixed_system(), res, u);
      auto joint = tensor_compose(res.state(), mixed_system());
      auto rho_r_out = partial_trace(evolve(joint, u), {"R"});
      const double via_trace = average_heat(res.hamiltonian(), res.state(), rho_r_out);
      const double diff = std::abs(heat_moments(dist).mean - via_trace) / std::max(1.0, gap);
      worst = std::max(worst, diff);
      EXPECT_LT(diff, 1e-10);
    }
  }
  std::ostringstream os;
  os << "distribution mean matches the trace formula to " << worst << " (relative to the gap)";
  report("07", os.str());
}

TEST(Acceptance, Criterion08_FullSwapErasure) {
  std::mt19937 rng(99);
  ThermalReservoirSpec res(calibration().gap, 2.7 / calibration().gap);
  const UnitaryOperator swap = partial_swap("R", "S", pi);
  const DensityOperator target(QubitRegister({"S"}), res.state().matrix());
  double worst = 0;
  for (int rep = 0; rep < 50; ++rep) {
    auto rho_s = testutil::random_density(QubitRegister({"S"}), rng);
    auto out_s = partial_trace(evolve(tensor_compose(res.state(), rho_s), swap), {"S"});
    const double d = trace_distance(out_s, target);
    worst = std::max(worst, d);
    EXPECT_LE(d, 1e-12);
  }
  std::ostringstream os;
  os << "50 random system states land on the reservoir state within trace distance " << worst;
  report("08", os.str());
}

TEST(Acceptance, Criterion09_PulseLevelFidelity) {
  const MoleculeSpec& mol = molecule();
  double worst_process = 0;
  std::vector<GateRequest> requests = {GateRequest::cnot_gate()};
  for (double phi : reference_swap_angles())
    requests.push_back(GateRequest::partial_swap_angle(phi, mol));
  for (double t : {0.5e-3, 1.7e-3, 4.1e-3}) {
    requests.push_back(GateRequest::controlled_v_t(t, false));
    requests.push_back(GateRequest::controlled_v_t(t, true));
  }
  for (const auto& req : requests) {
    const PulseProgram prog = z_compensation(compile_pulse_program(req, mol), mol);
    const UnitaryOperator ideal(
        mol.reg(), detail::embed(prog.target->matrix(), prog.target->reg(), mol.reg()));
    const double d = process_distance(program_unitary(prog, mol), ideal);
    worst_process = std::max(worst_process, d);
    EXPECT_LT(d, 1e-6);
  }

  // Pulse-mode sweep rows against ideal-mode rows.
  ExperimentConfig ideal_cfg = calibrated_cnot_config();
  ideal_cfg.gap = reservoir_gap(mol);
  ExperimentConfig pulse_cfg = ideal_cfg;
  pulse_cfg.mode = SimMode::pulse;
  auto rows_i = run_cnot_sweep(ideal_cfg);
  auto rows_p = run_cnot_sweep(pulse_cfg);
  ExperimentConfig ideal_swap = calibrated_swap_config();
  ideal_swap.gap = reservoir_gap(mol);
  ExperimentConfig pulse_swap = ideal_swap;
  pulse_swap.mode = SimMode::pulse;
  auto swap_i = run_partial_swap_sweep(ideal_swap);
  auto swap_p = run_partial_swap_sweep(pulse_swap);
  rows_i.insert(rows_i.end(), swap_i.begin(), swap_i.end());
  rows_p.insert(rows_p.end(), swap_p.begin(), swap_p.end());
  double worst_row = 0;
  for (std::size_t k = 0; k < rows_i.size(); ++k) {
    for (double d :
         {rows_i[k].delta_s - rows_p[k].delta_s, rows_i[k].beta_q - rows_p[k].beta_q,
          rows_i[k].sigma - rows_p[k].sigma, rows_i[k].mutual_info - rows_p[k].mutual_info,
          rows_i[k].rel_entropy - rows_p[k].rel_entropy,
          rows_i[k].p_neg_heat - rows_p[k].p_neg_heat}) {
      worst_row = std::max(worst_row, std::abs(d));
      EXPECT_LT(std::abs(d), 1e-5);
    }
  }
  std::ostringstream os;
  os << "compiled gates within process distance " << worst_process
     << "; pulse rows match ideal rows to " << worst_row;
  report("09", os.str());
}

TEST(Acceptance, Criterion10_NegativeHeatFluctuations) {
  double smallest = 1.0;
  for (const auto& ref : cnot_calibration_rows()) {
    ThermalReservoirSpec res =
        ThermalReservoirSpec::from_beta_inv_hz(ref.beta_inv_hz, calibration().gap);
    auto moments = heat_moments(tpm_distribution(mixed_system(), res, cnot("S", "R")));
    smallest = std::min(smallest, moments.p_negative);
    EXPECT_GT(moments.p_negative, 0.0);
    // The averaged bound still holds while single atoms go negative.
    auto rep = landauer_analyze(res, mixed_system(), cnot("S", "R"));
    EXPECT_GE(rep.beta_heat - rep.delta_entropy, -1e-10);
  }
  ThermalReservoirSpec hot(calibration().gap, 0.0);
  auto symmetric = heat_moments(tpm_distribution(mixed_system(), hot, cnot("S", "R")));
  EXPECT_NEAR(symmetric.p_negative, 0.25, 1e-12);
  std::ostringstream os;
  os << "P(Q<0) > 0 at every finite temperature (smallest " << smallest
     << "); P(Q<0) = " << symmetric.p_negative << " at infinite temperature";
  report("10", os.str());
}

TEST(Acceptance, Criterion11_NoisePipeline) {
  const MoleculeSpec& mol = molecule();
  const NoiseSpec noise = NoiseSpec::from_molecule(mol);
  const double t2a = mol.t2star("A");
  ThermalReservoirSpec res = ThermalReservoirSpec::from_beta_inv_hz(123.0, reservoir_gap(mol));
  const TimeGrid grid = TimeGrid::for_gap(res.gap(), 8);

  auto noisy = char_fn_interferometric(mixed_system(), res, Process::cnot_process(), grid,
                                       SimMode::pulse, &mol, noise);
  auto clean = char_fn_interferometric(mixed_system(), res, Process::cnot_process(), grid,
                                       SimMode::pulse, &mol);
  double worst_fact = 0, longest = 0;
  for (int k = 0; k < grid.n; ++k) {
    const double envelope = std::exp(-noisy.acquisition_s[k] / t2a);
    worst_fact = std::max(worst_fact, std::abs(noisy.values[k] - envelope * clean.values[k]));
    longest = std::max(longest, noisy.acquisition_s[k]);
    EXPECT_LT(std::abs(noisy.values[k] - envelope * clean.values[k]), 1e-6);
  }
  ASSERT_LE(longest, t2a);  // acquisition spans stay inside the T2* regime

  auto corrected = invert_to_distribution(decay_correction(noisy, noise), res);
  const double q_corrected = heat_moments(corrected).mean;
  const double q_ideal =
      heat_moments(tpm_distribution(mixed_system(), res, cnot("S", "R"))).mean;
  const double rel = std::abs(q_corrected - q_ideal) / std::abs(q_ideal);
  EXPECT_LT(rel, 0.01);
  std::ostringstream os;
  os << "envelope factorization error <= " << worst_fact << ", corrected <Q> within "
     << rel * 100 << "% of the noiseless value (spans <= " << longest << " s <= T2*)";
  report("11", os.str());
}
