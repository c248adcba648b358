#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "landauer/experiment.hpp"
#include "test_util.hpp"

using namespace landauer;

namespace {

double binary_entropy(double p) {
  double s = 0;
  if (p > 0) s -= p * std::log(p);
  if (p < 1) s -= (1 - p) * std::log(1 - p);
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(GapFit, TwoRowExample) {
  auto fit = fit_reservoir_gap({{123, 3.3}, {1775, 0.051}});
  // Root-finding each row and averaging lands near 2 pi x 129 Hz.
  EXPECT_NEAR(fit.gap, 811.0, 4.0);
  EXPECT_NEAR(fit.gap / (2 * pi), 129.0, 1.0);
  EXPECT_LT(fit.max_gap_spread(), 0.02);
}

TEST(GapFit, SyntheticRowIsInvertedExactly) {
  const double true_gap = 777.7;
  const double f = 300.0;
  auto fit = fit_reservoir_gap({{f, cnot_gamma_theory(true_gap / f)}});
  EXPECT_NEAR(fit.per_row_gap[0], true_gap, 1e-10);
  EXPECT_NEAR(fit.gap, true_gap, 1e-7);
  EXPECT_LT(fit.max_abs_residual(), 1e-10);
}

TEST(GapFit, InconsistentRowsAreFlagged) {
  const double f1 = 200.0, f2 = 900.0;
  auto fit = fit_reservoir_gap(
      {{f1, cnot_gamma_theory(700.0 / f1)}, {f2, cnot_gamma_theory(1000.0 / f2)}});
  EXPECT_FALSE(fit.consistent());
  EXPECT_GT(fit.max_gap_spread(), 0.1);
}

TEST(GapFit, InputValidation) {
  EXPECT_THROW(fit_reservoir_gap({}), FitError);
  EXPECT_THROW(fit_reservoir_gap({{-1.0, 3.3}}), DomainError);
  EXPECT_THROW(invert_cnot_gamma(-0.5), DomainError);
}

TEST(GapFit, ReferenceRowsAreMutuallyConsistent) {
  auto fit = fit_reservoir_gap(cnot_calibration_rows());
  EXPECT_TRUE(fit.consistent(0.02));
  EXPECT_LT(fit.max_abs_residual(), 0.02);
  EXPECT_NEAR(fit.gap, 805.6, 1.0);
}

TEST(CnotSweep, ReferenceTemperatures) {
  ExperimentConfig cfg = ExperimentConfig::cnot_defaults();
  auto rows = run_cnot_sweep(cfg);
  ASSERT_EQ(rows.size(), 13u);
  for (const auto& row : rows) {
    EXPECT_LT(std::abs(row.delta_s), 1e-12);
    EXPECT_NEAR(row.sigma, row.beta_q, 1e-10);
    EXPECT_NEAR(row.beta_q, row.gamma_theory, 1e-8);
    EXPECT_GT(row.p_neg_heat, 0.0);
    EXPECT_TRUE(std::isnan(row.phi));
  }
  // Spot values against the reference column at its print precision.
  EXPECT_NEAR(rows[0].beta_q, 3.3, 0.066);
  EXPECT_NEAR(rows[7].beta_q, 0.46, 0.0092);
  EXPECT_NEAR(rows[11].beta_q, 0.051, 0.00102);
}

TEST(CnotSweep, InfiniteTemperatureRowIsAllZero) {
  ExperimentConfig cfg;
  cfg.beta_inv_hz = {std::numeric_limits<double>::infinity()};
  auto rows = run_cnot_sweep(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].delta_s, 0.0, 1e-12);
  EXPECT_NEAR(rows[0].beta_q, 0.0, 1e-12);
  EXPECT_NEAR(rows[0].sigma, 0.0, 1e-12);
  EXPECT_NEAR(rows[0].mutual_info, 0.0, 1e-10);
  EXPECT_NEAR(rows[0].rel_entropy, 0.0, 1e-10);
  EXPECT_NEAR(rows[0].p_neg_heat, 0.25, 1e-12);
}

TEST(CnotSweep, RejectsBadConfigs) {
  ExperimentConfig empty;
  EXPECT_THROW(run_cnot_sweep(empty), ConfigError);
  ExperimentConfig noisy_ideal = ExperimentConfig::cnot_defaults();
  noisy_ideal.noise = true;
  EXPECT_THROW(run_cnot_sweep(noisy_ideal), ConfigError);
}

TEST(SwapSweep, ClosedFormsAcrossAngles) {
  ExperimentConfig cfg = ExperimentConfig::swap_defaults();
  cfg.phis.insert(cfg.phis.begin(), 0.0);
  auto rows = run_partial_swap_sweep(cfg);
  ASSERT_EQ(rows.size(), 8u);

  // phi = 0: identity row.
  EXPECT_NEAR(rows[0].delta_s, 0.0, 1e-12);
  EXPECT_NEAR(rows[0].beta_q, 0.0, 1e-12);
  EXPECT_NEAR(rows[0].sigma, 0.0, 1e-12);

  const double x = cfg.resolved_gap() / (2 * pi) / 123.0 * 2 * pi;
  const double p0 = 1 / (1 + std::exp(-x));
  for (const auto& row : rows) {
    EXPECT_GE(row.beta_q - row.delta_s, -1e-10);  // Landauer bound per row
    EXPECT_NEAR(row.sigma, row.mutual_info + row.rel_entropy, 1e-10);
  }
  // phi = pi: full erasure closed forms.
  const auto& full = rows[6];
  EXPECT_NEAR(full.phi, pi, 1e-15);
  EXPECT_NEAR(full.delta_s, std::log(2.0) - binary_entropy(p0), 1e-10);
  EXPECT_NEAR(full.beta_q, 0.5 * x * std::tanh(0.5 * x), 1e-10);
  // phi = pi/2: strictly positive production at finite reservoir size.
  EXPECT_GT(rows[3].sigma, 1e-6);
  // The out-of-range angle is annotated.
  EXPECT_NEAR(rows[7].phi, 3 * pi / 2, 1e-15);
  EXPECT_FALSE(rows[7].note.empty());
  EXPECT_TRUE(rows[6].note.empty());
}

TEST(SwapSweep, PulseModeMatchesIdealRows) {
  ExperimentConfig ideal = ExperimentConfig::swap_defaults();
  ideal.phis = {pi / 3, pi};
  ExperimentConfig pulse = ideal;
  pulse.mode = SimMode::pulse;
  auto rows_i = run_partial_swap_sweep(ideal);
  auto rows_p = run_partial_swap_sweep(pulse);
  ASSERT_EQ(rows_i.size(), rows_p.size());
  for (std::size_t k = 0; k < rows_i.size(); ++k) {
    EXPECT_NEAR(rows_i[k].delta_s, rows_p[k].delta_s, 1e-5);
    EXPECT_NEAR(rows_i[k].beta_q, rows_p[k].beta_q, 1e-5);
    EXPECT_NEAR(rows_i[k].sigma, rows_p[k].sigma, 1e-5);
    EXPECT_NEAR(rows_i[k].mutual_info, rows_p[k].mutual_info, 1e-5);
    EXPECT_NEAR(rows_i[k].rel_entropy, rows_p[k].rel_entropy, 1e-5);
    EXPECT_NEAR(rows_i[k].p_neg_heat, rows_p[k].p_neg_heat, 1e-5);
  }
}

TEST(Report, EmptyRowListGivesHeaderOnly) {
  emit_report({}, ReportFormat::csv, "report_empty.csv");
  EXPECT_EQ(slurp("report_empty.csv"), std::string(report_header()) + "\n");
  std::remove("report_empty.csv");
}

TEST(Report, ThirteenRowSweepRoundTrips) {
  auto rows = run_cnot_sweep(ExperimentConfig::cnot_defaults());
  emit_report(rows, ReportFormat::csv, "report13.csv");
  {
    std::ifstream in("report13.csv");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    EXPECT_EQ(lines, 14);  // header + 13 data rows
  }
  auto parsed = parse_report("report13.csv", ReportFormat::csv);
  ASSERT_EQ(parsed.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(parsed[i].beta_q, rows[i].beta_q, 1e-10 * std::max(1.0, rows[i].beta_q));
    EXPECT_NEAR(parsed[i].sigma, rows[i].sigma, 1e-10 * std::max(1.0, rows[i].sigma));
    EXPECT_EQ(parsed[i].mode, rows[i].mode);
  }
  std::remove("report13.csv");
}

TEST(Report, JsonAndCsvParseToIdenticalValues) {
  ExperimentConfig cfg = ExperimentConfig::swap_defaults();
  cfg.phis = {pi / 2, pi, 3 * pi / 2};
  auto rows = run_partial_swap_sweep(cfg);
  emit_report(rows, ReportFormat::csv, "report_eq.csv");
  emit_report(rows, ReportFormat::json, "report_eq.json");
  auto from_csv = parse_report("report_eq.csv", ReportFormat::csv);
  auto from_json = parse_report("report_eq.json", ReportFormat::json);
  ASSERT_EQ(from_csv.size(), from_json.size());
  for (std::size_t i = 0; i < from_csv.size(); ++i) {
    EXPECT_NEAR(from_csv[i].phi, from_json[i].phi, 1e-10);
    EXPECT_NEAR(from_csv[i].beta_q, from_json[i].beta_q, 1e-10);
    EXPECT_NEAR(from_csv[i].delta_s, from_json[i].delta_s, 1e-10);
    EXPECT_NEAR(from_csv[i].p_neg_heat, from_json[i].p_neg_heat, 1e-10);
    EXPECT_EQ(from_csv[i].note, from_json[i].note);
  }
  std::remove("report_eq.csv");
  std::remove("report_eq.json");
}

TEST(Report, DeterministicBytes) {
  auto rows = run_cnot_sweep(ExperimentConfig::cnot_defaults());
  emit_report(rows, ReportFormat::csv, "det_a.csv");
  auto rows_again = run_cnot_sweep(ExperimentConfig::cnot_defaults());
  emit_report(rows_again, ReportFormat::csv, "det_b.csv");
  EXPECT_EQ(slurp("det_a.csv"), slurp("det_b.csv"));
  std::remove("det_a.csv");
  std::remove("det_b.csv");
}
