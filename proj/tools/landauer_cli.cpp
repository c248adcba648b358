// Command-line front end: reservoir-gap calibration, the CNOT and
// partial-swap sweeps, and single-configuration characteristic-function /
// heat-distribution dumps. All numeric output goes through the library's
// deterministic emitters; the exit code is nonzero whenever a row-level
// invariant fails.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "landauer/landauer.hpp"

namespace {

using namespace landauer;

struct CommonOptions {
  std::string mode = "ideal";
  bool noise = false;
  std::string molecule_path;
  double gap = 0;  // rad/s; 0 selects the molecule default
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--mode", opt.mode, "simulation mode")
      ->check(CLI::IsMember({"ideal", "pulse"}));
  cmd->add_flag("--noise", opt.noise, "enable T2* phase damping (pulse mode)");
  cmd->add_option("--molecule", opt.molecule_path, "molecule config file");
  cmd->add_option("--gap", opt.gap, "reservoir gap in rad/s (default: calibrated value)");
  cmd->add_option("--out", opt.out, "output path");
  cmd->add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

ExperimentConfig make_config(const CommonOptions& opt) {
  ExperimentConfig cfg;
  cfg.mode = opt.mode == "pulse" ? SimMode::pulse : SimMode::ideal;
  cfg.noise = opt.noise;
  if (!opt.molecule_path.empty()) cfg.molecule = MoleculeSpec::load(opt.molecule_path);
  cfg.gap = opt.gap;
  return cfg;
}

std::vector<double> alphas_to_temps(const std::vector<double>& alphas, double gap) {
  std::vector<double> temps;
  for (double a : alphas) temps.push_back(1.0 / beta_from_alpha(a, gap));
  return temps;
}

std::vector<CalibrationRow> load_calibration_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open calibration rows '" + path + "'");
  std::vector<CalibrationRow> rows;
  std::string line;
  std::getline(in, line);  // header: beta_inv_hz,gamma
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string a, b;
    std::getline(is, a, ',');
    std::getline(is, b, ',');
    rows.push_back({std::stod(a), std::stod(b)});
  }
  return rows;
}

void emit_fit(const GapFit& fit, const std::vector<CalibrationRow>& rows,
              const CommonOptions& opt) {
  std::cout << std::setprecision(12) << "fitted gap: " << fit.gap << " rad/s ("
            << fit.gap / (2 * pi) << " Hz)\n"
            << "per-row gap spread: " << fit.max_gap_spread() * 100 << " %\n"
            << "max relative residual: " << fit.max_abs_residual() * 100 << " %\n";
  if (opt.out.empty()) return;
  if (opt.format == "json") {
    nlohmann::ordered_json doc;
    doc["gap_rad_s"] = fit.gap;
    doc["gap_hz"] = fit.gap / (2 * pi);
    doc["max_gap_spread"] = fit.max_gap_spread();
    doc["max_abs_residual"] = fit.max_abs_residual();
    doc["rows"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rows.size(); ++i)
      doc["rows"].push_back({{"beta_inv_hz", rows[i].beta_inv_hz},
                             {"gamma", rows[i].gamma},
                             {"row_gap_rad_s", fit.per_row_gap[i]},
                             {"residual", fit.residual[i]}});
    std::ofstream out(opt.out);
    if (!out) throw IoError("cannot write fit to '" + opt.out + "'");
    out << doc.dump(2) << "\n";
  } else {
    std::ofstream out(opt.out);
    if (!out) throw IoError("cannot write fit to '" + opt.out + "'");
    out << "beta_inv_hz,gamma,row_gap_rad_s,residual\n" << std::setprecision(12);
    for (std::size_t i = 0; i < rows.size(); ++i)
      out << rows[i].beta_inv_hz << "," << rows[i].gamma << "," << fit.per_row_gap[i] << ","
          << fit.residual[i] << "\n";
  }
}

void print_rows(const std::vector<ReportRow>& rows) {
  std::cout << report_header() << "\n" << std::setprecision(6);
  for (const auto& r : rows) {
    std::cout << r.beta_inv_hz << "," << r.phi << "," << r.delta_s << "," << r.beta_q << ","
              << r.sigma << "," << r.mutual_info << "," << r.rel_entropy << ","
              << r.gamma_theory << "," << r.p_neg_heat << "," << r.mode << ","
              << (r.noise ? 1 : 0) << "," << r.note << "\n";
  }
}

void finish_sweep(const std::vector<ReportRow>& rows, const CommonOptions& opt) {
  if (opt.out.empty()) {
    print_rows(rows);
    return;
  }
  emit_report(rows, opt.format == "json" ? ReportFormat::json : ReportFormat::csv, opt.out);
  std::cout << "wrote " << rows.size() << " rows to " << opt.out << "\n";
}

Process make_process(const std::string& name, double phi) {
  if (name == "cnot") return Process::cnot_process();
  if (name == "swap") return Process::partial_swap_process(phi);
  throw ConfigError("unknown process '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat statistics of elementary two-qubit gates on a three-spin register"};
  app.require_subcommand(1);

  // fit-gap
  auto* fit_cmd = app.add_subcommand(
      "fit-gap", "calibrate the reservoir gap against a CNOT temperature sweep");
  CommonOptions fit_opt;
  std::string rows_path;
  fit_cmd->add_option("--rows", rows_path,
                      "CSV of calibration rows (beta_inv_hz,gamma); default: built-in set");
  fit_cmd->add_option("--out", fit_opt.out, "output path");
  fit_cmd->add_option("--format", fit_opt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // sweep-cnot
  auto* cnot_cmd = app.add_subcommand("sweep-cnot", "CNOT temperature sweep");
  CommonOptions cnot_opt;
  std::vector<double> cnot_temps, cnot_alphas;
  cnot_cmd->add_option("--temps", cnot_temps, "temperatures as (beta hbar)^{-1} in Hz")
      ->delimiter(',');
  cnot_cmd->add_option("--alphas", cnot_alphas, "preparation angles in rad (alternative input)")
      ->delimiter(',');
  add_common(cnot_cmd, cnot_opt);

  // sweep-swap
  auto* swap_cmd = app.add_subcommand("sweep-swap", "partial-swap angle sweep");
  CommonOptions swap_opt;
  std::vector<double> swap_temps, swap_alphas, swap_phis;
  swap_cmd->add_option("--phis", swap_phis, "swap angles in rad")->delimiter(',');
  swap_cmd->add_option("--temps", swap_temps, "temperatures as (beta hbar)^{-1} in Hz")
      ->delimiter(',');
  swap_cmd->add_option("--alphas", swap_alphas, "preparation angles in rad (alternative input)")
      ->delimiter(',');
  add_common(swap_cmd, swap_opt);

  // trace
  auto* trace_cmd =
      app.add_subcommand("trace", "dump the characteristic function for one configuration");
  CommonOptions trace_opt;
  std::string trace_process = "cnot";
  double trace_phi = pi, trace_temp = 123.0;
  int trace_samples = 64;
  trace_cmd->add_option("--process", trace_process, "process")
      ->check(CLI::IsMember({"cnot", "swap"}));
  trace_cmd->add_option("--phi", trace_phi, "swap angle in rad");
  trace_cmd->add_option("--beta-inv-hz", trace_temp, "temperature as (beta hbar)^{-1} in Hz");
  trace_cmd->add_option("--samples", trace_samples, "grid samples over one gap period");
  add_common(trace_cmd, trace_opt);

  // distribution
  auto* dist_cmd =
      app.add_subcommand("distribution", "dump the heat distribution for one configuration");
  CommonOptions dist_opt;
  std::string dist_process = "cnot";
  double dist_phi = pi, dist_temp = 123.0;
  int dist_samples = 8;
  dist_cmd->add_option("--process", dist_process, "process")
      ->check(CLI::IsMember({"cnot", "swap"}));
  dist_cmd->add_option("--phi", dist_phi, "swap angle in rad");
  dist_cmd->add_option("--beta-inv-hz", dist_temp, "temperature as (beta hbar)^{-1} in Hz");
  dist_cmd->add_option("--samples", dist_samples,
                       "grid samples for the Fourier route (pulse mode)");
  add_common(dist_cmd, dist_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) {
      const auto rows =
          rows_path.empty() ? cnot_calibration_rows() : load_calibration_csv(rows_path);
      emit_fit(fit_reservoir_gap(rows), rows, fit_opt);
      return 0;
    }

    if (*cnot_cmd) {
      ExperimentConfig cfg = make_config(cnot_opt);
      cfg.beta_inv_hz = cnot_temps;
      if (!cnot_alphas.empty()) {
        auto extra = alphas_to_temps(cnot_alphas, cfg.resolved_gap());
        cfg.beta_inv_hz.insert(cfg.beta_inv_hz.end(), extra.begin(), extra.end());
      }
      if (cfg.beta_inv_hz.empty())
        for (const auto& row : cnot_calibration_rows()) cfg.beta_inv_hz.push_back(row.beta_inv_hz);
      finish_sweep(run_cnot_sweep(cfg), cnot_opt);
      return 0;
    }

    if (*swap_cmd) {
      ExperimentConfig cfg = make_config(swap_opt);
      cfg.phis = swap_phis.empty() ? reference_swap_angles() : swap_phis;
      cfg.beta_inv_hz = swap_temps;
      if (!swap_alphas.empty()) {
        auto extra = alphas_to_temps(swap_alphas, cfg.resolved_gap());
        cfg.beta_inv_hz.insert(cfg.beta_inv_hz.end(), extra.begin(), extra.end());
      }
      if (cfg.beta_inv_hz.empty()) cfg.beta_inv_hz = {123.0};
      finish_sweep(run_partial_swap_sweep(cfg), swap_opt);
      return 0;
    }

    if (*trace_cmd || *dist_cmd) {
      const CommonOptions& opt = *trace_cmd ? trace_opt : dist_opt;
      ExperimentConfig cfg = make_config(opt);
      const Process proc = make_process(*trace_cmd ? trace_process : dist_process,
                                        *trace_cmd ? trace_phi : dist_phi);
      const double temp = *trace_cmd ? trace_temp : dist_temp;
      const int samples = *trace_cmd ? trace_samples : dist_samples;
      ThermalReservoirSpec res = ThermalReservoirSpec::from_beta_inv_hz(
          temp, cfg.resolved_gap(), cfg.molecule.reservoir);
      const TimeGrid grid = TimeGrid::for_gap(res.gap(), samples);
      auto rho_s = DensityOperator::maximally_mixed(QubitRegister({cfg.molecule.system}));
      const NoiseSpec noise =
          cfg.noise ? NoiseSpec::from_molecule(cfg.molecule) : NoiseSpec::off();
      if (cfg.noise && cfg.mode != SimMode::pulse)
        throw ConfigError("phase-damping noise requires pulse mode");

      if (*trace_cmd) {
        CharFnTrace trace =
            cfg.mode == SimMode::pulse
                ? char_fn_interferometric(rho_s, res, proc, grid, SimMode::pulse,
                                          &cfg.molecule, noise)
                : char_fn_interferometric(rho_s, res, proc, grid, SimMode::ideal);
        if (cfg.noise) trace = decay_correction(trace, noise, cfg.molecule.ancilla);
        if (opt.out.empty()) throw ConfigError("trace needs --out");
        write_trace_csv(trace, opt.out);
        std::cout << "wrote " << grid.n << " samples to " << opt.out << "\n";
      } else {
        HeatDistribution dist;
        if (cfg.mode == SimMode::pulse) {
          CharFnTrace trace = char_fn_interferometric(rho_s, res, proc, grid, SimMode::pulse,
                                                      &cfg.molecule, noise);
          dist = invert_to_distribution(decay_correction(trace, noise, cfg.molecule.ancilla),
                                        res);
        } else {
          dist = tpm_distribution(rho_s, res, proc.ideal(cfg.molecule.reservoir,
                                                         cfg.molecule.system));
        }
        if (dist.leakage_warning)
          std::cerr << "warning: spectral leakage (misalignment "
                    << dist.leakage_misalignment << " bins)\n";
        if (opt.out.empty()) throw ConfigError("distribution needs --out");
        write_distribution_csv(dist, opt.out);
        std::cout << "wrote " << dist.atoms.size() << " atoms to " << opt.out << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
