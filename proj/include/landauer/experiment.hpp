#pragma once

// Experiment runner: reservoir-gap calibration against the reference CNOT
// temperature sweep, the CNOT and partial-swap sweeps themselves (matrix
// level or pulse level, with optional phase-damping noise), and
// machine-readable CSV/JSON reports. Every emitted row is checked against
// the entropy-production identities before it leaves the runner.

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "landauer/core.hpp"
#include "landauer/heatstats.hpp"
#include "landauer/molecule.hpp"
#include "landauer/pulse.hpp"
#include "landauer/state.hpp"
#include "landauer/thermo.hpp"

namespace landauer {

/// Reference CNOT sweep: (beta hbar)^{-1} in Hz against the dimensionless
/// heat beta<Q>. Used to calibrate the reservoir gap, which enters nowhere
/// else as a free parameter.
struct CalibrationRow {
  double beta_inv_hz;
  double gamma;
};

inline const std::vector<CalibrationRow>& cnot_calibration_rows() {
  static const std::vector<CalibrationRow> rows = {
      {123, 3.3},   {185, 2.1},   {227, 1.67},  {274, 1.32},  {324, 1.05},
      {383, 0.82},  {458, 0.63},  {550, 0.46},  {678, 0.32},  {862, 0.20},
      {1168, 0.114}, {1775, 0.051}, {3573, 0.0126}};
  return rows;
}

/// beta<Q> of the CNOT on a maximally mixed system: (x/2) tanh(x/2) with
/// x = beta * gap.
inline double cnot_gamma_theory(double x) { return 0.5 * x * std::tanh(0.5 * x); }

/// Partial-swap analogue: the conditional flip probability scales by
/// sin^2(phi/2), so beta<Q> = (x/2) sin^2(phi/2) tanh(x/2).
inline double partial_swap_gamma_theory(double x, double phi) {
  const double s = std::sin(phi / 2);
  return cnot_gamma_theory(x) * s * s;
}

/// Invert (x/2) tanh(x/2) = gamma for x >= 0 by bisection.
inline double invert_cnot_gamma(double gamma) {
  if (!(gamma > 0)) throw DomainError("gamma must be positive to invert");
  double lo = 0.0, hi = 2.0 * gamma + 4.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cnot_gamma_theory(mid) < gamma ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct GapFit {
  double gap = 0;                    // rad/s
  std::vector<double> per_row_gap;   // gap recovered from each row alone
  std::vector<double> residual;      // relative gamma residual of each row at `gap`
  double max_abs_residual() const {
    double m = 0;
    for (double r : residual) m = std::max(m, std::abs(r));
    return m;
  }
  /// Largest relative deviation of a per-row gap from the fitted one; the
  /// constancy of the per-row gaps is the calibration's validity check.
  double max_gap_spread() const {
    double m = 0;
    for (double g : per_row_gap) m = std::max(m, std::abs(g / gap - 1.0));
    return m;
  }
  bool consistent(double tolerance = 0.02) const { return max_gap_spread() < tolerance; }
};

/// Least-squares fit (relative residuals) of a single gap to calibration
/// rows: gamma_i ~ (x_i/2) tanh(x_i/2), x_i = gap / f_i.
inline GapFit fit_reservoir_gap(const std::vector<CalibrationRow>& rows) {
  if (rows.empty()) throw FitError("gap fit needs at least one row");
  GapFit fit;
  for (const auto& row : rows) {
    if (!(row.beta_inv_hz > 0)) throw DomainError("calibration temperatures must be positive");
    fit.per_row_gap.push_back(invert_cnot_gamma(row.gamma) * row.beta_inv_hz);
  }
  auto objective = [&](double w) {
    double s = 0;
    for (const auto& row : rows) {
      const double r = (cnot_gamma_theory(w / row.beta_inv_hz) - row.gamma) / row.gamma;
      s += r * r;
    }
    return s;
  };
  double lo = *std::min_element(fit.per_row_gap.begin(), fit.per_row_gap.end()) * 0.5;
  double hi = *std::max_element(fit.per_row_gap.begin(), fit.per_row_gap.end()) * 1.5;
  // Golden-section search; the objective is smooth and single-welled on the
  // bracket. Fixed iteration count keeps the result deterministic.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int i = 0; i < 300; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
  }
  fit.gap = 0.5 * (a + b);
  if (!std::isfinite(fit.gap) || !(fit.gap > 0)) {
    std::ostringstream os;
    os << "gap fit did not converge (bracket [" << lo << ", " << hi << "])";
    throw FitError(os.str());
  }
  for (const auto& row : rows)
    fit.residual.push_back((cnot_gamma_theory(fit.gap / row.beta_inv_hz) - row.gamma) /
                           row.gamma);
  return fit;
}

/// Swap angles exercised by the sweep. The out-of-range 3pi/2 entry is kept
/// but tagged in reports; 2pi/3 completes the even ladder.
inline const std::vector<double>& reference_swap_angles() {
  static const std::vector<double> phis = {pi / 6,     pi / 3, pi / 2,        2 * pi / 3,
                                           5 * pi / 6, pi,     3 * pi / 2};
  return phis;
}

struct ExperimentConfig {
  std::vector<double> beta_inv_hz;  // temperatures, Hz; +inf means beta = 0
  std::vector<double> phis;         // partial-swap angles (swap sweep only)
  double gap = 0;                   // reservoir gap, rad/s; 0 selects the molecule default
  SimMode mode = SimMode::ideal;
  bool noise = false;
  MoleculeSpec molecule = MoleculeSpec::reference();
  int grid_samples = 8;

  static ExperimentConfig cnot_defaults() {
    ExperimentConfig c;
    for (const auto& row : cnot_calibration_rows()) c.beta_inv_hz.push_back(row.beta_inv_hz);
    return c;
  }
  static ExperimentConfig swap_defaults() {
    ExperimentConfig c;
    c.beta_inv_hz = {123};
    c.phis = reference_swap_angles();
    return c;
  }

  double resolved_gap() const { return gap > 0 ? gap : reservoir_gap(molecule); }
};

/// One sweep point. The thermodynamic columns come from the exact state
/// algebra of the (ideal or compiled) unitary, so the two identities
/// sigma = beta_Q - delta_S and sigma = I + D hold row-wise by construction;
/// p_neg_heat comes from the heat-statistics pipeline of the selected mode.
struct ReportRow {
  double beta_inv_hz = 0;
  double phi = std::numeric_limits<double>::quiet_NaN();  // NaN for cnot rows
  double delta_s = 0;
  double beta_q = 0;
  double sigma = 0;
  double mutual_info = 0;
  double rel_entropy = 0;
  double gamma_theory = 0;
  double p_neg_heat = 0;
  std::string mode = "ideal";
  bool noise = false;
  std::string note;
};

namespace detail {

template <class F>
inline void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Peel the identity factor off a unitary that acts trivially outside
/// `keep`: U = e^{i gamma} (1 (x) W) -> W on the kept labels.
inline UnitaryOperator restrict_to(const UnitaryOperator& u,
                                   const std::vector<std::string>& keep) {
  const QubitRegister kept(keep);
  const QubitRegister& full = u.reg();
  std::vector<std::size_t> keep_pos;
  for (const auto& l : kept.labels()) keep_pos.push_back(full.position(l));
  Matrix w(kept.dim(), kept.dim());
  for (Eigen::Index i = 0; i < kept.dim(); ++i) {
    // Expand the kept sub-index into a full index with zeros elsewhere.
    Eigen::Index fi = 0;
    for (std::size_t b = 0; b < keep_pos.size(); ++b)
      fi |= static_cast<Eigen::Index>((i >> (keep_pos.size() - 1 - b)) & 1)
            << (full.size() - 1 - keep_pos[b]);
    for (Eigen::Index j = 0; j < kept.dim(); ++j) {
      Eigen::Index fj = 0;
      for (std::size_t b = 0; b < keep_pos.size(); ++b)
        fj |= static_cast<Eigen::Index>((j >> (keep_pos.size() - 1 - b)) & 1)
              << (full.size() - 1 - keep_pos[b]);
      w(i, j) = u.matrix()(fi, fj);
    }
  }
  UnitaryOperator out(kept, std::move(w));
  const double defect = (u.matrix() - embed(out.matrix(), kept, full)).cwiseAbs().maxCoeff();
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "unitary does not factor as identity (x) " << kept.str() << " (defect " << defect
       << ")";
    throw ShapeError(os.str());
  }
  return out;
}

struct SweepPoint {
  ThermalReservoirSpec reservoir;
  DensityOperator rho_s;
  UnitaryOperator u;  // effective process on R+S
  HeatDistribution dist;
};

/// Shared per-point pipeline: effective unitary, heat distribution via the
/// mode's measurement path, exact Landauer bookkeeping.
inline SweepPoint evaluate_point(const ExperimentConfig& cfg, const Process& proc, double f_hz) {
  if (cfg.noise && cfg.mode != SimMode::pulse)
    throw ConfigError("phase-damping noise requires pulse mode");
  const MoleculeSpec& mol = cfg.molecule;
  ThermalReservoirSpec res =
      ThermalReservoirSpec::from_beta_inv_hz(f_hz, cfg.resolved_gap(), mol.reservoir);
  DensityOperator rho_s = DensityOperator::maximally_mixed(QubitRegister({mol.system}));

  UnitaryOperator u_eff = proc.ideal(mol.reservoir, mol.system);
  if (cfg.mode == SimMode::pulse) {
    const PulseProgram prog =
        z_compensation(compile_pulse_program(proc.request(mol), mol), mol);
    u_eff = restrict_to(program_unitary(prog, mol), {mol.reservoir, mol.system});
  }

  HeatDistribution dist;
  if (cfg.mode == SimMode::ideal) {
    dist = tpm_distribution(rho_s, res, u_eff);
  } else {
    const NoiseSpec noise =
        cfg.noise ? NoiseSpec::from_molecule(mol) : NoiseSpec::off();
    TimeGrid grid = TimeGrid::for_gap(res.gap(), cfg.grid_samples);
    CharFnTrace trace =
        char_fn_interferometric(rho_s, res, proc, grid, SimMode::pulse, &mol, noise);
    dist = invert_to_distribution(decay_correction(trace, noise, mol.ancilla), res);
  }
  return SweepPoint{std::move(res), std::move(rho_s), std::move(u_eff), std::move(dist)};
}

inline void check_row(const ReportRow& row, const char* sweep) {
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os << sweep << " row at (beta hbar)^{-1} = " << row.beta_inv_hz << " Hz";
    if (!std::isnan(row.phi)) os << ", phi = " << row.phi;
    os << ": " << what;
    throw ProtocolError(os.str());
  };
  if (row.sigma < -1e-10) fail("entropy production is negative");
  if (std::abs(row.sigma - (row.beta_q - row.delta_s)) > 1e-10)
    fail("sigma != beta_Q - delta_S");
  if (std::abs(row.sigma - (row.mutual_info + row.rel_entropy)) > 1e-10)
    fail("sigma != I + D");
}

}  // namespace detail

/// CNOT temperature sweep. Asserts delta_S = 0 within 1e-12 per row and, in
/// ideal mode, that the simulated beta<Q> matches the closed form within
/// 1e-8.
inline std::vector<ReportRow> run_cnot_sweep(const ExperimentConfig& cfg) {
  if (cfg.beta_inv_hz.empty()) throw ConfigError("cnot sweep needs at least one temperature");
  std::vector<ReportRow> rows(cfg.beta_inv_hz.size());
  detail::parallel_for(rows.size(), [&](std::size_t i) {
    const double f = cfg.beta_inv_hz[i];
    const detail::SweepPoint pt = detail::evaluate_point(cfg, Process::cnot_process(), f);
    const LandauerReport rep = landauer_analyze(pt.reservoir, pt.rho_s, pt.u);
    ReportRow row;
    row.beta_inv_hz = f;
    row.delta_s = rep.delta_entropy;
    row.beta_q = rep.beta_heat;
    row.sigma = rep.entropy_production;
    row.mutual_info = rep.mutual_info;
    row.rel_entropy = rep.rel_entropy;
    row.gamma_theory = cnot_gamma_theory(pt.reservoir.x());
    row.p_neg_heat = heat_moments(pt.dist).p_negative;
    row.mode = cfg.mode == SimMode::ideal ? "ideal" : "pulse";
    row.noise = cfg.noise;
    detail::check_row(row, "cnot sweep");
    std::ostringstream ctx;
    ctx << "cnot sweep row at (beta hbar)^{-1} = " << f << " Hz: ";
    if (std::abs(row.delta_s) > 1e-12)
      throw ProtocolError(ctx.str() + "delta_S differs from 0");
    if (cfg.mode == SimMode::ideal && std::abs(row.beta_q - row.gamma_theory) > 1e-8)
      throw ProtocolError(ctx.str() + "beta_Q deviates from the closed form");
    rows[i] = std::move(row);
  });
  return rows;
}

/// Partial-swap sweep over (temperature, angle) pairs. The bound
/// beta<Q> >= delta_S is asserted for every row; the full swap must leave
/// the system in the reservoir's thermal state.
inline std::vector<ReportRow> run_partial_swap_sweep(const ExperimentConfig& cfg) {
  if (cfg.phis.empty()) throw ConfigError("partial-swap sweep needs at least one angle");
  if (cfg.beta_inv_hz.empty()) throw ConfigError("partial-swap sweep needs a temperature");
  std::vector<std::pair<double, double>> points;  // (f, phi)
  for (double f : cfg.beta_inv_hz)
    for (double phi : cfg.phis) points.emplace_back(f, phi);

  std::vector<ReportRow> rows(points.size());
  detail::parallel_for(points.size(), [&](std::size_t i) {
    const auto [f, phi] = points[i];
    const Process proc = Process::partial_swap_process(phi);
    const detail::SweepPoint pt = detail::evaluate_point(cfg, proc, f);
    const LandauerReport rep = landauer_analyze(pt.reservoir, pt.rho_s, pt.u);
    ReportRow row;
    row.beta_inv_hz = f;
    row.phi = phi;
    row.delta_s = rep.delta_entropy;
    row.beta_q = rep.beta_heat;
    row.sigma = rep.entropy_production;
    row.mutual_info = rep.mutual_info;
    row.rel_entropy = rep.rel_entropy;
    row.gamma_theory = partial_swap_gamma_theory(pt.reservoir.x(), phi);
    row.p_neg_heat = heat_moments(pt.dist).p_negative;
    row.mode = cfg.mode == SimMode::ideal ? "ideal" : "pulse";
    row.noise = cfg.noise;
    if (phi > pi + 1e-12) row.note = "phi outside the interpolation range [0; pi]";
    detail::check_row(row, "partial-swap sweep");
    std::ostringstream ctx;
    ctx << "partial-swap row at phi = " << phi << ": ";
    if (cfg.mode == SimMode::ideal && std::abs(row.beta_q - row.gamma_theory) > 1e-8)
      throw ProtocolError(ctx.str() + "beta_Q deviates from the closed form");
    if (std::abs(phi - pi) < 1e-12) {
      const DensityOperator joint = tensor_compose(pt.reservoir.state(), pt.rho_s);
      const DensityOperator out_s =
          partial_trace(evolve(joint, pt.u), pt.rho_s.reg().labels());
      const DensityOperator target(pt.rho_s.reg(), pt.reservoir.state().matrix());
      if (trace_distance(out_s, target) > 1e-12)
        throw ProtocolError(ctx.str() + "full swap did not thermalise the system");
    }
    rows[i] = std::move(row);
  });
  return rows;
}

enum class ReportFormat { csv, json };

namespace detail {

inline std::string sanitize_note(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

inline void write_number(std::ostream& os, double v) {
  os << std::setprecision(12) << v;
}

}  // namespace detail

inline const char* report_header() {
  return "beta_inv_hz,phi,delta_S,beta_Q,sigma,mutual_info,rel_entropy,gamma_theory,"
         "p_neg_heat,mode,noise,note";
}

/// Deterministic report emission: fixed column order, 12 significant digits.
inline void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report to '" + path + "'");
  if (format == ReportFormat::csv) {
    out << report_header() << "\n";
    for (const auto& r : rows) {
      detail::write_number(out, r.beta_inv_hz);
      out << ",";
      detail::write_number(out, r.phi);
      out << ",";
      detail::write_number(out, r.delta_s);
      out << ",";
      detail::write_number(out, r.beta_q);
      out << ",";
      detail::write_number(out, r.sigma);
      out << ",";
      detail::write_number(out, r.mutual_info);
      out << ",";
      detail::write_number(out, r.rel_entropy);
      out << ",";
      detail::write_number(out, r.gamma_theory);
      out << ",";
      detail::write_number(out, r.p_neg_heat);
      out << "," << r.mode << "," << (r.noise ? 1 : 0) << ","
          << detail::sanitize_note(r.note) << "\n";
    }
    return;
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["beta_inv_hz"] = r.beta_inv_hz;
    if (std::isnan(r.phi))
      o["phi"] = nullptr;
    else
      o["phi"] = r.phi;
    o["delta_S"] = r.delta_s;
    o["beta_Q"] = r.beta_q;
    o["sigma"] = r.sigma;
    o["mutual_info"] = r.mutual_info;
    o["rel_entropy"] = r.rel_entropy;
    o["gamma_theory"] = r.gamma_theory;
    o["p_neg_heat"] = r.p_neg_heat;
    o["mode"] = r.mode;
    o["noise"] = r.noise;
    o["note"] = r.note;
    doc.push_back(std::move(o));
  }
  out << doc.dump(2) << "\n";
}

inline std::vector<ReportRow> parse_report(const std::string& path, ReportFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read report from '" + path + "'");
  std::vector<ReportRow> rows;
  if (format == ReportFormat::csv) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("report '" + path + "' is empty");
    if (line != report_header()) throw IoError("report '" + path + "' has an unexpected header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::istringstream is(line);
      std::string cell;
      while (std::getline(is, cell, ',')) f.push_back(cell);
      f.resize(12);
      ReportRow r;
      r.beta_inv_hz = std::stod(f[0]);
      r.phi = std::stod(f[1]);
      r.delta_s = std::stod(f[2]);
      r.beta_q = std::stod(f[3]);
      r.sigma = std::stod(f[4]);
      r.mutual_info = std::stod(f[5]);
      r.rel_entropy = std::stod(f[6]);
      r.gamma_theory = std::stod(f[7]);
      r.p_neg_heat = std::stod(f[8]);
      r.mode = f[9];
      r.noise = f[10] == "1";
      r.note = f[11];
      rows.push_back(std::move(r));
    }
    return rows;
  }
  nlohmann::json doc;
  in >> doc;
  for (const auto& o : doc) {
    ReportRow r;
    r.beta_inv_hz = o.at("beta_inv_hz").get<double>();
    r.phi = o.at("phi").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                  : o.at("phi").get<double>();
    r.delta_s = o.at("delta_S").get<double>();
    r.beta_q = o.at("beta_Q").get<double>();
    r.sigma = o.at("sigma").get<double>();
    r.mutual_info = o.at("mutual_info").get<double>();
    r.rel_entropy = o.at("rel_entropy").get<double>();
    r.gamma_theory = o.at("gamma_theory").get<double>();
    r.p_neg_heat = o.at("p_neg_heat").get<double>();
    r.mode = o.at("mode").get<std::string>();
    r.noise = o.at("noise").get<bool>();
    r.note = o.at("note").get<std::string>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace landauer
