#pragma once

// Spin-system description for the pulse-level model: frequency offsets in the
// ancilla rotating frame, pairwise J couplings, and relaxation times. Loaded
// from a small key-value config file; see MoleculeSpec::load for the schema.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "landauer/core.hpp"
#include "landauer/register.hpp"

namespace landauer {

class MoleculeSpec {
 public:
  std::vector<std::string> qubits;  // canonical order
  std::string ancilla = "A";
  std::string reservoir = "R";
  std::string system = "S";
  std::map<std::string, double> offset_hz;                         // (w_j - w_A)/2pi
  std::map<std::pair<std::string, std::string>, double> coupling_hz;  // J_{j,k}
  std::map<std::string, double> t1_s;
  std::map<std::string, double> t2star_s;

  QubitRegister reg() const { return QubitRegister(qubits); }

  double offset(const std::string& q) const {
    auto it = offset_hz.find(q);
    return it == offset_hz.end() ? 0.0 : it->second;
  }

  double coupling(const std::string& a, const std::string& b) const {
    auto it = coupling_hz.find(key(a, b));
    return it == coupling_hz.end() ? 0.0 : it->second;
  }

  double t2star(const std::string& q) const {
    auto it = t2star_s.find(q);
    if (it == t2star_s.end()) throw LookupError("no T2* entry for qubit '" + q + "'");
    return it->second;
  }

  void validate() const {
    QubitRegister r(qubits);
    for (const auto& role : {ancilla, reservoir, system})
      if (!r.contains(role)) throw ValidationError("role qubit '" + role + "' not in register");
    if (std::abs(offset(ancilla)) > 0)
      throw ValidationError("ancilla offset must be zero in its own rotating frame");
    for (const auto& [q, t] : t1_s)
      if (!(t > 0)) throw ValidationError("T1 must be positive for qubit '" + q + "'");
    for (const auto& [q, t] : t2star_s)
      if (!(t > 0)) throw ValidationError("T2* must be positive for qubit '" + q + "'");
    for (const auto& [k, j] : coupling_hz) {
      if (!r.contains(k.first) || !r.contains(k.second))
        throw ValidationError("coupling references unknown qubit");
      (void)j;
    }
    for (const auto& [q, o] : offset_hz) {
      if (!r.contains(q)) throw ValidationError("offset references unknown qubit '" + q + "'");
      (void)o;
    }
  }

  /// Built-in three-spin parameter set. Only the R-S coupling is well
  /// established for the reference sample; the A-R coupling is the value
  /// recovered by the reservoir-gap calibration (`fit-gap`), and offsets,
  /// the A-S coupling and relaxation times are placeholders to be overridden
  /// per sample via a config file.
  static MoleculeSpec reference() {
    MoleculeSpec m;
    m.qubits = {"A", "R", "S"};
    m.offset_hz = {{"A", 0.0}, {"R", -2905.0}, {"S", -5843.0}};
    m.coupling_hz[key("A", "R")] = 128.2083428360;
    m.coupling_hz[key("A", "S")] = 64.0;
    m.coupling_hz[key("R", "S")] = 47.65;
    m.t1_s = {{"A", 4.0}, {"R", 4.0}, {"S", 4.0}};
    m.t2star_s = {{"A", 0.15}, {"R", 0.15}, {"S", 0.15}};
    m.validate();
    return m;
  }

  /// Parse a molecule config file. Lines are `key = value`, `#` starts a
  /// comment. Keys:
  ///   qubits = A R S
  ///   ancilla = A          reservoir = R          system = S
  ///   offset_hz.<q> = <f>
  ///   coupling_hz.<q1>.<q2> = <J>
  ///   t1_s.<q> = <t>       t2star_s.<q> = <t>
  static MoleculeSpec load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open molecule config '" + path + "'");
    MoleculeSpec m;
    m.t1_s.clear();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos)
          throw ConfigError("malformed line " + std::to_string(lineno) + " in '" + path + "'");
        continue;
      }
      const std::string k = trim(line.substr(0, eq));
      const std::string v = trim(line.substr(eq + 1));
      if (k == "qubits") {
        std::istringstream is(v);
        std::string q;
        m.qubits.clear();
        while (is >> q) m.qubits.push_back(q);
      } else if (k == "ancilla") {
        m.ancilla = v;
      } else if (k == "reservoir") {
        m.reservoir = v;
      } else if (k == "system") {
        m.system = v;
      } else if (k.rfind("offset_hz.", 0) == 0) {
        m.offset_hz[k.substr(10)] = parse_double(v, path, lineno);
      } else if (k.rfind("coupling_hz.", 0) == 0) {
        const std::string rest = k.substr(12);
        const auto dot = rest.find('.');
        if (dot == std::string::npos)
          throw ConfigError("coupling key needs two qubits at line " + std::to_string(lineno));
        m.coupling_hz[key(rest.substr(0, dot), rest.substr(dot + 1))] =
            parse_double(v, path, lineno);
      } else if (k.rfind("t1_s.", 0) == 0) {
        m.t1_s[k.substr(5)] = parse_double(v, path, lineno);
      } else if (k.rfind("t2star_s.", 0) == 0) {
        m.t2star_s[k.substr(9)] = parse_double(v, path, lineno);
      } else {
        throw ConfigError("unknown key '" + k + "' at line " + std::to_string(lineno) + " in '" +
                          path + "'");
      }
    }
    if (m.qubits.empty()) throw ConfigError("molecule config '" + path + "' defines no qubits");
    m.validate();
    return m;
  }

  static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
    if (a == b) throw ValidationError("coupling needs two distinct qubits");
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static double parse_double(const std::string& v, const std::string& path, int lineno) {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("bad numeric value '" + v + "' at line " + std::to_string(lineno) +
                        " in '" + path + "'");
    }
  }
};

}  // namespace landauer
