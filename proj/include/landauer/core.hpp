#pragma once

// Shared aliases, tolerances and error types.
//
// Unit conventions used throughout the library:
//   - hbar = k_B = 1
//   - energies and level gaps are angular frequencies (rad/s)
//   - inverse temperature beta is in seconds, so beta * gap is dimensionless
//   - entropies are in nats (natural logarithm)

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace landauer {

using cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Numerical tolerances. These are contract values, not tuning knobs:
// state validity is checked at 1e-12, eigenvalue negativity at -1e-10.
namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double unitary = 1e-12;
inline constexpr double kraus = 1e-12;
inline constexpr double eigenvalue = 1e-10;
}  // namespace tol

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LookupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CompileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorrectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unit phase e^{i phi}, snapped to an exact {1, i, -1, -i} when phi is a
/// multiple of pi/2. Keeps gate matrices whose entries are exactly
/// {0, +-1, +-i, (1 +- i)/2} free of transcendental round-off.
inline cx unit_phase(double phi) {
  const double quarter = pi / 2.0;
  const long long k = std::llround(phi / quarter);
  if (std::abs(phi - static_cast<double>(k) * quarter) < 1e-12) {
    switch (((k % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, phi);
}

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace landauer
