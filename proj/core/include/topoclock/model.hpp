#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace topoclock {

using cplx = std::complex<double>;

enum class Level : std::uint8_t { ground = 0, excited = 1 };
enum class Tone : std::uint8_t { carrier, sideband };

std::string_view to_string(Level level);
std::string_view to_string(Tone tone);

// Basis ordering shared by every module: index = 2*site + level.
constexpr Eigen::Index basis_index(int site, Level level) {
  return 2 * static_cast<Eigen::Index>(site) + static_cast<Eigen::Index>(level);
}

struct LatticeParams {
  int sites = 0;
  double tunneling = 0.0;  // J, rad/s
  double tilt = 0.0;       // Delta, rad/s
  double soc_phase = 0.0;  // k_c a_L, rad
  double overlap = 1.0;    // I_0
  std::optional<double> depth_recoils;  // calibration tag only

  void validate() const;
  // 4 J |sin(phi/2)| / Delta
  double bessel_argument() const;
};

struct RMParameters {
  double carrier = 0.0;   // Omega_A >= 0
  double sideband = 0.0;  // Omega_B >= 0
  double detuning = 0.0;  // delta
  double tilt = 0.0;      // delta_t
  double phase = 0.0;     // common phase of both couplings

  void validate() const;
  // Omega_B / Omega_A; throws when Omega_A == 0.
  double ratio() const;
};

struct BareDrives {
  double carrier = 0.0;   // Omega_c
  double sideband = 0.0;  // Omega_s
  void validate() const;
};

// Hermitian tridiagonal matrix in the (site, level) basis. Carrier bonds sit
// at (2l, 2l+1), sideband bonds at (2l+1, 2l+2).
class Hamiltonian {
 public:
  explicit Hamiltonian(int sites, std::string frame = "rotating-gauge");

  int sites() const noexcept { return sites_; }
  Eigen::Index dimension() const noexcept { return 2 * static_cast<Eigen::Index>(sites_); }
  std::string_view frame() const noexcept { return frame_; }

  double diagonal(Eigen::Index i) const { return diag_[i]; }
  // H(i+1, i)
  cplx lower(Eigen::Index i) const { return lower_[i]; }
  const std::vector<double>& diagonal_entries() const noexcept { return diag_; }
  const std::vector<cplx>& lower_entries() const noexcept { return lower_; }

  void set_diagonal(Eigen::Index i, double value) { diag_[i] = value; }
  void add_diagonal(Eigen::Index i, double value) { diag_[i] += value; }
  // Matrix element <l,e|H|l,g>.
  void set_carrier(int site, cplx value);
  // Matrix element <l,e|H|l+1,g>.
  void set_sideband(int site, cplx value);
  cplx carrier(int site) const;
  cplx sideband(int site) const;

  bool has_carrier() const;
  bool has_sideband() const;
  bool is_finite() const;
  // Gershgorin bound on the spectral radius.
  double norm_bound() const;

  Eigen::MatrixXcd dense() const;
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

  Hamiltonian operator-() const;

 private:
  int sites_;
  std::string frame_;
  std::vector<double> diag_;
  std::vector<cplx> lower_;
};

Hamiltonian build_rm_hamiltonian(const RMParameters& params, int sites);
Hamiltonian build_rm_hamiltonian(const RMParameters& params, const LatticeParams& lattice);

// Bessel J_n for any integer order, J_{-n} = (-1)^n J_n.
double bessel_j(int order, double x);

// Effective couplings Omega_A = Omega_c I_0 |J_0|, Omega_B = Omega_s I_0 |J_{-1}|.
struct EffectiveDrives {
  RMParameters params;
  double bessel_argument = 0.0;
};
EffectiveDrives derive_effective_drives(const BareDrives& bare, const LatticeParams& lattice);

// Root of J_0(x)/J_1(x) = ratio on the first lobe (0, j_{0,1}).
double bessel_argument_for_ratio(double ratio);

// Coefficients X of X*(n_g - n_e) added by each tone's off-resonant coupling.
// The sideband tone pushes e up (negative coefficient), the carrier tone pushes
// g up (positive coefficient).
struct StarkShift {
  double carrier = 0.0;
  double sideband = 0.0;
  // Equivalent change of delta in the RM model.
  double detuning_offset() const { return 2.0 * (carrier + sideband); }
};
StarkShift ac_stark_shift(const BareDrives& bare, const LatticeParams& lattice);
// Same shifts expressed through effective couplings and the Bessel argument.
StarkShift ac_stark_shift_effective(double carrier, double sideband, double bessel_argument,
                                    double tilt);

Eigen::MatrixXd ws_coupling_matrix(double tunneling, double tilt, int range);

// Closed form of sum_k J_{nu+k}(u) J_k(u) e^{i k alpha}.
cplx bessel_addition(int nu, double u, double alpha);

// Single-tone drive before the rotating-wave step: the resonant coupling plus
// the partner coupling oscillating at the lattice tilt frequency.
class CounterRotatingHamiltonian {
 public:
  CounterRotatingHamiltonian(int sites, Tone tone, double resonant, double off_resonant,
                             double tilt);

  Hamiltonian operator()(double t) const;
  Hamiltonian resonant_part() const;
  // Oscillating block alone, evaluated at time t.
  Hamiltonian oscillating_part(double t) const;
  // Rotating-wave model with the second-order light shift on the diagonal.
  Hamiltonian effective() const;
  double stark_coefficient() const;
  double period() const;
  Tone tone() const noexcept { return tone_; }
  int sites() const noexcept { return sites_; }

 private:
  int sites_;
  Tone tone_;
  double resonant_;
  double off_resonant_;
  double tilt_;
};

CounterRotatingHamiltonian build_counterrotating_hamiltonian(const BareDrives& bare,
                                                             const LatticeParams& lattice,
                                                             Tone tone);

}  // namespace topoclock
