#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topoclock/model.hpp"
#include "topoclock/state.hpp"

namespace topoclock {

inline constexpr int kDefaultBrillouinPoints = 4096;

// Grid k_j = -pi + 2 pi j / N, j = 1..N, i.e. the half-open zone (-pi, pi].
std::vector<double> brillouin_grid(int points = kDefaultBrillouinPoints);

struct BandData {
  std::vector<double> k;
  std::vector<double> energy;      // E_k, upper band
  std::vector<double> phase;       // phi_k = arg(Omega_A + Omega_B e^{ik}), unwrapped
  std::vector<double> connection;  // A(k) = -(1/2) dphi_k/dk

  std::string csv() const;
};

BandData band_data(double carrier, double sideband, int points = kDefaultBrillouinPoints);

// Zone average of dphi_k/dk / (2 pi) on the grid, unrounded.
double winding_number_raw(double carrier, double sideband, int points = kDefaultBrillouinPoints);
// Rounded; throws CriticalPointError at |r - 1| < 1e-9.
int winding_number(double carrier, double sideband, int points = kDefaultBrillouinPoints);
// -pi W_raw
double zak_phase(double carrier, double sideband, int points = kDefaultBrillouinPoints);

// Sideband current of the SSH chain started in |l0,g>.
double analytic_Iy(double carrier, double sideband, double t,
                   int points = kDefaultBrillouinPoints);
// Omega_B times the time integral of analytic_Iy.
double analytic_mean_displacement(double carrier, double sideband, double t,
                                  int points = kDefaultBrillouinPoints);

// Dimensionless response coefficients c = Omega_B dI_x/d(perturbation).
double detuning_response(double carrier, double sideband, double t,
                         int points = kDefaultBrillouinPoints);
// Finite-chain Kubo integral for the tilt; sites sets the chain length.
double tilt_response(double carrier, double sideband, double t, int sites = 128);

// I_x(t) ~ (c_delta delta + c_t delta_t) / Omega_B for small perturbations.
double linear_response_Ix(double carrier, double sideband, double detuning, double tilt, double t,
                          int sites = 128);

// Omega_B dI_x/d delta_t by central finite difference of brute-force evolution.
double s_function(double carrier, double sideband, double t, int sites = 128,
                  double relative_step = 1e-4);

// Brute-force I_x of the SSH chain with carrier detuning and tilt, from |l0,g>.
ObservableSet brute_force_observables(const RMParameters& params, int sites, double t);

using OperatorAction = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

// First-order change of <O(t)> for H -> H + lambda V, per unit lambda:
// 2 int_0^t Im <psi(t)| O U(t-s) V |psi(s)> ds.
double kubo_response(const Hamiltonian& h, const QuantumState& psi, const OperatorAction& observable,
                     const OperatorAction& perturbation, double t, int panels = 64);

// Operator actions used with kubo_response.
void apply_ix(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
void apply_position(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
void apply_half_population_difference(const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

}  // namespace topoclock
