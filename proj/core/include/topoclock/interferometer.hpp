#pragma once

#include <functional>
#include <string>
#include <vector>

#include "topoclock/evolve.hpp"
#include "topoclock/model.hpp"
#include "topoclock/noise.hpp"
#include "topoclock/state.hpp"

namespace topoclock {

// Residual light shift of the driving tones. The nominal shift at the
// programmed coupling is cancelled by the laser detuning, so only the part
// caused by amplitude noise acts on the atoms.
struct StarkModel {
  bool enabled = true;
  double bessel_argument = 0.0;  // J tilde
  double lattice_tilt = 0.0;     // Delta, rad/s

  static StarkModel standard();  // J_0/J_1 = 1.73, Delta = 2 pi 866 Hz
  // Coefficient X on (n_g - n_e) for a tone of effective coupling omega.
  double coefficient(Tone tone, double omega) const;
  // Equivalent detuning error 2 (X(omega(1+eps)) - X(omega)).
  double residual_detuning(Tone tone, double omega, double amplitude_noise) const;
};

struct MPPSpec {
  std::string name;
  double rabi = 0.0;       // shared carrier and sideband Omega
  int pulses = 0;          // composite pulse count N_p
  double dark_time = 0.0;  // T
  PulseMode mode = PulseMode::ideal;

  double drive_time() const;  // t_d = N_p (pi/Omega + pi/Omega)
  double total_time() const;  // t_f = 2 t_d + T
  void validate() const;

  static MPPSpec p0();
  static MPPSpec p1();
  static MPPSpec p2();
};

enum class PumpShape {
  // One tone on at a time: sideband while delta sweeps +M -> -M, carrier on the way back.
  alternating_tones,
  // delta = delta_m sin, Omega_A - Omega_B = m cos, Omega_A + Omega_B fixed.
  constant_sum,
};

struct PumpLoop {
  PumpShape shape = PumpShape::alternating_tones;
  double coupling_amplitude = 0.0;  // m
  double detuning_amplitude = 0.0;  // delta_m
  double detuning_offset = 0.0;     // loop centre on the delta axis
  double coupling_sum = 0.0;        // constant_sum shape only
  bool reversed = false;

  static PumpLoop standard();  // alternating tones, m = delta_m = 2 pi 70 Hz
  // Drive at cycle fraction s in [0, 1); tilt and noise are added by the caller.
  RMParameters at(double s) const;
  bool encloses_critical_point() const;
  double max_coupling() const;
  void validate() const;
};

struct TPPSpec {
  std::string name;
  double cycle_time = 0.0;  // tau
  int cycles = 0;           // N_p
  PumpLoop loop = PumpLoop::standard();
  int steps_per_cycle = 2000;

  double total_time() const;  // t_f = 2 N_p tau
  void validate() const;

  static TPPSpec tau12();  // tau = 1/12 s, N_p = 24
  static TPPSpec tau5();   // tau = 1/5 s, N_p = 10
};

double ideal_phase_mpp(const MPPSpec& spec, double tilt);
// delta_t t_f^2 / (2 tau)
double ideal_phase_tpp(const TPPSpec& spec, double tilt);
// 4 delta_t sum_{n=0}^{N_p} n tau
double discrete_phase_tpp(const TPPSpec& spec, double tilt);

struct InterferometerOptions {
  int guard_sites = 6;
  StarkModel stark = StarkModel::standard();
  bool edge_guard = true;
};

struct TraceSample {
  std::string stage;  // "forward", "dark", "reverse"
  int step = 0;
  double separation = 0.0;  // d_eg, NaN when undefined
  double ne = 0.0;
  double ng = 0.0;
  double overlap = 0.0;  // |<psi_0|psi>|^2
};

struct InterferometerRun {
  int sites = 0;
  double sy = 0.0;            // before the final pi/2 pulse
  double sz = 0.0;            // after it
  double ne = 0.0;
  double ng = 0.0;
  double fidelity = 0.0;      // delta_t = 0 reference run, same noise
  double phase = 0.0;         // accumulated phase, wrapped to (-pi, pi]
  double max_separation = 0.0;
  std::vector<TraceSample> trace;
  std::vector<std::string> warnings;
};

int interferometer_sites(int pulses, int guard_sites);

InterferometerRun run_mpp(const MPPSpec& spec, double tilt, const NoiseRealization& noise = {},
                          const InterferometerOptions& options = {});
InterferometerRun run_tpp(const TPPSpec& spec, double tilt, const NoiseRealization& noise = {},
                          const InterferometerOptions& options = {});

// Net displacement per cycle of a localized state over `cycles` noise-free cycles.
double pump_transport(const TPPSpec& spec, Level level, int cycles, int sites, double tilt = 0.0);

// Unwraps phases measured on an increasing tilt ladder starting near zero.
std::vector<double> unwrap_phase_ladder(const std::vector<double>& wrapped);

struct RecoveryStatistics {
  std::vector<double> fidelity;
  Interval summary;
};

RecoveryStatistics recovery_fidelity_experiment(const std::function<InterferometerRun(const NoiseRealization&)>& protocol,
                                                const NoiseSpec& noise, std::size_t realizations,
                                                unsigned workers = 1);

}  // namespace topoclock
