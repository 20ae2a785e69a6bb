#pragma once

#include <functional>
#include <vector>

#include "topoclock/evolve.hpp"
#include "topoclock/model.hpp"
#include "topoclock/noise.hpp"
#include "topoclock/state.hpp"

namespace topoclock {

struct RabiSpec {
  double rabi = 0.0;  // Omega_R
  double pulse_time() const;
  void validate() const;
};

// (n_e - n_g)/2 after a nominal pi pulse at laser detuning delta_L.
double rabi_lineshape(const RabiSpec& spec, double detuning, const NoiseRealization& noise = {});
// Positive detuning of steepest lineshape slope.
double rabi_operating_point(const RabiSpec& spec);
double rabi_slope(const RabiSpec& spec, double detuning);

struct MdOptions {
  int samples_per_period = 100;  // grid spacing <= 0.01 (2 pi / Omega_B)
  bool edge_guard = true;
};

struct MdTrace {
  std::vector<double> time;
  std::vector<double> iy;         // S_z read after the m1 pulse
  std::vector<double> x;          // Omega_B int I_y dt, trapezoid
  std::vector<double> x_direct;   // l0 - <X>; the sideband moves |l,g> to |l-1,e>
  double max_edge_population = 0.0;
};

MdTrace run_md_protocol(const RMParameters& params, int sites, double t_max,
                        const MdOptions& options = {});
// Trapezoid time average of x over [t_begin, t_end].
double plateau_average(const MdTrace& trace, double t_begin, double t_end);

// Evolve |l0,g> under the tilted RM model for t, apply m2, read S_z (= I_x).
double run_one_step_protocol(const RMParameters& params, int sites, double t,
                             bool edge_guard = true);

// Bond superposition evolved for t; returns -S_z.
double run_alternative_ssh(const RMParameters& params, int sites, double t,
                           Preparation method = Preparation::exact_pulse, bool edge_guard = true);

struct SSHClockSpec {
  double carrier = 0.0;   // nominal Omega_A
  double sideband = 0.0;  // nominal Omega_B > Omega_A
  int sites = 64;
  double hold_time() const;  // pi / Omega_B
  void validate() const;
};

// One-step signal at the hold time with noisy drives.
double run_ssh_clock(const SSHClockSpec& spec, double detuning, double tilt,
                     const NoiseRealization& noise = {});

using SignalSource = std::function<double(double detuning, double tilt)>;

struct ResonanceWindow {
  double detuning_probe = 0.0;  // a in s(u + a, v + b) + s(u - a, v - b)
  double tilt_probe = 0.0;      // b
  double detuning_span = 0.0;   // search u in [-span, span]
  double tilt_span = 0.0;
};

struct Resonance {
  double detuning = 0.0;
  double tilt = 0.0;
};

// Zeros of both symmetrized signals; two sources with different (delta,
// delta_t) mixtures are needed to fix both offsets.
Resonance solve_resonance(const SignalSource& first, const SignalSource& second,
                          const ResonanceWindow& window);

}  // namespace topoclock
