#pragma once

#include <functional>

#include <Eigen/Dense>

#include "topoclock/model.hpp"
#include "topoclock/state.hpp"

namespace topoclock {

struct EvolveOptions {
  bool edge_guard = true;
  double edge_threshold = 1e-8;
  double krylov_tolerance = 1e-13;
};

// Exact e^{-iHt} through a Hermitian eigendecomposition.
QuantumState evolve_const(const Hamiltonian& h, const QuantumState& psi, double t);

// Diagonalizes once; cheap to apply at many times.
class Propagator {
 public:
  explicit Propagator(const Hamiltonian& h);

  QuantumState operator()(const QuantumState& psi, double t) const;
  void apply(Eigen::VectorXcd& psi, double t) const;
  int sites() const noexcept { return sites_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }
  const Eigen::MatrixXcd& eigenvectors() const noexcept { return vectors_; }

 private:
  int sites_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
};

using HamiltonianSource = std::function<Hamiltonian(double)>;
using ParameterSource = std::function<RMParameters(double)>;

// Piecewise-constant schedule: [t0, t1] split into equal steps no longer
// than max_step, the Hamiltonian sampled at each step midpoint.
class Schedule {
 public:
  Schedule(HamiltonianSource source, double t0, double t1, double max_step);

  static Schedule from_parameters(ParameterSource params, int sites, double t0, double t1,
                                  double max_step);
  static Schedule constant(const Hamiltonian& h, double duration, double max_step);
  // (2 pi / omega_max) / 200
  static double default_step(double omega_max);

  double start() const noexcept { return t0_; }
  double end() const noexcept { return t1_; }
  int steps() const noexcept { return steps_; }
  double step() const noexcept { return (t1_ - t0_) / steps_; }
  double midpoint(int k) const { return t0_ + (k + 0.5) * step(); }
  Hamiltonian at(double t) const { return source_(t); }

  // H'(t) = -H(t0 + t1 - t) on the same grid: the exact inverse evolution.
  Schedule reversed() const;

 private:
  HamiltonianSource source_;
  double t0_;
  double t1_;
  int steps_;
};

using StepObserver = std::function<void(double t, const Eigen::VectorXcd& psi)>;

QuantumState evolve_schedule(const Schedule& schedule, const QuantumState& psi,
                             const EvolveOptions& options = {}, const StepObserver& observer = {});

// In-place e^{-iH dt}: exact 2x2 blocks when only one coupling family is
// present, adaptive Lanczos otherwise.
void step_exact(const Hamiltonian& h, double dt, Eigen::VectorXcd& psi,
                double krylov_tolerance = 1e-13);
void krylov_step(const Hamiltonian& h, double dt, Eigen::VectorXcd& psi, double tolerance);
void block_step(const Hamiltonian& h, double dt, Eigen::VectorXcd& psi);

enum class MeasurementPulse { m1, m2, carrier_half, carrier_pi, sideband_pi };

struct PulseSpec {
  Tone tone;
  double area;   // theta
  double phase;  // chi in H = (Omega/2)(e^{i chi}|up><down| + h.c.)
};

PulseSpec pulse_spec(MeasurementPulse pulse);

enum class PulseMode { ideal, finite };

QuantumState apply_pulse(MeasurementPulse pulse, const QuantumState& psi, double rabi = 1.0,
                         PulseMode mode = PulseMode::ideal);
QuantumState apply_pulse(const PulseSpec& pulse, const QuantumState& psi, double rabi = 1.0,
                         PulseMode mode = PulseMode::ideal);

// Rotation of every (up, down) pair of one tone; pairs are (l,e)-(l,g) for the
// carrier and (l,e)-(l+1,g) for the sideband.
void rotate_pairs(Eigen::VectorXcd& psi, Tone tone, double area, double phase);

// Exact evolution under one tone with complex coupling, carrier detuning and
// tilt, all constant over the duration.
void drive_single_tone(Eigen::VectorXcd& psi, Tone tone, cplx coupling, double detuning,
                       double tilt, double duration);

enum class Preparation { exact_pulse, adiabatic_ramp };

// (|l0,g> + |l0-1,e>)/sqrt(2) up to a global phase.
QuantumState prepare_bond_superposition(int sites, int site,
                                        Preparation method = Preparation::exact_pulse);

}  // namespace topoclock
