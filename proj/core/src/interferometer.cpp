#include "topoclock/interferometer.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "topoclock/error.hpp"
#include "topoclock/units.hpp"

namespace topoclock {

StarkModel StarkModel::standard() {
  return StarkModel{true, bessel_argument_for_ratio(1.73), hz_to_angular(866.0)};
}

double StarkModel::coefficient(Tone tone, double omega) const {
  if (!enabled || omega == 0.0) return 0.0;
  const StarkShift s = tone == Tone::carrier
                           ? ac_stark_shift_effective(omega, 0.0, bessel_argument, lattice_tilt)
                           : ac_stark_shift_effective(0.0, omega, bessel_argument, lattice_tilt);
  return s.carrier + s.sideband;
}

double StarkModel::residual_detuning(Tone tone, double omega, double amplitude_noise) const {
  if (!enabled || omega == 0.0 || amplitude_noise == 0.0) return 0.0;
  const double x = coefficient(tone, omega);
  const double scale = (1.0 + amplitude_noise) * (1.0 + amplitude_noise);
  return 2.0 * x * (scale - 1.0);
}

double MPPSpec::drive_time() const { return pulses * (kPi / rabi + kPi / rabi); }
double MPPSpec::total_time() const { return 2.0 * drive_time() + dark_time; }

void MPPSpec::validate() const {
  if (!(rabi > 0.0) || !std::isfinite(rabi)) throw InvalidArgument("MPP Rabi frequency must be positive");
  if (pulses < 1) throw InvalidArgument("MPP needs at least one composite pulse");
  if (!(dark_time >= 0.0) || !std::isfinite(dark_time)) throw InvalidArgument("dark time must be >= 0");
}

MPPSpec MPPSpec::p0() { return {"P0", hz_to_angular(24.0), 24, 2.0, PulseMode::ideal}; }
MPPSpec MPPSpec::p1() { return {"P1", hz_to_angular(40.0), 15, 3.25, PulseMode::ideal}; }
MPPSpec MPPSpec::p2() { return {"P2", hz_to_angular(40.0), 65, 0.75, PulseMode::ideal}; }

PumpLoop PumpLoop::standard() {
  PumpLoop loop;
  // 2 pi 40 Hz leaves the tau = 1/12 s cycle visibly diabatic; 70 Hz does not.
  loop.coupling_amplitude = hz_to_angular(70.0);
  loop.detuning_amplitude = hz_to_angular(70.0);
  return loop;
}

void PumpLoop::validate() const {
  if (!(coupling_amplitude > 0.0) || !(detuning_amplitude > 0.0)) {
    throw InvalidArgument("pump loop amplitudes must be positive");
  }
  if (!std::isfinite(detuning_offset)) throw InvalidArgument("pump loop offset must be finite");
  if (shape == PumpShape::constant_sum && coupling_sum < coupling_amplitude) {
    throw InvalidArgument("constant-sum loop needs Omega_A + Omega_B >= m");
  }
}

RMParameters PumpLoop::at(double s) const {
  RMParameters p;
  const double theta = kTwoPi * (s - std::floor(s));
  if (shape == PumpShape::constant_sum) {
    const double angle = reversed ? -theta : theta;
    p.detuning = detuning_offset + detuning_amplitude * std::sin(angle);
    const double diff = coupling_amplitude * std::cos(angle);
    p.carrier = 0.5 * (coupling_sum + diff);
    p.sideband = 0.5 * (coupling_sum - diff);
    return p;
  }
  // Slow start and stop of each half keeps the passage adiabatic.
  const double alpha = theta - 0.5 * std::sin(2.0 * theta);
  const bool first_half = theta < kPi;
  const Tone first = reversed ? Tone::carrier : Tone::sideband;
  const Tone active = first_half ? first : (first == Tone::carrier ? Tone::sideband : Tone::carrier);
  const double coupling = coupling_amplitude * std::abs(std::sin(alpha));
  (active == Tone::carrier ? p.carrier : p.sideband) = coupling;
  p.detuning = detuning_offset + detuning_amplitude * std::cos(alpha);
  return p;
}

bool PumpLoop::encloses_critical_point() const {
  return std::abs(detuning_offset) < detuning_amplitude;
}

double PumpLoop::max_coupling() const {
  return shape == PumpShape::constant_sum ? 0.5 * (coupling_sum + coupling_amplitude)
                                          : coupling_amplitude;
}

double TPPSpec::total_time() const { return 2.0 * cycles * cycle_time; }

void TPPSpec::validate() const {
  if (!(cycle_time > 0.0) || !std::isfinite(cycle_time)) throw InvalidArgument("cycle time must be positive");
  if (cycles < 1) throw InvalidArgument("TPP needs at least one pump cycle");
  if (steps_per_cycle < 2) throw InvalidArgument("need at least 2 steps per cycle");
  loop.validate();
}

TPPSpec TPPSpec::tau12() { return {"TPP_tau_1/12", 1.0 / 12.0, 24, PumpLoop::standard(), 2000}; }
TPPSpec TPPSpec::tau5() { return {"TPP_tau_1/5", 1.0 / 5.0, 10, PumpLoop::standard(), 2000}; }

double ideal_phase_mpp(const MPPSpec& spec, double tilt) {
  spec.validate();
  return 2.0 * tilt * (spec.total_time() - 2.0 * spec.drive_time()) * spec.pulses;
}

double ideal_phase_tpp(const TPPSpec& spec, double tilt) {
  spec.validate();
  const double tf = spec.total_time();
  return tilt * tf * tf / (2.0 * spec.cycle_time);
}

double discrete_phase_tpp(const TPPSpec& spec, double tilt) {
  spec.validate();
  double sum = 0.0;
  for (int n = 0; n <= spec.cycles; ++n) sum += n * spec.cycle_time;
  return 4.0 * tilt * sum;
}

// Each composite pulse or pump cycle moves amplitude by at most one site, so
// 2 N_p steps bound the reach of imperfectly returned arms.
int interferometer_sites(int pulses, int guard_sites) { return 2 * (2 * pulses + guard_sites) + 1; }

namespace {

using Vector = Eigen::VectorXcd;

void check_edges(const Vector& v, double time, const InterferometerOptions& options) {
  if (!options.edge_guard) return;
  const double edge = edge_population(v);
  if (edge >= 1e-8) throw EdgeLeakageError(time, edge);
}

TraceSample sample(const char* stage, int step, const Vector& v, const Vector& initial, int sites) {
  const auto o = measure(QuantumState::unchecked(sites, v));
  TraceSample s;
  s.stage = stage;
  s.step = step;
  s.separation = o.deg ? *o.deg : std::numeric_limits<double>::quiet_NaN();
  s.ne = o.ne;
  s.ng = o.ng;
  s.overlap = std::norm(initial.dot(v));
  return s;
}

// |l0,g> rotated into (|g> + |e>)/sqrt(2) on the same site.
Vector initial_superposition(int sites) {
  Vector v = Vector::Zero(2 * static_cast<Eigen::Index>(sites));
  v[basis_index(sites / 2, Level::ground)] = 1.0;
  rotate_pairs(v, Tone::carrier, 0.5 * kPi, 0.5 * kPi);
  return v;
}

struct Sequence {
  Vector pre_final;
  std::vector<TraceSample> trace;
};

InterferometerRun finish(int sites, const Vector& initial, Sequence main, const Vector& reference) {
  InterferometerRun run;
  run.sites = sites;
  const auto pre = QuantumState::unchecked(sites, main.pre_final);
  pre.check_normalized();
  const auto ref = QuantumState::unchecked(sites, reference);
  run.sy = measure(pre).sy;
  const auto post = measure(apply_pulse(MeasurementPulse::carrier_half, pre));
  run.sz = post.sz;
  run.ne = post.ne;
  run.ng = post.ng;
  run.fidelity = std::norm(initial.dot(reference));
  // Tilt phase e^{-i delta_t l t} lags the upper (e) arm, so the accumulated
  // phase is minus the coherence phase relative to the reference.
  run.phase = -std::arg(carrier_coherence(pre) * std::conj(carrier_coherence(ref)));
  for (const auto& s : main.trace) {
    if (std::isfinite(s.separation)) run.max_separation = std::max(run.max_separation, s.separation);
  }
  run.trace = std::move(main.trace);
  return run;
}

void apply_mpp_pulse(Vector& v, Tone tone, bool reverse, const MPPSpec& spec,
                     const NoiseRealization& noise, const StarkModel& stark, double tilt) {
  const double eps = noise.amplitude(tone);
  const double chi = noise.phase + (reverse ? kPi : 0.0);
  const cplx coupling = spec.rabi * (1.0 + eps) * std::polar(1.0, chi);
  const double residual = stark.residual_detuning(tone, spec.rabi, eps);
  const double pulse_tilt = spec.mode == PulseMode::finite ? tilt : 0.0;
  drive_single_tone(v, tone, coupling, residual, pulse_tilt, kPi / spec.rabi);
}

void dark_evolution(Vector& v, double tilt, double duration) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -tilt * static_cast<double>(i / 2) * duration);
}

Sequence mpp_sequence(const MPPSpec& spec, double tilt, const NoiseRealization& noise,
                      const InterferometerOptions& options, int sites, const Vector& initial,
                      bool record) {
  Sequence out;
  Vector v = initial;
  const double total_tilt = tilt + noise.tilt * spec.rabi;
  const double pulse = kPi / spec.rabi;
  double t = 0.0;
  for (int n = 1; n <= spec.pulses; ++n) {
    apply_mpp_pulse(v, Tone::sideband, false, spec, noise, options.stark, total_tilt);
    apply_mpp_pulse(v, Tone::carrier, false, spec, noise, options.stark, total_tilt);
    t += 2.0 * pulse;
    check_edges(v, t, options);
    if (record) out.trace.push_back(sample("forward", n, v, initial, sites));
  }
  dark_evolution(v, total_tilt, spec.dark_time);
  t += spec.dark_time;
  if (record) out.trace.push_back(sample("dark", spec.pulses, v, initial, sites));
  for (int n = spec.pulses - 1; n >= 0; --n) {
    apply_mpp_pulse(v, Tone::carrier, true, spec, noise, options.stark, total_tilt);
    apply_mpp_pulse(v, Tone::sideband, true, spec, noise, options.stark, total_tilt);
    t += 2.0 * pulse;
    check_edges(v, t, options);
    if (record) out.trace.push_back(sample("reverse", n, v, initial, sites));
  }
  out.pre_final = std::move(v);
  return out;
}

Hamiltonian pump_hamiltonian(const PumpLoop& loop, double s, bool reverse, double tilt,
                             const NoiseRealization& noise, const StarkModel& stark, int sites) {
  const RMParameters drive = loop.at(s);
  RMParameters p;
  p.carrier = drive.carrier * (1.0 + noise.amplitude_carrier);
  p.sideband = drive.sideband * (1.0 + noise.amplitude_sideband);
  p.phase = noise.phase + (reverse ? kPi : 0.0);
  // The reversed drive flips its detuning; light shifts and tilt do not.
  p.detuning = (reverse ? -drive.detuning : drive.detuning) +
               stark.residual_detuning(Tone::carrier, drive.carrier, noise.amplitude_carrier) +
               stark.residual_detuning(Tone::sideband, drive.sideband, noise.amplitude_sideband);
  p.tilt = tilt;
  return build_rm_hamiltonian(p, sites);
}

void pump_cycle(Vector& v, const TPPSpec& spec, bool reverse, double tilt,
                const NoiseRealization& noise, const StarkModel& stark, int sites) {
  const int steps = spec.steps_per_cycle;
  const double dt = spec.cycle_time / steps;
  for (int k = 0; k < steps; ++k) {
    const double s = (k + 0.5) / steps;
    step_exact(pump_hamiltonian(spec.loop, reverse ? 1.0 - s : s, reverse, tilt, noise, stark, sites),
               dt, v);
  }
}

Sequence tpp_sequence(const TPPSpec& spec, double tilt, const NoiseRealization& noise,
                      const InterferometerOptions& options, int sites, const Vector& initial,
                      bool record) {
  Sequence out;
  Vector v = initial;
  const double total_tilt = tilt + noise.tilt * spec.loop.max_coupling();
  double t = 0.0;
  for (int n = 1; n <= spec.cycles; ++n) {
    pump_cycle(v, spec, false, total_tilt, noise, options.stark, sites);
    t += spec.cycle_time;
    check_edges(v, t, options);
    if (record) out.trace.push_back(sample("forward", n, v, initial, sites));
  }
  for (int n = spec.cycles - 1; n >= 0; --n) {
    pump_cycle(v, spec, true, total_tilt, noise, options.stark, sites);
    t += spec.cycle_time;
    check_edges(v, t, options);
    if (record) out.trace.push_back(sample("reverse", n, v, initial, sites));
  }
  out.pre_final = std::move(v);
  return out;
}

}  // namespace

InterferometerRun run_mpp(const MPPSpec& spec, double tilt, const NoiseRealization& noise,
                          const InterferometerOptions& options) {
  spec.validate();
  const int sites = interferometer_sites(spec.pulses, options.guard_sites);
  const Vector initial = initial_superposition(sites);
  Sequence main = mpp_sequence(spec, tilt, noise, options, sites, initial, true);
  Vector reference = tilt == 0.0 ? main.pre_final
                                 : mpp_sequence(spec, 0.0, noise, options, sites, initial, false).pre_final;
  return finish(sites, initial, std::move(main), reference);
}

InterferometerRun run_tpp(const TPPSpec& spec, double tilt, const NoiseRealization& noise,
                          const InterferometerOptions& options) {
  spec.validate();
  const int sites = interferometer_sites(spec.cycles, options.guard_sites);
  const Vector initial = initial_superposition(sites);
  Sequence main = tpp_sequence(spec, tilt, noise, options, sites, initial, true);
  Vector reference = tilt == 0.0 ? main.pre_final
                                 : tpp_sequence(spec, 0.0, noise, options, sites, initial, false).pre_final;
  InterferometerRun run = finish(sites, initial, std::move(main), reference);
  const double transport = pump_transport(spec, Level::excited, 1, 12, 0.0);
  if (std::abs(std::abs(transport) - 1.0) > 0.05) {
    run.warnings.push_back("pump cycle is not adiabatic: noise-free transport " +
                           std::to_string(transport) + " sites per cycle");
  }
  return run;
}

double pump_transport(const TPPSpec& spec, Level level, int cycles, int sites, double tilt) {
  spec.validate();
  if (cycles < 1) throw InvalidArgument("need at least one cycle");
  const auto start = QuantumState::localized(sites, sites / 2, level);
  Vector v = start.amplitudes();
  StarkModel off;
  off.enabled = false;
  InterferometerOptions guard;
  for (int n = 1; n <= cycles; ++n) {
    pump_cycle(v, spec, false, tilt, NoiseRealization{}, off, sites);
    check_edges(v, n * spec.cycle_time, guard);
  }
  const double x_end = measure(QuantumState::unchecked(sites, v)).x;
  return (x_end - sites / 2) / cycles;
}

std::vector<double> unwrap_phase_ladder(const std::vector<double>& wrapped) {
  std::vector<double> out;
  out.reserve(wrapped.size());
  double previous = 0.0;
  for (double w : wrapped) {
    const double value = w + kTwoPi * std::round((previous - w) / kTwoPi);
    out.push_back(value);
    previous = value;
  }
  return out;
}

RecoveryStatistics recovery_fidelity_experiment(
    const std::function<InterferometerRun(const NoiseRealization&)>& protocol, const NoiseSpec& noise,
    std::size_t realizations, unsigned workers) {
  const auto ensemble = ensemble_run(
      [&](const NoiseRealization& r, std::size_t) { return std::vector<double>{protocol(r).fidelity}; },
      {"F"}, noise, realizations, workers);
  RecoveryStatistics out;
  out.fidelity = ensemble.column("F");
  out.summary = median_and_interval(out.fidelity);
  return out;
}

}  // namespace topoclock
