#include "topoclock/spectroscopy.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "topoclock/error.hpp"
#include "topoclock/units.hpp"

namespace topoclock {

double RabiSpec::pulse_time() const { return kPi / rabi; }

void RabiSpec::validate() const {
  if (!std::isfinite(rabi) || !(rabi > 0.0)) throw InvalidArgument("Rabi frequency must be positive");
}

double rabi_lineshape(const RabiSpec& spec, double detuning, const NoiseRealization& noise) {
  spec.validate();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v[basis_index(0, Level::ground)] = 1.0;
  const cplx coupling = spec.rabi * (1.0 + noise.amplitude_carrier) * std::polar(1.0, noise.phase);
  drive_single_tone(v, Tone::carrier, coupling, detuning, 0.0, spec.pulse_time());
  return 0.5 * (std::norm(v[basis_index(0, Level::excited)]) -
                std::norm(v[basis_index(0, Level::ground)]));
}

double rabi_slope(const RabiSpec& spec, double detuning) {
  const double h = 1e-5 * spec.rabi;
  return (rabi_lineshape(spec, detuning + h) - rabi_lineshape(spec, detuning - h)) / (2.0 * h);
}

double rabi_operating_point(const RabiSpec& spec) {
  spec.validate();
  // The steepest point is an inflection of the lineshape; search the first lobe.
  const auto [x, value] = boost::math::tools::brent_find_minima(
      [&](double d) { return -std::abs(rabi_slope(spec, d)); }, 0.3 * spec.rabi, 1.2 * spec.rabi, 40);
  (void)value;
  return x;
}

MdTrace run_md_protocol(const RMParameters& params, int sites, double t_max, const MdOptions& options) {
  params.validate();
  if (params.detuning != 0.0 || params.tilt != 0.0) {
    throw InvalidArgument("mean-displacement protocol runs at delta = delta_t = 0");
  }
  if (!(params.sideband > 0.0)) throw InvalidArgument("mean displacement needs Omega_B > 0");
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
  if (options.samples_per_period < 100) throw InvalidArgument("need >= 100 samples per period");

  const Propagator u(build_rm_hamiltonian(params, sites));
  const int l0 = sites / 2;
  const auto psi0 = QuantumState::localized(sites, l0, Level::ground);
  const Eigen::VectorXcd coeff0 = u.eigenvectors().adjoint() * psi0.amplitudes();
  const double max_dt = kTwoPi / params.sideband / options.samples_per_period;
  const int n = static_cast<int>(std::ceil(t_max / max_dt));
  const double dt = t_max / n;

  MdTrace trace;
  Eigen::VectorXcd coeff(coeff0.size());
  for (int k = 0; k <= n; ++k) {
    const double t = k * dt;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) {
      coeff[i] = coeff0[i] * std::polar(1.0, -u.energies()[i] * t);
    }
    auto psi = QuantumState::unchecked(sites, u.eigenvectors() * coeff);
    const double edge = edge_population(psi);
    trace.max_edge_population = std::max(trace.max_edge_population, edge);
    if (options.edge_guard && edge >= 1e-8) throw EdgeLeakageError(t, edge);
    trace.time.push_back(t);
    trace.x_direct.push_back(l0 - measure(psi).x);
    trace.iy.push_back(measure(apply_pulse(MeasurementPulse::m1, psi)).sz);
    const double x_prev = k == 0 ? 0.0 : trace.x.back();
    const double area = k == 0 ? 0.0 : 0.5 * dt * (trace.iy[k - 1] + trace.iy[k]);
    trace.x.push_back(x_prev + params.sideband * area);
  }
  return trace;
}

double plateau_average(const MdTrace& trace, double t_begin, double t_end) {
  if (!(t_end > t_begin)) throw InvalidArgument("plateau window must have t_end > t_begin");
  double area = 0.0;
  double span = 0.0;
  for (std::size_t k = 1; k < trace.time.size(); ++k) {
    const double a = trace.time[k - 1];
    const double b = trace.time[k];
    if (a < t_begin - 1e-12 || b > t_end + 1e-12) continue;
    area += 0.5 * (b - a) * (trace.x[k - 1] + trace.x[k]);
    span += b - a;
  }
  if (span <= 0.0) throw InvalidArgument("plateau window holds no samples");
  return area / span;
}

double run_one_step_protocol(const RMParameters& params, int sites, double t, bool edge_guard) {
  const auto psi = QuantumState::localized(sites, sites / 2, Level::ground);
  const auto evolved = evolve_const(build_rm_hamiltonian(params, sites), psi, t);
  if (edge_guard) {
    const double edge = edge_population(evolved);
    if (edge >= 1e-8) throw EdgeLeakageError(t, edge);
  }
  return measure(apply_pulse(MeasurementPulse::m2, evolved)).sz;
}

double run_alternative_ssh(const RMParameters& params, int sites, double t, Preparation method,
                           bool edge_guard) {
  const auto psi = prepare_bond_superposition(sites, sites / 2, method);
  const auto evolved = evolve_const(build_rm_hamiltonian(params, sites), psi, t);
  if (edge_guard) {
    const double edge = edge_population(evolved);
    if (edge >= 1e-8) throw EdgeLeakageError(t, edge);
  }
  return -measure(evolved).sz;
}

double SSHClockSpec::hold_time() const { return kPi / sideband; }

void SSHClockSpec::validate() const {
  if (!(carrier >= 0.0) || !(sideband > carrier) || !std::isfinite(sideband)) {
    throw InvalidArgument("SSH clock needs 0 <= Omega_A < Omega_B (non-trivial phase)");
  }
}

double run_ssh_clock(const SSHClockSpec& spec, double detuning, double tilt,
                     const NoiseRealization& noise) {
  spec.validate();
  const RMParameters nominal{spec.carrier, spec.sideband, detuning, tilt, 0.0};
  return run_one_step_protocol(noise.apply(nominal), spec.sites, spec.hold_time());
}

namespace {

template <class F>
double bracketed_root(F&& f, double lo, double hi, const char* what) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NoRootError(std::string("no sign change of the symmetrized signal over the ") + what +
                      " bracket");
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (a + b);
}

}  // namespace

Resonance solve_resonance(const SignalSource& first, const SignalSource& second,
                          const ResonanceWindow& w) {
  if (!(w.detuning_span > 0.0) || !(w.tilt_span > 0.0)) {
    throw InvalidArgument("resonance search spans must be positive");
  }
  auto symmetrized = [&w](const SignalSource& s, double u, double v) {
    return s(u + w.detuning_probe, v + w.tilt_probe) + s(u - w.detuning_probe, v - w.tilt_probe);
  };
  // Inner solve fixes the tilt offset for a trial detuning offset.
  auto tilt_for = [&](double u) {
    return bracketed_root([&](double v) { return symmetrized(second, u, v); }, -w.tilt_span,
                          w.tilt_span, "tilt");
  };
  const double u = bracketed_root([&](double x) { return symmetrized(first, x, tilt_for(x)); },
                                  -w.detuning_span, w.detuning_span, "detuning");
  return Resonance{u, tilt_for(u)};
}

}  // namespace topoclock
