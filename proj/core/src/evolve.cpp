#include "topoclock/evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "topoclock/error.hpp"
#include "topoclock/units.hpp"

namespace topoclock {

namespace {

// exp(-i dt [[a, conj(b)], [b, c]]) as {u00, u01, u10, u11}.
std::array<cplx, 4> exp_hermitian_2x2(double a, double c, cplx b, double dt) {
  const double mean = 0.5 * (a + c);
  const double half = 0.5 * (a - c);
  const double omega = std::sqrt(half * half + std::norm(b));
  const double cs = std::cos(omega * dt);
  // sin(omega dt)/omega, finite as omega -> 0
  const double sinc = omega * dt < 1e-8 ? dt : std::sin(omega * dt) / omega;
  const cplx global = std::polar(1.0, -mean * dt);
  const cplx mi{0.0, -1.0};
  return {global * (cs + mi * sinc * half), global * (mi * sinc * std::conj(b)),
          global * (mi * sinc * b), global * (cs - mi * sinc * half)};
}

void apply_2x2(const std::array<cplx, 4>& u, cplx& x0, cplx& x1) {
  const cplx y0 = u[0] * x0 + u[1] * x1;
  const cplx y1 = u[2] * x0 + u[3] * x1;
  x0 = y0;
  x1 = y1;
}

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("evolution time must be finite and >= 0");
}

struct KrylovWorkspace {
  Eigen::MatrixXcd basis;
  Eigen::VectorXcd w;
  std::vector<double> alpha;
  std::vector<double> beta;
};

KrylovWorkspace& workspace() {
  thread_local KrylovWorkspace ws;
  return ws;
}

// One Lanczos attempt over tau; false when the basis limit is reached
// before the residual estimate drops below tolerance.
bool try_krylov(const Hamiltonian& h, double tau, Eigen::VectorXcd& psi, double tolerance) {
  const Eigen::Index n = psi.size();
  const int max_dim = static_cast<int>(std::min<Eigen::Index>(n, 40));
  const double beta0 = psi.norm();
  auto& ws = workspace();
  if (ws.basis.rows() != n || ws.basis.cols() < max_dim + 1) ws.basis.resize(n, max_dim + 1);
  ws.alpha.assign(static_cast<std::size_t>(max_dim), 0.0);
  ws.beta.assign(static_cast<std::size_t>(max_dim), 0.0);
  ws.basis.col(0) = psi / beta0;
  const double scale = std::max(h.norm_bound(), 1e-300);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (int j = 0; j < max_dim; ++j) {
    const Eigen::VectorXcd vj = ws.basis.col(j);
    h.apply(vj, ws.w);
    ws.alpha[j] = ws.basis.col(j).dot(ws.w).real();
    ws.w -= ws.alpha[j] * ws.basis.col(j);
    if (j > 0) ws.w -= ws.beta[j - 1] * ws.basis.col(j - 1);
    for (int i = 0; i <= j; ++i) ws.w -= ws.basis.col(i).dot(ws.w) * ws.basis.col(i);
    ws.beta[j] = ws.w.norm();
    const int m = j + 1;
    const bool breakdown = ws.beta[j] < 1e-13 * scale;

    Eigen::VectorXd diag(m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int i = 0; i < m; ++i) diag[i] = ws.alpha[i];
    for (int i = 0; i + 1 < m; ++i) sub[i] = ws.beta[i];
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& q = eig.eigenvectors();
    Eigen::VectorXcd coeff(m);
    for (int i = 0; i < m; ++i) coeff[i] = std::polar(1.0, -eig.eigenvalues()[i] * tau) * q(0, i);
    const Eigen::VectorXcd y = q.cast<cplx>() * coeff;
    const double err = breakdown ? 0.0 : ws.beta[j] * std::abs(y[m - 1]);
    if (breakdown || err < tolerance || m == n) {
      psi = beta0 * (ws.basis.leftCols(m) * y);
      return true;
    }
    ws.basis.col(j + 1) = ws.w / ws.beta[j];
  }
  return false;
}

}  // namespace

Propagator::Propagator(const Hamiltonian& h) : sites_(h.sites()) {
  if (!h.is_finite()) throw NumericalError("Hamiltonian has non-finite entries");
  const Eigen::Index n = h.dimension();
  // Gauge the tridiagonal matrix to a real one, diagonalize, undo the gauge.
  Eigen::VectorXcd gauge(n);
  gauge[0] = 1.0;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) diag[i] = h.diagonal(i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const cplx b = h.lower(i);
    const double mag = std::abs(b);
    sub[i] = mag;
    gauge[i + 1] = mag > 0.0 ? gauge[i] * (b / mag) : gauge[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  energies_ = eig.eigenvalues();
  vectors_ = gauge.asDiagonal() * eig.eigenvectors().cast<cplx>();
}

void Propagator::apply(Eigen::VectorXcd& psi, double t) const {
  check_time(t);
  Eigen::VectorXcd coeff = vectors_.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] *= std::polar(1.0, -energies_[i] * t);
  psi = vectors_ * coeff;
}

QuantumState Propagator::operator()(const QuantumState& psi, double t) const {
  if (psi.sites() != sites_) throw InvalidArgument("state and Hamiltonian sizes differ");
  Eigen::VectorXcd v = psi.amplitudes();
  apply(v, t);
  return QuantumState::unchecked(sites_, std::move(v));
}

QuantumState evolve_const(const Hamiltonian& h, const QuantumState& psi, double t) {
  check_time(t);
  return Propagator(h)(psi, t);
}

Schedule::Schedule(HamiltonianSource source, double t0, double t1, double max_step)
    : source_(std::move(source)), t0_(t0), t1_(t1), steps_(0) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw InvalidArgument("schedule needs finite t1 > t0");
  }
  if (!std::isfinite(max_step) || !(max_step > 0.0)) {
    throw InvalidArgument("schedule step must be positive");
  }
  const double count = std::ceil((t1 - t0) / max_step * (1.0 - 1e-12));
  if (count > 1e9) throw InvalidArgument("schedule would need more than 1e9 steps");
  steps_ = std::max(1, static_cast<int>(count));
}

Schedule Schedule::from_parameters(ParameterSource params, int sites, double t0, double t1,
                                   double max_step) {
  return Schedule(
      [params = std::move(params), sites](double t) { return build_rm_hamiltonian(params(t), sites); },
      t0, t1, max_step);
}

Schedule Schedule::constant(const Hamiltonian& h, double duration, double max_step) {
  return Schedule([h](double) { return h; }, 0.0, duration, max_step);
}

double Schedule::default_step(double omega_max) {
  if (!(omega_max > 0.0)) throw InvalidArgument("default step needs a positive frequency");
  return kTwoPi / omega_max / 200.0;
}

Schedule Schedule::reversed() const {
  Schedule r = *this;
  const double a = t0_;
  const double b = t1_;
  r.source_ = [src = source_, a, b](double t) { return -src(a + b - t); };
  return r;
}

void block_step(const Hamiltonian& h, double dt, Eigen::VectorXcd& psi) {
  const Eigen::Index n = h.dimension();
  const bool carrier = h.has_carrier();
  const bool sideband = h.has_sideband();
  if (carrier && sideband) throw InvalidArgument("block_step needs a single coupling family");
  // Pairs start at 0 for carrier bonds, at 1 for sideband bonds.
  const Eigen::Index first = carrier ? 0 : 1;
  Eigen::Index i = 0;
  if (first == 1) {
    psi[0] *= std::polar(1.0, -h.diagonal(0) * dt);
    i = 1;
  }
  for (; i + 1 < n; i += 2) {
    const auto u = exp_hermitian_2x2(h.diagonal(i), h.diagonal(i + 1), h.lower(i), dt);
    apply_2x2(u, psi[i], psi[i + 1]);
  }
  if (i < n) psi[i] *= std::polar(1.0, -h.diagonal(i) * dt);
}

void krylov_step(const Hamiltonian& h, double dt, Eigen::VectorXcd& psi, double tolerance) {
  check_time(dt);
  if (dt == 0.0 || psi.norm() == 0.0) return;
  double done = 0.0;
  // Keep ||H|| tau moderate so the basis converges well inside its limit.
  double tau = std::min(dt, 8.0 / std::max(h.norm_bound(), 1e-300));
  while (done < dt) {
    const double attempt = std::min(tau, dt - done);
    if (try_krylov(h, attempt, psi, tolerance)) {
      done += attempt;
    } else {
      tau = 0.5 * attempt;
      if (tau < dt * 1e-12) throw NumericalError("Krylov step failed to converge");
    }
  }
}

void step_exact(const Hamiltonian& h, double dt, Eigen::VectorXcd& psi, double krylov_tolerance) {
  if (!h.has_carrier() || !h.has_sideband()) {
    block_step(h, dt, psi);
  } else {
    krylov_step(h, dt, psi, krylov_tolerance);
  }
}

QuantumState evolve_schedule(const Schedule& schedule, const QuantumState& psi,
                             const EvolveOptions& options, const StepObserver& observer) {
  Eigen::VectorXcd v = psi.amplitudes();
  const int sites = psi.sites();
  const double dt = schedule.step();
  for (int k = 0; k < schedule.steps(); ++k) {
    const Hamiltonian h = schedule.at(schedule.midpoint(k));
    if (h.sites() != sites) throw InvalidArgument("schedule and state sizes differ");
    if (!h.is_finite()) throw NumericalError("schedule produced non-finite Hamiltonian");
    step_exact(h, dt, v, options.krylov_tolerance);
    const double t = schedule.start() + (k + 1) * dt;
    if (options.edge_guard) {
      const double edge = edge_population(v);
      if (edge >= options.edge_threshold) throw EdgeLeakageError(t, edge);
    }
    if (observer) observer(t, v);
  }
  QuantumState out = QuantumState::unchecked(sites, std::move(v));
  out.check_normalized();
  return out;
}

PulseSpec pulse_spec(MeasurementPulse pulse) {
  switch (pulse) {
    case MeasurementPulse::m1:
      return {Tone::sideband, 0.5 * kPi, 0.0};
    case MeasurementPulse::m2:
      return {Tone::sideband, 0.5 * kPi, 0.5 * kPi};
    case MeasurementPulse::carrier_half:
      return {Tone::carrier, 0.5 * kPi, 0.0};
    case MeasurementPulse::carrier_pi:
      return {Tone::carrier, kPi, 0.0};
    case MeasurementPulse::sideband_pi:
      return {Tone::sideband, kPi, 0.0};
  }
  throw InvalidArgument("unknown pulse");
}

void rotate_pairs(Eigen::VectorXcd& psi, Tone tone, double area, double phase) {
  const double c = std::cos(0.5 * area);
  const double s = std::sin(0.5 * area);
  const cplx mi{0.0, -1.0};
  const std::array<cplx, 4> u{c, mi * s * std::polar(1.0, phase), mi * s * std::polar(1.0, -phase),
                              c};
  const Eigen::Index n = psi.size();
  if (tone == Tone::carrier) {
    for (Eigen::Index i = 0; i + 1 < n; i += 2) apply_2x2(u, psi[i + 1], psi[i]);
  } else {
    for (Eigen::Index i = 1; i + 1 < n; i += 2) apply_2x2(u, psi[i], psi[i + 1]);
  }
}

void drive_single_tone(Eigen::VectorXcd& psi, Tone tone, cplx coupling, double detuning,
                       double tilt, double duration) {
  check_time(duration);
  const int sites = static_cast<int>(psi.size() / 2);
  Hamiltonian h(sites);
  for (int l = 0; l < sites; ++l) {
    h.set_diagonal(basis_index(l, Level::ground), 0.5 * detuning + tilt * l);
    h.set_diagonal(basis_index(l, Level::excited), -0.5 * detuning + tilt * l);
    if (tone == Tone::carrier) {
      h.set_carrier(l, 0.5 * coupling);
    } else if (l + 1 < sites) {
      h.set_sideband(l, 0.5 * coupling);
    }
  }
  block_step(h, duration, psi);
}

QuantumState apply_pulse(const PulseSpec& pulse, const QuantumState& psi, double rabi,
                         PulseMode mode) {
  Eigen::VectorXcd v = psi.amplitudes();
  if (mode == PulseMode::ideal) {
    rotate_pairs(v, pulse.tone, pulse.area, pulse.phase);
  } else {
    if (!(rabi > 0.0)) throw InvalidArgument("finite pulses need a positive Rabi frequency");
    drive_single_tone(v, pulse.tone, rabi * std::polar(1.0, pulse.phase), 0.0, 0.0,
                      pulse.area / rabi);
  }
  return QuantumState::unchecked(psi.sites(), std::move(v));
}

QuantumState apply_pulse(MeasurementPulse pulse, const QuantumState& psi, double rabi,
                         PulseMode mode) {
  return apply_pulse(pulse_spec(pulse), psi, rabi, mode);
}

QuantumState prepare_bond_superposition(int sites, int site, Preparation method) {
  if (site < 1 || site >= sites) {
    throw InvalidArgument("bond superposition needs 1 <= l0 < L, got l0 = " + std::to_string(site));
  }
  const QuantumState start = QuantumState::localized(sites, site, Level::ground);
  if (method == Preparation::exact_pulse) {
    return apply_pulse(PulseSpec{Tone::sideband, 0.5 * kPi, 0.5 * kPi}, start);
  }
  // Field (Omega, delta) = (sin theta, cos theta) rotated from the detuning
  // axis onto the coupling axis; |l0,g> follows the upper dimer state.
  constexpr double field = 1.0;
  constexpr double duration = 400.0 * kPi / field;
  auto params = [](double t) {
    const double s = t / duration;
    const double theta = 0.5 * kPi * (s - std::sin(kTwoPi * s) / kTwoPi);
    RMParameters p;
    p.sideband = field * std::sin(theta);
    p.detuning = field * std::cos(theta);
    return p;
  };
  EvolveOptions options;
  options.edge_guard = false;
  const auto schedule = Schedule::from_parameters(params, sites, 0.0, duration,
                                                  Schedule::default_step(field));
  return evolve_schedule(schedule, start, options);
}

}  // namespace topoclock
