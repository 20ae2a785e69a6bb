#include "topoclock/analytics.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "topoclock/csv.hpp"
#include "topoclock/error.hpp"
#include "topoclock/evolve.hpp"
#include "topoclock/units.hpp"

namespace topoclock {

namespace {

void check_couplings(double carrier, double sideband) {
  if (!std::isfinite(carrier) || !std::isfinite(sideband) || carrier < 0.0 || sideband < 0.0) {
    throw InvalidArgument("couplings must be finite and non-negative");
  }
  if (carrier == 0.0 && sideband == 0.0) throw InvalidArgument("couplings must not both vanish");
}

void check_points(int points) {
  if (points < 8) throw InvalidArgument("Brillouin grid needs at least 8 points");
}

template <class F>
double zone_average(int points, F&& f) {
  check_points(points);
  double sum = 0.0;
  for (double k : brillouin_grid(points)) sum += f(k);
  return sum / points;
}

// |h(k)|^2 with h = Omega_A + Omega_B e^{ik}
double field_squared(double a, double b, double k) { return a * a + b * b + 2.0 * a * b * std::cos(k); }

// sin(x t)/x, finite at x = 0.
double sinc_t(double x, double t) { return std::abs(x * t) < 1e-12 ? t : std::sin(x * t) / x; }

}  // namespace

std::vector<double> brillouin_grid(int points) {
  check_points(points);
  std::vector<double> k(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) k[j] = -kPi + kTwoPi * (j + 1) / points;
  return k;
}

BandData band_data(double carrier, double sideband, int points) {
  check_couplings(carrier, sideband);
  BandData d;
  d.k = brillouin_grid(points);
  double previous = 0.0;
  for (std::size_t j = 0; j < d.k.size(); ++j) {
    const double k = d.k[j];
    const double e2 = field_squared(carrier, sideband, k);
    d.energy.push_back(0.5 * std::sqrt(e2));
    double phi = std::atan2(sideband * std::sin(k), carrier + sideband * std::cos(k));
    if (j > 0) phi += kTwoPi * std::round((previous - phi) / kTwoPi);
    previous = phi;
    d.phase.push_back(phi);
    const double dphi = e2 > 0.0 ? sideband * (sideband + carrier * std::cos(k)) / e2 : 0.0;
    d.connection.push_back(-0.5 * dphi);
  }
  return d;
}

std::string BandData::csv() const {
  CsvTable t({"k", "E_k", "phi_k", "A_k"});
  for (std::size_t j = 0; j < k.size(); ++j) t.add_row({k[j], energy[j], phase[j], connection[j]});
  return t.str();
}

double winding_number_raw(double carrier, double sideband, int points) {
  check_couplings(carrier, sideband);
  if (carrier > 0.0 && std::abs(sideband / carrier - 1.0) < 1e-9) {
    throw CriticalPointError("winding number undefined at the critical point r = 1");
  }
  // W = -(1/pi) int A dk = (1/2pi) int dphi/dk dk
  return zone_average(points, [&](double k) {
    return sideband * (sideband + carrier * std::cos(k)) / field_squared(carrier, sideband, k);
  });
}

int winding_number(double carrier, double sideband, int points) {
  return static_cast<int>(std::lround(winding_number_raw(carrier, sideband, points)));
}

double zak_phase(double carrier, double sideband, int points) {
  return -kPi * winding_number_raw(carrier, sideband, points);
}

// The Bloch sum for the current carries (Omega_A cos k + Omega_B)/(4 E_k),
// not 1/E_k^2 with a 1/2L normalization: only this form gives sin(Omega_B t)/2
// in the dimerized limit and matches direct evolution.
double analytic_Iy(double carrier, double sideband, double t, int points) {
  check_couplings(carrier, sideband);
  return zone_average(points, [&](double k) {
    const double two_e = std::sqrt(field_squared(carrier, sideband, k));
    return 0.5 * (carrier * std::cos(k) + sideband) * sinc_t(two_e, t);
  });
}

double analytic_mean_displacement(double carrier, double sideband, double t, int points) {
  check_couplings(carrier, sideband);
  return zone_average(points, [&](double k) {
    const double e = 0.5 * std::sqrt(field_squared(carrier, sideband, k));
    const double s = sinc_t(e, t);
    return 0.25 * sideband * (carrier * std::cos(k) + sideband) * s * s;
  });
}

// Second-order perturbation theory in delta gives the same Bloch integral as
// the mean displacement, so the secular slope is W/2 per unit delta/Omega_B.
double detuning_response(double carrier, double sideband, double t, int points) {
  return analytic_mean_displacement(carrier, sideband, t, points);
}

void apply_ix(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  const Eigen::Index n = in.size();
  out = Eigen::VectorXcd::Zero(n);
  // I_x = sum_l (|l,e><l+1,g| + h.c.)/2
  for (Eigen::Index e = 1; e + 1 < n; e += 2) {
    out[e] += 0.5 * in[e + 1];
    out[e + 1] += 0.5 * in[e];
  }
}

void apply_position(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  out.resize(in.size());
  for (Eigen::Index i = 0; i < in.size(); ++i) out[i] = static_cast<double>(i / 2) * in[i];
}

void apply_half_population_difference(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  out.resize(in.size());
  for (Eigen::Index i = 0; i < in.size(); ++i) out[i] = (i % 2 == 0 ? 0.5 : -0.5) * in[i];
}

double kubo_response(const Hamiltonian& h, const QuantumState& psi, const OperatorAction& observable,
                     const OperatorAction& perturbation, double t, int panels) {
  if (!(t >= 0.0)) throw InvalidArgument("response time must be >= 0");
  if (t == 0.0) return 0.0;
  if (panels < 1) throw InvalidArgument("need at least one quadrature panel");
  const Propagator u(h);
  Eigen::VectorXcd final_state = psi.amplitudes();
  u.apply(final_state, t);
  Eigen::VectorXcd o_final;
  observable(final_state, o_final);

  auto integrand = [&](double s) {
    Eigen::VectorXcd v = psi.amplitudes();
    u.apply(v, s);
    Eigen::VectorXcd pv;
    perturbation(v, pv);
    u.apply(pv, t - s);
    return 2.0 * o_final.dot(pv).imag();
  };
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const double width = t / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) sum += Rule::integrate(integrand, p * width, (p + 1) * width);
  return sum;
}

double tilt_response(double carrier, double sideband, double t, int sites) {
  check_couplings(carrier, sideband);
  RMParameters p{carrier, sideband, 0.0, 0.0, 0.0};
  const Hamiltonian h = build_rm_hamiltonian(p, sites);
  const auto psi = QuantumState::localized(sites, sites / 2, Level::ground);
  const int panels = std::max(16, static_cast<int>(std::ceil(h.norm_bound() * t / 2.0)));
  return sideband * kubo_response(h, psi, apply_ix, apply_position, t, panels);
}

double linear_response_Ix(double carrier, double sideband, double detuning, double tilt, double t,
                          int sites) {
  check_couplings(carrier, sideband);
  if (sideband == 0.0) throw InvalidArgument("linear response is normalized by Omega_B > 0");
  double value = detuning_response(carrier, sideband, t) * detuning;
  if (tilt != 0.0) value += tilt_response(carrier, sideband, t, sites) * tilt;
  return value / sideband;
}

ObservableSet brute_force_observables(const RMParameters& params, int sites, double t) {
  const Hamiltonian h = build_rm_hamiltonian(params, sites);
  const auto psi = QuantumState::localized(sites, sites / 2, Level::ground);
  return measure(evolve_const(h, psi, t), t);
}

double s_function(double carrier, double sideband, double t, int sites, double relative_step) {
  check_couplings(carrier, sideband);
  if (sideband == 0.0) throw InvalidArgument("S function is normalized by Omega_B > 0");
  if (t == 0.0) return 0.0;
  const double step = relative_step * sideband;
  RMParameters p{carrier, sideband, 0.0, step, 0.0};
  const double plus = brute_force_observables(p, sites, t).ix;
  p.tilt = -step;
  const double minus = brute_force_observables(p, sites, t).ix;
  return sideband * (plus - minus) / (2.0 * step);
}

}  // namespace topoclock
