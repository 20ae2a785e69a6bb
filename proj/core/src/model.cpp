#include "topoclock/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "topoclock/error.hpp"
#include "topoclock/units.hpp"

namespace topoclock {

namespace {

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw InvalidArgument(std::string(name) + " must be finite");
  }
}

void require_sites(int sites) {
  if (sites < 2) {
    throw InvalidArgument("lattice needs at least 2 sites, got " + std::to_string(sites));
  }
}

}  // namespace

std::string_view to_string(Level level) {
  return level == Level::ground ? "g" : "e";
}

std::string_view to_string(Tone tone) {
  return tone == Tone::carrier ? "carrier" : "sideband";
}

void LatticeParams::validate() const {
  require_sites(sites);
  require_finite(tunneling, "lattice.tunneling");
  require_finite(tilt, "lattice.tilt");
  require_finite(soc_phase, "lattice.soc_phase");
  require_finite(overlap, "lattice.overlap");
  if (tilt <= 0.0) throw InvalidArgument("lattice.tilt must be positive");
  if (tunneling < 0.0) throw InvalidArgument("lattice.tunneling must be non-negative");
  if (soc_phase < 0.0 || soc_phase >= kTwoPi) {
    throw InvalidArgument("lattice.soc_phase must lie in [0, 2pi)");
  }
  if (overlap <= 0.0 || overlap > 1.0) throw InvalidArgument("lattice.overlap must lie in (0, 1]");
}

double LatticeParams::bessel_argument() const {
  return 4.0 * tunneling * std::abs(std::sin(0.5 * soc_phase)) / tilt;
}

void RMParameters::validate() const {
  require_finite(carrier, "carrier");
  require_finite(sideband, "sideband");
  require_finite(detuning, "detuning");
  require_finite(tilt, "tilt");
  require_finite(phase, "phase");
  if (carrier < 0.0) throw InvalidArgument("carrier coupling must be non-negative");
  if (sideband < 0.0) throw InvalidArgument("sideband coupling must be non-negative");
}

double RMParameters::ratio() const {
  if (carrier == 0.0) throw InvalidArgument("ratio undefined for vanishing carrier coupling");
  return sideband / carrier;
}

void BareDrives::validate() const {
  require_finite(carrier, "bare carrier");
  require_finite(sideband, "bare sideband");
  if (carrier < 0.0 || sideband < 0.0) throw InvalidArgument("bare Rabi frequencies must be >= 0");
}

Hamiltonian::Hamiltonian(int sites, std::string frame)
    : sites_(sites),
      frame_(std::move(frame)),
      diag_(static_cast<std::size_t>(2 * std::max(sites, 0)), 0.0),
      lower_(static_cast<std::size_t>(std::max(2 * sites - 1, 0)), cplx{}) {
  require_sites(sites);
}

void Hamiltonian::set_carrier(int site, cplx value) {
  lower_[static_cast<std::size_t>(2 * site)] = value;
}

void Hamiltonian::set_sideband(int site, cplx value) {
  // <l,e|H|l+1,g> is the upper element at (2l+1, 2l+2).
  lower_[static_cast<std::size_t>(2 * site + 1)] = std::conj(value);
}

cplx Hamiltonian::carrier(int site) const { return lower_[static_cast<std::size_t>(2 * site)]; }

cplx Hamiltonian::sideband(int site) const {
  return std::conj(lower_[static_cast<std::size_t>(2 * site + 1)]);
}

bool Hamiltonian::has_carrier() const {
  for (std::size_t i = 0; i < lower_.size(); i += 2) {
    if (lower_[i] != cplx{}) return true;
  }
  return false;
}

bool Hamiltonian::has_sideband() const {
  for (std::size_t i = 1; i < lower_.size(); i += 2) {
    if (lower_[i] != cplx{}) return true;
  }
  return false;
}

bool Hamiltonian::is_finite() const {
  return std::all_of(diag_.begin(), diag_.end(), [](double d) { return std::isfinite(d); }) &&
         std::all_of(lower_.begin(), lower_.end(), [](cplx c) {
           return std::isfinite(c.real()) && std::isfinite(c.imag());
         });
}

double Hamiltonian::norm_bound() const {
  double bound = 0.0;
  const auto n = diag_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(diag_[i]);
    if (i > 0) row += std::abs(lower_[i - 1]);
    if (i + 1 < n) row += std::abs(lower_[i]);
    bound = std::max(bound, row);
  }
  return bound;
}

Eigen::MatrixXcd Hamiltonian::dense() const {
  const Eigen::Index n = dimension();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = diag_[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i + 1, i) = lower_[static_cast<std::size_t>(i)];
    h(i, i + 1) = std::conj(lower_[static_cast<std::size_t>(i)]);
  }
  return h;
}

void Hamiltonian::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  const Eigen::Index n = dimension();
  out.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = diag_[static_cast<std::size_t>(i)] * in[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const cplx b = lower_[static_cast<std::size_t>(i)];
    out[i + 1] += b * in[i];
    out[i] += std::conj(b) * in[i + 1];
  }
}

Hamiltonian Hamiltonian::operator-() const {
  Hamiltonian h = *this;
  for (auto& d : h.diag_) d = -d;
  for (auto& b : h.lower_) b = -b;
  return h;
}

Hamiltonian build_rm_hamiltonian(const RMParameters& params, int sites) {
  params.validate();
  Hamiltonian h(sites);
  const cplx phase = std::polar(1.0, params.phase);
  for (int l = 0; l < sites; ++l) {
    h.set_diagonal(basis_index(l, Level::ground), 0.5 * params.detuning + params.tilt * l);
    h.set_diagonal(basis_index(l, Level::excited), -0.5 * params.detuning + params.tilt * l);
    h.set_carrier(l, 0.5 * params.carrier * phase);
    if (l + 1 < sites) h.set_sideband(l, 0.5 * params.sideband * phase);
  }
  return h;
}

Hamiltonian build_rm_hamiltonian(const RMParameters& params, const LatticeParams& lattice) {
  lattice.validate();
  return build_rm_hamiltonian(params, lattice.sites);
}

double bessel_j(int order, double x) {
  const int n = std::abs(order);
  const double value = std::cyl_bessel_j(static_cast<double>(n), std::abs(x));
  // J_n(-x) = (-1)^n J_n(x), J_{-n}(x) = (-1)^n J_n(x).
  const bool flip = ((order < 0) != (x < 0.0)) && (n % 2 == 1);
  return flip ? -value : value;
}

EffectiveDrives derive_effective_drives(const BareDrives& bare, const LatticeParams& lattice) {
  lattice.validate();
  bare.validate();
  EffectiveDrives out;
  out.bessel_argument = lattice.bessel_argument();
  out.params.carrier = bare.carrier * lattice.overlap * std::abs(bessel_j(0, out.bessel_argument));
  out.params.sideband = bare.sideband * lattice.overlap * std::abs(bessel_j(-1, out.bessel_argument));
  return out;
}

double bessel_argument_for_ratio(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw InvalidArgument("Bessel ratio must be positive and finite");
  }
  // J_0/J_1 falls monotonically from +inf to 0 on (0, j_{0,1}).
  constexpr double lo = 1e-12;
  constexpr double hi = 2.404825557695773;
  auto f = [ratio](double x) { return bessel_j(0, x) - ratio * bessel_j(1, x); };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

StarkShift ac_stark_shift(const BareDrives& bare, const LatticeParams& lattice) {
  bare.validate();
  if (lattice.tilt == 0.0) throw InvalidArgument("AC Stark shift diverges at zero tilt");
  lattice.validate();
  const double x = lattice.bessel_argument();
  const double sb = bare.sideband * lattice.overlap * bessel_j(0, x);
  const double ca = bare.carrier * lattice.overlap * bessel_j(1, x);
  return StarkShift{ca * ca / (4.0 * lattice.tilt), -sb * sb / (4.0 * lattice.tilt)};
}

StarkShift ac_stark_shift_effective(double carrier, double sideband, double bessel_argument,
                                    double tilt) {
  if (tilt == 0.0) throw InvalidArgument("AC Stark shift diverges at zero tilt");
  const double j0 = bessel_j(0, bessel_argument);
  const double j1 = bessel_j(1, bessel_argument);
  if (j0 == 0.0 || j1 == 0.0) {
    throw InvalidArgument("Bessel argument sits on a zero of J_0 or J_1");
  }
  const double ca = carrier * j1 / j0;
  const double sb = sideband * j0 / j1;
  return StarkShift{ca * ca / (4.0 * tilt), -sb * sb / (4.0 * tilt)};
}

Eigen::MatrixXd ws_coupling_matrix(double tunneling, double tilt, int range) {
  if (range < 1) throw InvalidArgument("range must be >= 1");
  if (tilt == 0.0) throw InvalidArgument("Wannier-Stark states need a nonzero tilt");
  const double x = 2.0 * tunneling / tilt;
  const int n = 2 * range + 1;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = bessel_j(i - j, x);
  }
  return m;
}

cplx bessel_addition(int nu, double u, double alpha) {
  return bessel_j(nu, 2.0 * u * std::sin(0.5 * alpha)) * std::polar(1.0, 0.5 * nu * (kPi - alpha));
}

CounterRotatingHamiltonian::CounterRotatingHamiltonian(int sites, Tone tone, double resonant,
                                                       double off_resonant, double tilt)
    : sites_(sites), tone_(tone), resonant_(resonant), off_resonant_(off_resonant), tilt_(tilt) {
  require_sites(sites);
  if (!(tilt > 0.0)) throw InvalidArgument("counter-rotating model needs a positive tilt");
}

Hamiltonian CounterRotatingHamiltonian::resonant_part() const {
  Hamiltonian h(sites_, "rotating-gauge");
  for (int l = 0; l < sites_; ++l) {
    if (tone_ == Tone::carrier) {
      h.set_carrier(l, 0.5 * resonant_);
    } else if (l + 1 < sites_) {
      h.set_sideband(l, 0.5 * resonant_);
    }
  }
  return h;
}

Hamiltonian CounterRotatingHamiltonian::oscillating_part(double t) const {
  Hamiltonian h(sites_, "rotating-gauge");
  if (tone_ == Tone::sideband) {
    // Sideband laser sits Delta above the carrier transition.
    const cplx c = 0.5 * off_resonant_ * std::polar(1.0, -tilt_ * t);
    for (int l = 0; l < sites_; ++l) h.set_carrier(l, c);
  } else {
    // Carrier laser sits Delta below the (l,e)-(l+1,g) transition.
    const cplx c = 0.5 * off_resonant_ * std::polar(1.0, tilt_ * t);
    for (int l = 0; l + 1 < sites_; ++l) h.set_sideband(l, c);
  }
  return h;
}

Hamiltonian CounterRotatingHamiltonian::operator()(double t) const {
  Hamiltonian h = resonant_part();
  const Hamiltonian osc = oscillating_part(t);
  for (int l = 0; l < sites_; ++l) {
    if (tone_ == Tone::sideband) {
      h.set_carrier(l, osc.carrier(l));
    } else if (l + 1 < sites_) {
      h.set_sideband(l, osc.sideband(l));
    }
  }
  return h;
}

double CounterRotatingHamiltonian::stark_coefficient() const {
  const double x = off_resonant_ * off_resonant_ / (4.0 * tilt_);
  return tone_ == Tone::sideband ? -x : x;
}

Hamiltonian CounterRotatingHamiltonian::effective() const {
  Hamiltonian h = resonant_part();
  const double x = off_resonant_ * off_resonant_ / (4.0 * tilt_);
  for (int l = 0; l < sites_; ++l) {
    if (tone_ == Tone::sideband) {
      h.add_diagonal(basis_index(l, Level::excited), x);
      h.add_diagonal(basis_index(l, Level::ground), -x);
    } else {
      // Only bonded pairs shift; g_0 and e_{L-1} have no partner.
      if (l + 1 < sites_) h.add_diagonal(basis_index(l, Level::excited), -x);
      if (l > 0) h.add_diagonal(basis_index(l, Level::ground), x);
    }
  }
  return h;
}

double CounterRotatingHamiltonian::period() const { return kTwoPi / tilt_; }

CounterRotatingHamiltonian build_counterrotating_hamiltonian(const BareDrives& bare,
                                                             const LatticeParams& lattice,
                                                             Tone tone) {
  lattice.validate();
  bare.validate();
  const double x = lattice.bessel_argument();
  const double j0 = std::abs(bessel_j(0, x));
  const double j1 = std::abs(bessel_j(1, x));
  if (tone == Tone::carrier) {
    const double w = bare.carrier * lattice.overlap;
    return CounterRotatingHamiltonian(lattice.sites, tone, w * j0, w * j1, lattice.tilt);
  }
  const double w = bare.sideband * lattice.overlap;
  return CounterRotatingHamiltonian(lattice.sites, tone, w * j1, w * j0, lattice.tilt);
}

}  // namespace topoclock
