#include "topoclock/state.hpp"

#include <cmath>
#include <utility>

#include "topoclock/csv.hpp"
#include "topoclock/error.hpp"

namespace topoclock {

QuantumState::QuantumState(int sites, Eigen::VectorXcd amplitudes)
    : sites_(sites), amplitudes_(std::move(amplitudes)) {
  if (sites < 2) throw InvalidArgument("state needs at least 2 sites");
  if (amplitudes_.size() != 2 * static_cast<Eigen::Index>(sites)) {
    throw InvalidArgument("amplitude vector length does not match 2L");
  }
  check_normalized();
}

QuantumState QuantumState::unchecked(int sites, Eigen::VectorXcd amplitudes) {
  QuantumState s;
  s.sites_ = sites;
  s.amplitudes_ = std::move(amplitudes);
  return s;
}

void QuantumState::check_normalized(double tolerance) const {
  const double n = amplitudes_.squaredNorm();
  if (!std::isfinite(n)) throw NumericalError("state has non-finite amplitudes");
  if (std::abs(n - 1.0) > tolerance) {
    throw NumericalError("state norm deviates from 1 by " + std::to_string(n - 1.0));
  }
}

QuantumState QuantumState::localized(int sites, int site, Level level) {
  if (sites < 2) throw InvalidArgument("state needs at least 2 sites");
  if (site < 0 || site >= sites) {
    throw InvalidArgument("site " + std::to_string(site) + " outside [0, " +
                          std::to_string(sites) + ")");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * static_cast<Eigen::Index>(sites));
  v[basis_index(site, level)] = 1.0;
  return unchecked(sites, std::move(v));
}

QuantumState localized_state(int sites, int site, Level level) {
  return QuantumState::localized(sites, site, level);
}

std::string ObservableSet::csv_header() { return "t,S_z,I_x,I_y,S_y,n_e,n_g,x,d_eg"; }

std::string ObservableSet::csv_row() const {
  std::string row;
  for (double v : {time, sz, ix, iy, sy, ne, ng, x}) {
    row += format_double(v);
    row += ',';
  }
  row += deg ? format_double(*deg) : std::string("nan");
  return row;
}

ObservableSet measure(const QuantumState& state, double time) {
  const auto& c = state.amplitudes();
  const int sites = state.sites();
  ObservableSet o;
  o.time = time;
  double xe = 0.0;
  double xg = 0.0;
  for (int l = 0; l < sites; ++l) {
    const cplx g = c[basis_index(l, Level::ground)];
    const cplx e = c[basis_index(l, Level::excited)];
    const double pg = std::norm(g);
    const double pe = std::norm(e);
    o.ng += pg;
    o.ne += pe;
    xg += l * pg;
    xe += l * pe;
    o.sy += std::imag(std::conj(e) * g);
    if (l + 1 < sites) {
      const cplx bond = std::conj(e) * c[basis_index(l + 1, Level::ground)];
      o.ix += bond.real();
      o.iy += bond.imag();
    }
  }
  o.sz = 0.5 * (o.ne - o.ng);
  o.x = xg + xe;
  if (o.ne >= kSeparationPopulationFloor && o.ng >= kSeparationPopulationFloor) {
    o.deg = xe / o.ne - xg / o.ng;
  }
  return o;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.sites() != b.sites()) throw InvalidArgument("fidelity: lattice sizes differ");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

cplx carrier_coherence(const QuantumState& state) {
  cplx sum{};
  const auto& c = state.amplitudes();
  for (int l = 0; l < state.sites(); ++l) {
    sum += std::conj(c[basis_index(l, Level::ground)]) * c[basis_index(l, Level::excited)];
  }
  return sum;
}

double edge_population(const Eigen::VectorXcd& amplitudes) {
  const Eigen::Index n = amplitudes.size();
  return std::norm(amplitudes[0]) + std::norm(amplitudes[1]) + std::norm(amplitudes[n - 2]) +
         std::norm(amplitudes[n - 1]);
}

double edge_population(const QuantumState& state) { return edge_population(state.amplitudes()); }

}  // namespace topoclock
