#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "topoclock/model.hpp"

namespace topoclock {

class QuantumState {
 public:
  // Checks normalization to 1e-9.
  QuantumState(int sites, Eigen::VectorXcd amplitudes);

  static QuantumState localized(int sites, int site, Level level);
  // Skips the normalization check; for propagators that preserve the norm.
  static QuantumState unchecked(int sites, Eigen::VectorXcd amplitudes);

  int sites() const noexcept { return sites_; }
  Eigen::Index dimension() const noexcept { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  cplx amplitude(int site, Level level) const { return amplitudes_[basis_index(site, level)]; }
  double norm() const { return amplitudes_.norm(); }
  void check_normalized(double tolerance = 1e-9) const;

 private:
  QuantumState() = default;
  int sites_ = 0;
  Eigen::VectorXcd amplitudes_;
};

QuantumState localized_state(int sites, int site, Level level);

struct ObservableSet {
  double time = 0.0;
  double sz = 0.0;
  double ix = 0.0;
  double iy = 0.0;
  double sy = 0.0;
  double ne = 0.0;
  double ng = 0.0;
  double x = 0.0;
  std::optional<double> deg;  // undefined when either level is nearly empty

  static std::string csv_header();
  std::string csv_row() const;
};

inline constexpr double kSeparationPopulationFloor = 1e-6;

ObservableSet measure(const QuantumState& state, double time = 0.0);

// |<a|b>|^2
double fidelity(const QuantumState& a, const QuantumState& b);
// sum_l conj(c_{l,g}) c_{l,e}
cplx carrier_coherence(const QuantumState& state);
// Population on sites 0 and L-1.
double edge_population(const Eigen::VectorXcd& amplitudes);
double edge_population(const QuantumState& state);

}  // namespace topoclock
