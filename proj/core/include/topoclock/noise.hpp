#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topoclock/model.hpp"

namespace topoclock {

struct NoiseSpec {
  double amplitude = 0.0;  // sigma_a, relative
  double phase = 0.0;      // sigma_phi; epsilon_phi has standard deviation sigma_phi * pi
  double tilt = 0.0;       // sigma_t, in units of Omega_B
  bool independent_tones = false;
  std::uint64_t seed = 0;

  void validate() const;
  bool enabled() const { return amplitude > 0.0 || phase > 0.0 || tilt > 0.0; }
};

struct NoiseRealization {
  double amplitude_carrier = 0.0;
  double amplitude_sideband = 0.0;
  double phase = 0.0;
  double tilt = 0.0;

  double amplitude(Tone tone) const {
    return tone == Tone::carrier ? amplitude_carrier : amplitude_sideband;
  }
  // Omega -> Omega_bar e^{i eps_phi}(1 + eps_a), delta_t -> delta_t + eps_t Omega_B
  RMParameters apply(const RMParameters& nominal) const;
};

// Deterministic in (seed, index), independent of call order.
NoiseRealization sample_realization(const NoiseSpec& spec, std::uint64_t index);

inline constexpr double kIntervalLowQuantile = 0.022;
inline constexpr double kIntervalHighQuantile = 0.978;

struct Interval {
  double median = 0.0;
  double low = 0.0;
  double high = 0.0;
  double width() const { return high - low; }
};

// Linear interpolation between order statistics at position q (n - 1).
double quantile(std::vector<double> samples, double q);
Interval median_and_interval(std::vector<double> samples);

struct EnsembleFailure {
  std::size_t index = 0;
  std::string message;
};

struct EnsembleResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN-filled for failed realizations
  std::vector<EnsembleFailure> failures;
  std::uint64_t seed = 0;

  std::size_t count() const { return rows.size(); }
  std::vector<double> column(const std::string& name) const;  // successful rows only
  Interval summary(const std::string& name) const;
  nlohmann::json to_json() const;
  std::string csv() const;
};

using Protocol = std::function<std::vector<double>(const NoiseRealization&, std::size_t index)>;

// Runs n realizations over a worker pool; rows are stored by index.
EnsembleResult ensemble_run(const Protocol& protocol, std::vector<std::string> columns,
                            const NoiseSpec& spec, std::size_t n, unsigned workers = 1);

// Signal as a function of relative parameter offsets eps_beta.
using SignalFunction = std::function<double(const std::vector<double>& offsets)>;

struct StatisticalNoise {
  double sigma2_per_pair = 0.0;  // sum_beta sigma_beta^2 (d<o>/d eps_beta)^2
  std::vector<double> derivatives;
  std::vector<std::string> warnings;

  double sigma2(double atoms) const { return atoms * (atoms - 1.0) * sigma2_per_pair; }
};

// Central differences with step 1e-4 and a halved-step Richardson check;
// sigmas are the relative widths of each parameter.
StatisticalNoise statistical_noise(const SignalFunction& signal, const std::vector<double>& sigmas,
                                   double relative_step = 1e-4);

double statistical_noise_sigma2(const SignalFunction& signal, const std::vector<double>& sigmas,
                                double atoms);

// (N/4 + sigma_s^2) / (t_L^2 (d<O>/d phi)^2)
double clock_sensitivity(double signal_derivative, double sigma2, double atoms, double time);

}  // namespace topoclock
