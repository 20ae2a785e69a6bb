#include "topoclock/noise.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "topoclock/csv.hpp"
#include "topoclock/error.hpp"
#include "topoclock/units.hpp"

namespace topoclock {

void NoiseSpec::validate() const {
  for (double s : {amplitude, phase, tilt}) {
    if (!std::isfinite(s) || s < 0.0) throw InvalidArgument("noise widths must be finite and >= 0");
  }
}

RMParameters NoiseRealization::apply(const RMParameters& nominal) const {
  RMParameters p = nominal;
  p.carrier = nominal.carrier * (1.0 + amplitude_carrier);
  p.sideband = nominal.sideband * (1.0 + amplitude_sideband);
  p.phase = nominal.phase + phase;
  p.tilt = nominal.tilt + tilt * nominal.sideband;
  return p;
}

NoiseRealization sample_realization(const NoiseSpec& spec, std::uint64_t index) {
  spec.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  // Always four draws so shared and per-tone modes see the same stream.
  const double z_carrier = normal(rng);
  const double z_sideband = normal(rng);
  const double z_phase = normal(rng);
  const double z_tilt = normal(rng);
  NoiseRealization r;
  r.amplitude_carrier = spec.amplitude * z_carrier;
  r.amplitude_sideband = spec.independent_tones ? spec.amplitude * z_sideband : r.amplitude_carrier;
  r.phase = spec.phase * kPi * z_phase;
  r.tilt = spec.tilt * z_tilt;
  return r;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

Interval median_and_interval(std::vector<double> samples) {
  if (samples.empty()) throw InvalidArgument("median of an empty sample");
  std::sort(samples.begin(), samples.end());
  Interval out;
  const std::size_t n = samples.size();
  out.median = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  out.low = quantile(samples, kIntervalLowQuantile);
  out.high = quantile(std::move(samples), kIntervalHighQuantile);
  return out;
}

std::vector<double> EnsembleResult::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("unknown ensemble column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (std::isfinite(r[c])) out.push_back(r[c]);
  }
  return out;
}

Interval EnsembleResult::summary(const std::string& name) const {
  return median_and_interval(column(name));
}

nlohmann::json EnsembleResult::to_json() const {
  nlohmann::json j;
  j["realizations"] = rows.size();
  j["seed"] = seed;
  j["interval_quantiles"] = {kIntervalLowQuantile, kIntervalHighQuantile};
  for (const auto& name : columns) {
    const auto values = column(name);
    if (values.empty()) {
      j["summary"][name] = nullptr;
      continue;
    }
    const Interval s = median_and_interval(values);
    j["summary"][name] = {{"median", s.median}, {"low", s.low}, {"high", s.high}, {"count", values.size()}};
  }
  j["failures"] = nlohmann::json::array();
  for (const auto& f : failures) j["failures"].push_back({{"index", f.index}, {"message", f.message}});
  return j;
}

std::string EnsembleResult::csv() const {
  std::vector<std::string> header{"index"};
  header.insert(header.end(), columns.begin(), columns.end());
  CsvTable t(header);
  t.add_comment("seed=" + std::to_string(seed));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> row{static_cast<double>(i)};
    row.insert(row.end(), rows[i].begin(), rows[i].end());
    t.add_row(row);
  }
  return t.str();
}

EnsembleResult ensemble_run(const Protocol& protocol, std::vector<std::string> columns,
                            const NoiseSpec& spec, std::size_t n, unsigned workers) {
  spec.validate();
  if (n < 2) throw InvalidArgument("an ensemble needs at least 2 realizations");
  EnsembleResult result;
  result.columns = std::move(columns);
  result.seed = spec.seed;
  const std::size_t width = result.columns.size();
  result.rows.assign(n, std::vector<double>(width, std::numeric_limits<double>::quiet_NaN()));

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        auto row = protocol(sample_realization(spec, i), i);
        if (row.size() != width) throw InvalidArgument("protocol returned a row of the wrong width");
        result.rows[i] = std::move(row);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        result.failures.push_back({i, e.what()});
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (count == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(work);
  }
  std::sort(result.failures.begin(), result.failures.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  return result;
}

namespace {

double central_difference(const SignalFunction& signal, std::size_t dim, std::size_t beta, double h) {
  std::vector<double> offsets(dim, 0.0);
  offsets[beta] = h;
  const double plus = signal(offsets);
  offsets[beta] = -h;
  const double minus = signal(offsets);
  return (plus - minus) / (2.0 * h);
}

}  // namespace

StatisticalNoise statistical_noise(const SignalFunction& signal, const std::vector<double>& sigmas,
                                   double relative_step) {
  StatisticalNoise out;
  const std::size_t dim = sigmas.size();
  for (std::size_t beta = 0; beta < dim; ++beta) {
    if (sigmas[beta] == 0.0) {
      out.derivatives.push_back(0.0);
      continue;
    }
    double h = relative_step;
    double d = central_difference(signal, dim, beta, h);
    if (!std::isfinite(d)) {
      h *= 10.0;
      d = central_difference(signal, dim, beta, h);
      out.warnings.push_back("parameter " + std::to_string(beta) +
                             ": non-finite derivative, retried with step " + std::to_string(h));
      if (!std::isfinite(d)) throw NumericalError("derivative stays non-finite after step fallback");
    }
    const double half = central_difference(signal, dim, beta, 0.5 * h);
    const double scale = std::max({std::abs(d), std::abs(half), 1e-12});
    if (std::abs(d - half) > 1e-3 * scale) {
      out.warnings.push_back("parameter " + std::to_string(beta) +
                             ": halved-step derivative differs by more than 1e-3 relative");
    }
    // Richardson extrapolation of the two central differences.
    const double refined = (4.0 * half - d) / 3.0;
    out.derivatives.push_back(refined);
    out.sigma2_per_pair += sigmas[beta] * sigmas[beta] * refined * refined;
  }
  return out;
}

double statistical_noise_sigma2(const SignalFunction& signal, const std::vector<double>& sigmas,
                                double atoms) {
  return statistical_noise(signal, sigmas).sigma2(atoms);
}

double clock_sensitivity(double signal_derivative, double sigma2, double atoms, double time) {
  if (signal_derivative == 0.0 || !std::isfinite(signal_derivative)) {
    throw InvalidArgument("clock sensitivity needs a nonzero signal slope");
  }
  if (!(time > 0.0)) throw InvalidArgument("interrogation time must be positive");
  return (atoms / 4.0 + sigma2) / (time * time * signal_derivative * signal_derivative);
}

}  // namespace topoclock
