#include <doctest.h>

#include <cmath>

#include "topoclock/error.hpp"
#include "topoclock/interferometer.hpp"
#include "topoclock/units.hpp"

using namespace topoclock;

namespace {

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("protocol timing and ideal phases") {
  const auto p0 = MPPSpec::p0();
  CHECK(p0.drive_time() == doctest::Approx(1.0));
  CHECK(p0.total_time() == doctest::Approx(4.0));
  CHECK(ideal_phase_mpp(p0, 1.0) == doctest::Approx(96.0));
  CHECK(ideal_phase_mpp(p0, 0.0) == 0.0);
  CHECK(MPPSpec::p1().drive_time() == doctest::Approx(0.375));
  CHECK(ideal_phase_mpp(MPPSpec::p1(), 1.0) == doctest::Approx(97.5));
  CHECK(ideal_phase_mpp(MPPSpec::p2(), 1.0) == doctest::Approx(97.5));

  const auto t12 = TPPSpec::tau12();
  CHECK(t12.total_time() == doctest::Approx(4.0));
  CHECK(ideal_phase_tpp(t12, 1.0) == doctest::Approx(96.0));
  CHECK(ideal_phase_tpp(t12, 0.0) == 0.0);
  CHECK(discrete_phase_tpp(t12, 1.0) / ideal_phase_tpp(t12, 1.0) == doctest::Approx(25.0 / 24.0));

  MPPSpec bad = p0;
  bad.pulses = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  TPPSpec worse = t12;
  worse.cycle_time = -1.0;
  CHECK_THROWS_AS(worse.validate(), InvalidArgument);
}

TEST_CASE("pump loop geometry") {
  const auto loop = PumpLoop::standard();
  CHECK(loop.encloses_critical_point());
  const auto a = loop.at(0.0);
  const auto b = loop.at(1.0);
  CHECK(a.carrier == doctest::Approx(b.carrier));
  CHECK(a.sideband == doctest::Approx(b.sideband));
  CHECK(a.detuning == doctest::Approx(b.detuning));
  for (double s : {0.1, 0.3, 0.6, 0.9}) {
    const auto p = loop.at(s);
    CHECK(p.carrier * p.sideband == 0.0);
    CHECK(p.tilt == 0.0);
  }
  CHECK(loop.at(0.25).sideband > 0.0);
  CHECK(loop.at(0.75).carrier > 0.0);
  PumpLoop outside = loop;
  outside.detuning_offset = 2.0 * loop.detuning_amplitude;
  CHECK(!outside.encloses_critical_point());

  PumpLoop circle;
  circle.shape = PumpShape::constant_sum;
  circle.coupling_amplitude = circle.detuning_amplitude = hz_to_angular(10.0);
  circle.coupling_sum = hz_to_angular(20.0);
  for (double s : {0.0, 0.2, 0.7}) {
    const auto p = circle.at(s);
    CHECK(p.carrier + p.sideband == doctest::Approx(circle.coupling_sum));
  }
  CHECK(circle.at(0.25).detuning == doctest::Approx(hz_to_angular(10.0)));
}

TEST_CASE("light-shift residual") {
  const auto stark = StarkModel::standard();
  CHECK(stark.coefficient(Tone::sideband, 10.0) < 0.0);
  CHECK(stark.coefficient(Tone::carrier, 10.0) > 0.0);
  CHECK(stark.residual_detuning(Tone::carrier, 10.0, 0.0) == 0.0);
  CHECK(stark.residual_detuning(Tone::carrier, 10.0, 0.02) ==
        doctest::Approx(2.0 * stark.coefficient(Tone::carrier, 10.0) * (1.02 * 1.02 - 1.0)));
  StarkModel off = stark;
  off.enabled = false;
  CHECK(off.residual_detuning(Tone::sideband, 10.0, 0.05) == 0.0);
}

TEST_CASE("many-pulse protocol, noise free") {
  const auto spec = MPPSpec::p0();
  const auto run = run_mpp(spec, 0.0);
  CHECK(run.sites == 109);
  CHECK(1.0 - run.fidelity < 1e-8);
  CHECK(std::abs(run.phase) < 1e-10);
  CHECK(run.max_separation <= 2.0 * spec.pulses + 1e-6);
  CHECK(run.max_separation == doctest::Approx(48.0));
  int forward = 0;
  for (const auto& s : run.trace) {
    if (s.stage == "forward") {
      ++forward;
      CHECK(s.separation == doctest::Approx(2.0 * s.step));
    }
  }
  CHECK(forward == spec.pulses);
  // readout sits at the steepest point, S_z = sin(phi)/2
  CHECK(std::abs(run.sz) < 1e-10);
  const auto tilted = run_mpp(spec, 0.01);
  CHECK(tilted.sz == doctest::Approx(0.5 * std::sin(tilted.phase)).epsilon(1e-9));
  CHECK(tilted.sy == doctest::Approx(tilted.sz).epsilon(1e-9));

  MPPSpec finite = spec;
  finite.mode = PulseMode::finite;
  CHECK(1.0 - run_mpp(finite, 0.0).fidelity < 1e-4);
}

TEST_CASE("many-pulse phase follows the ideal formula") {
  const auto spec = MPPSpec::p0();
  std::vector<double> tilts, wrapped;
  for (int j = 1; j <= 20; ++j) {
    tilts.push_back(0.005 * j);
    wrapped.push_back(run_mpp(spec, 0.005 * j).phase);
  }
  const auto phase = unwrap_phase_ladder(wrapped);
  CHECK(fitted_slope(tilts, phase) == doctest::Approx(ideal_phase_mpp(spec, 1.0)).epsilon(0.02));
  CHECK(phase.back() == doctest::Approx(ideal_phase_mpp(spec, 0.1)).epsilon(0.02));
}

TEST_CASE("Thouless pumping protocol, noise free") {
  const auto spec = TPPSpec::tau5();
  const auto run = run_tpp(spec, 0.0);
  CHECK(run.warnings.empty());
  CHECK(1.0 - run.fidelity < 1e-8);
  CHECK(run.max_separation <= 2.0 * spec.cycles + 1e-6);
  for (const auto& s : run.trace) {
    if (s.stage == "forward") CHECK(s.separation == doctest::Approx(2.0 * s.step).epsilon(0.01));
  }
  CHECK(pump_transport(spec, Level::excited, 2, 24) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(pump_transport(spec, Level::ground, 2, 24) == doctest::Approx(-1.0).epsilon(0.01));

  TPPSpec outside = spec;
  outside.loop.detuning_offset = 2.0 * outside.loop.detuning_amplitude;
  const auto still = run_tpp(outside, 0.0);
  for (const auto& s : still.trace) {
    if (s.stage == "forward" && std::isfinite(s.separation)) CHECK(s.separation < 0.05 * s.step);
  }
}

TEST_CASE("phase ladder unwrapping") {
  std::vector<double> truth, wrapped;
  for (int j = 0; j < 40; ++j) {
    truth.push_back(0.7 * j);
    wrapped.push_back(std::remainder(0.7 * j, kTwoPi));
  }
  const auto out = unwrap_phase_ladder(wrapped);
  for (std::size_t j = 0; j < out.size(); ++j) CHECK(out[j] == doctest::Approx(truth[j]));
}

TEST_CASE("recovery fidelity under amplitude noise") {
  const NoiseSpec none{};
  const auto clean = recovery_fidelity_experiment(
      [](const NoiseRealization& r) { return run_mpp(MPPSpec::p0(), 0.0, r); }, none, 4);
  for (double f : clean.fidelity) CHECK(1.0 - f < 1e-8);

  const NoiseSpec noisy{0.02, 0.0, 0.0, false, 5};
  const auto mpp = recovery_fidelity_experiment(
      [](const NoiseRealization& r) { return run_mpp(MPPSpec::p0(), 0.0, r); }, noisy, 8, 4);
  CHECK(mpp.summary.median < 1.0 - 1e-6);
  CHECK(mpp.summary.low <= mpp.summary.median);
  // separation shrinks under pulse-area errors
  std::vector<double> ratio;
  for (std::uint64_t i = 0; i < 8; ++i) {
    const auto run = run_mpp(MPPSpec::p0(), 0.0, sample_realization(noisy, i));
    ratio.push_back(run.max_separation / 48.0);
  }
  CHECK(median_and_interval(ratio).median < 1.0);
}
