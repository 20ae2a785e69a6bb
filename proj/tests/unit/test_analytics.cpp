#include <doctest.h>

#include <cmath>

#include "topoclock/analytics.hpp"
#include "topoclock/error.hpp"
#include "topoclock/units.hpp"

using namespace topoclock;

TEST_CASE("band data") {
  const auto d = band_data(1.0, 3.0, 512);
  REQUIRE(d.k.size() == 512);
  CHECK(d.k.back() == doctest::Approx(kPi));
  CHECK(d.k.front() > -kPi);
  for (std::size_t j = 0; j < d.k.size(); ++j) {
    CHECK(d.energy[j] == doctest::Approx(0.5 * std::sqrt(1.0 + 9.0 + 6.0 * std::cos(d.k[j]))));
    if (j > 0) CHECK(std::abs(d.phase[j] - d.phase[j - 1]) < 0.1);
  }
  // unwrapped phase winds once over the zone for r > 1
  CHECK(d.phase.back() - d.phase.front() == doctest::Approx(kTwoPi).epsilon(0.01));
  const auto csv = d.csv();
  CHECK(csv.rfind("k,E_k,phi_k,A_k\n", 0) == 0);
}

TEST_CASE("winding number quantization") {
  for (double r : {0.3, 0.5, 2.0, 3.0}) {
    const double raw = winding_number_raw(1.0, r, 10000);
    CHECK(std::abs(raw - (r > 1.0 ? 1.0 : 0.0)) < 1e-6);
    CHECK(winding_number(1.0, r) == (r > 1.0 ? 1 : 0));
  }
  CHECK(winding_number(1.0, 0.0) == 0);
  CHECK(winding_number(0.0, 1.0) == 1);
  CHECK(zak_phase(1.0, 3.0) == doctest::Approx(-kPi));
  CHECK(std::abs(zak_phase(1.0, 0.3)) < 1e-9);
  CHECK(winding_number(7.0, 21.0) == winding_number(1.0, 3.0));
  CHECK_THROWS_AS(winding_number(2.0, 2.0), CriticalPointError);
  CHECK_THROWS_AS(winding_number(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(winding_number(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("dimerized closed forms") {
  const double b = hz_to_angular(10.0);
  for (double t : {0.0, 0.01, 0.037, 0.1, 0.25}) {
    CHECK(std::abs(analytic_Iy(0.0, b, t) - 0.5 * std::sin(b * t)) < 1e-12);
    CHECK(std::abs(analytic_mean_displacement(0.0, b, t) - 0.5 * (1.0 - std::cos(b * t))) < 1e-12);
    CHECK(std::abs(linear_response_Ix(0.0, b, 0.01 * b, 0.0, t) - 0.01 * 0.5 * (1.0 - std::cos(b * t))) < 1e-12);
  }
  CHECK(analytic_Iy(1.0, 3.0, 0.0) == 0.0);
  CHECK(analytic_mean_displacement(1.0, 3.0, 0.0) == 0.0);
}

TEST_CASE("analytic current and displacement match brute-force evolution") {
  const double b = 1.0;
  for (double r : {0.3, 2.0, 3.0}) {
    for (double t : {1.0, 5.0, 20.0}) {
      const auto o = brute_force_observables({b / r, b, 0.0, 0.0, 0.0}, 128, t);
      CHECK(std::abs(analytic_Iy(b / r, b, t) - o.iy) < 1e-6);
      CHECK(std::abs(analytic_mean_displacement(b / r, b, t) - (64.0 - o.x)) < 1e-6);
    }
  }
}

TEST_CASE("displacement is the time integral of the current") {
  const double a = 1.0, b = 3.0, T = 4.0;
  const int n = 4000;
  double integral = 0.0;
  for (int j = 0; j < n; ++j) {
    // Simpson on each cell
    const double t0 = T * j / n, t1 = T * (j + 1) / n;
    integral += (t1 - t0) / 6.0 *
                (analytic_Iy(a, b, t0, 1024) + 4.0 * analytic_Iy(a, b, 0.5 * (t0 + t1), 1024) +
                 analytic_Iy(a, b, t1, 1024));
  }
  CHECK(std::abs(b * integral - analytic_mean_displacement(a, b, T, 1024)) < 1e-8);
}

TEST_CASE("long-time displacement averages to W/2") {
  for (auto [r, expected] : {std::pair{0.3, 0.0}, std::pair{3.0, 0.5}}) {
    double avg = 0.0;
    const int n = 400;
    for (int j = 0; j < n; ++j) avg += analytic_mean_displacement(1.0 / r, 1.0, 200.0 + 2.0 * j);
    CHECK(avg / n == doctest::Approx(expected).epsilon(0.02));
  }
}

TEST_CASE("detuning slope matches finite differences of evolution") {
  const double b = 1.0, a = b / 3.0, t = kPi / b;
  const double step = 1e-3 * b;
  const double plus = brute_force_observables({a, b, step, 0.0, 0.0}, 128, t).ix;
  const double minus = brute_force_observables({a, b, -step, 0.0, 0.0}, 128, t).ix;
  const double fd = b * (plus - minus) / (2.0 * step);
  CHECK(detuning_response(a, b, t) == doctest::Approx(fd).epsilon(0.01));
  CHECK(linear_response_Ix(a, b, 0.0, 0.0, t) == 0.0);
}

TEST_CASE("tilt response agrees with the S function") {
  const double b = 1.0;
  for (double r : {0.5, 2.0, 3.0}) {
    const double t = kPi / b;
    CHECK(tilt_response(b / r, b, t) == doctest::Approx(s_function(b / r, b, t)).epsilon(1e-4));
  }
  // dimerized: S = (1 - cos Omega_B t)/2 scaled, equals 1 at Omega_B t = pi
  CHECK(s_function(0.0, 1.0, kPi) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s_function(0.5, 1.0, 0.0) == 0.0);
}

TEST_CASE("Kubo response of the detuning reproduces the Bloch integral") {
  const double a = 1.0 / 3.0, b = 1.0, t = 7.0;
  const auto h = build_rm_hamiltonian({a, b, 0.0, 0.0, 0.0}, 128);
  const auto psi = localized_state(128, 64, Level::ground);
  const double kubo = b * kubo_response(h, psi, apply_ix, apply_half_population_difference, t, 64);
  CHECK(kubo == doctest::Approx(detuning_response(a, b, t)).epsilon(1e-6));
}
