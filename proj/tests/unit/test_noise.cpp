#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "topoclock/error.hpp"
#include "topoclock/noise.hpp"
#include "topoclock/units.hpp"

using namespace topoclock;

TEST_CASE("zero widths give zero draws") {
  const NoiseSpec spec{};
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto r = sample_realization(spec, i);
    CHECK(r.amplitude_carrier == 0.0);
    CHECK(r.amplitude_sideband == 0.0);
    CHECK(r.phase == 0.0);
    CHECK(r.tilt == 0.0);
  }
  CHECK_THROWS_AS(sample_realization(NoiseSpec{-0.1, 0.0, 0.0, false, 1}, 0), InvalidArgument);
}

TEST_CASE("draws are deterministic in seed and index") {
  const NoiseSpec spec{0.01, 0.005, 0.001, false, 42};
  const auto a = sample_realization(spec, 17);
  const auto b = sample_realization(spec, 17);
  CHECK(a.amplitude_carrier == b.amplitude_carrier);
  CHECK(a.phase == b.phase);
  CHECK(a.tilt == b.tilt);
  CHECK(a.amplitude_carrier == a.amplitude_sideband);
  CHECK(sample_realization(spec, 18).amplitude_carrier != a.amplitude_carrier);
  NoiseSpec other = spec;
  other.seed = 43;
  CHECK(sample_realization(other, 17).amplitude_carrier != a.amplitude_carrier);
  other = spec;
  other.independent_tones = true;
  const auto c = sample_realization(other, 17);
  CHECK(c.amplitude_carrier == a.amplitude_carrier);
  CHECK(c.amplitude_sideband != c.amplitude_carrier);
  CHECK(c.phase == a.phase);
}

TEST_CASE("sample moments") {
  const NoiseSpec spec{0.02, 0.01, 0.003, true, 7};
  const int n = 100000;
  double sa = 0, sp = 0, st = 0, sa2 = 0, sp2 = 0;
  for (int i = 0; i < n; ++i) {
    const auto r = sample_realization(spec, static_cast<std::uint64_t>(i));
    sa += r.amplitude_sideband;
    sp += r.phase;
    st += r.tilt;
    sa2 += r.amplitude_sideband * r.amplitude_sideband;
    sp2 += r.phase * r.phase;
  }
  CHECK(std::abs(sa / n) < 5 * 0.02 / std::sqrt(n));
  CHECK(std::abs(sp / n) < 5 * 0.01 * kPi / std::sqrt(n));
  CHECK(std::abs(st / n) < 5 * 0.003 / std::sqrt(n));
  CHECK(std::sqrt(sa2 / n) == doctest::Approx(0.02).epsilon(0.02));
  CHECK(std::sqrt(sp2 / n) == doctest::Approx(0.01 * kPi).epsilon(0.02));
}

TEST_CASE("realization applies to drive parameters") {
  NoiseRealization r;
  r.amplitude_carrier = 0.1;
  r.amplitude_sideband = -0.2;
  r.phase = 0.3;
  r.tilt = 0.01;
  const auto p = r.apply({2.0, 4.0, 0.5, 0.1, 0.0});
  CHECK(p.carrier == doctest::Approx(2.2));
  CHECK(p.sideband == doctest::Approx(3.2));
  CHECK(p.phase == doctest::Approx(0.3));
  CHECK(p.tilt == doctest::Approx(0.1 + 0.04));
  CHECK(p.detuning == 0.5);
}

TEST_CASE("median and interval") {
  CHECK(median_and_interval({1, 2, 3, 4, 5}).median == 3.0);
  CHECK(median_and_interval({4, 1, 3, 2}).median == 2.5);
  CHECK_THROWS_AS(median_and_interval({}), InvalidArgument);
  const auto c = median_and_interval(std::vector<double>(10, 3.0));
  CHECK(c.width() == 0.0);

  std::vector<double> sym;
  for (int i = -50; i <= 50; ++i) sym.push_back(i * 0.1);
  const auto s = median_and_interval(sym);
  CHECK(s.median == doctest::Approx(0.0));
  CHECK(s.high - s.median == doctest::Approx(s.median - s.low));
  CHECK(quantile({0.0, 10.0}, 0.25) == doctest::Approx(2.5));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  std::vector<double> draws(100000);
  for (auto& d : draws) d = z(rng);
  const auto g = median_and_interval(draws);
  // 97.8% normal quantile 2.014090812
  CHECK(g.low == doctest::Approx(-2.0141).epsilon(0.025));
  CHECK(g.high == doctest::Approx(2.0141).epsilon(0.025));
}

TEST_CASE("interval coverage on fresh Gaussian data") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z;
  std::vector<double> calib(100000);
  for (auto& d : calib) d = z(rng);
  const auto iv = median_and_interval(calib);
  int inside = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = z(rng);
    if (v >= iv.low && v <= iv.high) ++inside;
  }
  CHECK(static_cast<double>(inside) / n == doctest::Approx(0.956).epsilon(0.005 / 0.956));
}

TEST_CASE("ensemble runs are indexed and independent of worker count") {
  const NoiseSpec spec{0.01, 0.005, 0.001, false, 99};
  const Protocol protocol = [](const NoiseRealization& r, std::size_t i) {
    if (i == 3) throw NumericalError("boom");
    return std::vector<double>{r.amplitude_carrier, r.phase + static_cast<double>(i)};
  };
  const auto one = ensemble_run(protocol, {"a", "b"}, spec, 64, 1);
  const auto many = ensemble_run(protocol, {"a", "b"}, spec, 64, 8);
  CHECK(one.csv() == many.csv());
  CHECK(one.to_json().dump() == many.to_json().dump());
  REQUIRE(one.failures.size() == 1);
  CHECK(one.failures[0].index == 3);
  CHECK(std::isnan(one.rows[3][0]));
  CHECK(one.column("a").size() == 63);
  CHECK(one.rows[5][0] == sample_realization(spec, 5).amplitude_carrier);
  CHECK_THROWS_AS(one.column("zz"), InvalidArgument);
  CHECK_THROWS_AS(ensemble_run(protocol, {"a", "b"}, spec, 1), InvalidArgument);

  const auto flat = ensemble_run([](const NoiseRealization&, std::size_t) { return std::vector<double>{1.5}; },
                                 {"c"}, spec, 10);
  CHECK(flat.summary("c").width() == 0.0);
  CHECK(flat.to_json()["summary"]["c"]["median"] == 1.5);
}

TEST_CASE("statistical noise") {
  const SignalFunction linear = [](const std::vector<double>& e) { return 0.3 * e[0] - 0.2 * e[1]; };
  auto s = statistical_noise(linear, {0.01, 0.02});
  CHECK(s.derivatives[0] == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(s.derivatives[1] == doctest::Approx(-0.2).epsilon(1e-8));
  CHECK(s.sigma2_per_pair == doctest::Approx(1e-4 * 0.09 + 4e-4 * 0.04));
  CHECK(s.sigma2(100) / s.sigma2(10) == doctest::Approx(110.0));
  CHECK(s.warnings.empty());
  CHECK(statistical_noise_sigma2(linear, {0.0, 0.0}, 100) == 0.0);

  const SignalFunction cubic = [](const std::vector<double>& e) { return std::sin(3.0 * e[0]); };
  s = statistical_noise(cubic, {0.1});
  CHECK(s.derivatives[0] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("statistical noise matches the excess variance of a binomial atom ensemble") {
  // p_e(eps) = 1/2 + d eps per atom, eps shared by all N atoms of a shot
  const double d = 0.5, sigma = 0.1;
  const SignalFunction single = [&](const std::vector<double>& e) { return d * e[0]; };
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  for (int atoms : {10, 100}) {
    const int shots = 10000;
    std::vector<double> o(shots);
    for (auto& v : o) {
      const double p = std::clamp(0.5 + d * sigma * z(rng), 0.0, 1.0);
      std::binomial_distribution<int> count(atoms, p);
      v = count(rng) - 0.5 * atoms;
    }
    const double mean = std::accumulate(o.begin(), o.end(), 0.0) / shots;
    double var = 0.0;
    for (double v : o) var += (v - mean) * (v - mean);
    var /= shots - 1;
    const double excess = var - atoms / 4.0;
    CHECK(excess == doctest::Approx(statistical_noise_sigma2(single, {sigma}, atoms)).epsilon(0.1));
  }
}

TEST_CASE("clock sensitivity") {
  CHECK(clock_sensitivity(0.5, 0.0, 1, 1.0) == doctest::Approx(1.0));
  CHECK(clock_sensitivity(0.5, 0.0, 1, 2.0) == doctest::Approx(0.25));
  CHECK(clock_sensitivity(0.5, 3.0, 4, 1.0) == doctest::Approx(16.0));
  CHECK_THROWS_AS(clock_sensitivity(0.0, 0.0, 1, 1.0), InvalidArgument);
}
