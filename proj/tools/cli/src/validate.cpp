#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <ostream>

#include "topoclock/analytics.hpp"
#include "topoclock/cli/run.hpp"
#include "topoclock/csv.hpp"
#include "topoclock/evolve.hpp"
#include "topoclock/interferometer.hpp"
#include "topoclock/noise.hpp"
#include "topoclock/spectroscopy.hpp"
#include "topoclock/units.hpp"

namespace topoclock::cli {

namespace {

struct Check {
  std::string name;
  double tolerance;
  std::function<double()> error;  // measured deviation; pass when below tolerance
};

std::vector<Check> checks() {
  const double b = hz_to_angular(10.0);
  const double t = kPi / b;
  return {
      {"winding quantization r=3", 1e-6, [] { return std::abs(winding_number_raw(1.0, 3.0) - 1.0); }},
      {"winding quantization r=0.3", 1e-6, [] { return std::abs(winding_number_raw(1.0, 0.3)); }},
      {"dimerized I_y analytic vs evolution", 1e-10,
       [b] {
         double worst = 0.0;
         for (double s : {0.01, 0.04, 0.09}) {
           const auto o = brute_force_observables({0.0, b, 0.0, 0.0, 0.0}, 16, s);
           worst = std::max(worst, std::abs(o.iy - analytic_Iy(0.0, b, s)));
         }
         return worst;
       }},
      {"mean displacement analytic vs evolution r=3", 1e-6,
       [b] {
         const auto o = brute_force_observables({b / 3, b, 0.0, 0.0, 0.0}, 96, 0.3);
         return std::abs(48.0 - o.x - analytic_mean_displacement(b / 3, b, 0.3));
       }},
      {"Kubo vs Bloch detuning response", 1e-6,
       [b, t] {
         const auto h = build_rm_hamiltonian({b / 3, b, 0.0, 0.0, 0.0}, 64);
         const auto psi = localized_state(64, 32, Level::ground);
         const double kubo = b * kubo_response(h, psi, apply_ix, apply_half_population_difference, t, 64);
         const double bloch = detuning_response(b / 3, b, t);
         return std::abs(kubo - bloch) / std::abs(bloch);
       }},
      {"one-step slope vs finite difference", 1e-2,
       [b, t] {
         const double h = 1e-4 * b;
         const double fd = (run_one_step_protocol({b / 3, b, h, 0.0, 0.0}, 64, t) -
                            run_one_step_protocol({b / 3, b, -h, 0.0, 0.0}, 64, t)) /
                           2e-4;
         return std::abs(fd / detuning_response(b / 3, b, t) - 1.0);
       }},
      {"alternative readout vs one-step", 1e-6,
       [b, t] {
         const RMParameters p{b / 2, b, 0.03 * b, -0.02 * b, 0.0};
         return std::abs(run_alternative_ssh(p, 64, t) - run_one_step_protocol(p, 64, t));
       }},
      {"forward+reverse schedule fidelity deficit", 1e-8,
       [b] {
         const auto sched = Schedule::from_parameters(
             [b](double s) { return RMParameters{b * (0.5 + 0.2 * std::sin(7.0 * s)), b, 0.1 * b, 0.01 * b, 0.0}; },
             32, 0.0, 0.2, 1e-4);
         const auto psi = localized_state(32, 16, Level::ground);
         const auto fwd = evolve_schedule(sched, psi);
         return std::abs(1.0 - fidelity(evolve_schedule(sched.reversed(), fwd), psi));
       }},
      {"pump transport per cycle", 1e-2,
       [] { return std::abs(pump_transport(TPPSpec::tau5(), Level::excited, 2, 24) - 1.0); }},
      {"MPP noise-free recovery deficit", 1e-8, [] { return 1.0 - run_mpp(MPPSpec::p0(), 0.0).fidelity; }},
      {"MPP phase vs ideal (relative)", 2e-2,
       [] {
         const double tilt = 0.02;
         const double phase = run_mpp(MPPSpec::p0(), tilt).phase;
         return std::abs(phase / ideal_phase_mpp(MPPSpec::p0(), tilt) - 1.0);
       }},
      {"ensemble independent of worker count", 0.5,
       [] {
         const NoiseSpec spec{0.01, 0.005, 0.001, false, 11};
         const Protocol p = [](const NoiseRealization& r, std::size_t) {
           return std::vector<double>{r.amplitude_carrier, r.tilt};
         };
         return ensemble_run(p, {"a", "t"}, spec, 32, 1).csv() == ensemble_run(p, {"a", "t"}, spec, 32, 4).csv()
                    ? 0.0
                    : 1.0;
       }},
  };
}

}  // namespace

bool run_validate(const RunConfig&, Artifacts& out, std::ostream& log) {
  CsvTable table({"check", "deviation", "tolerance", "pass"});
  bool all = true;
  log << std::left << std::setw(46) << "check" << std::setw(14) << "deviation" << std::setw(12) << "tolerance"
      << "result\n";
  for (const auto& c : checks()) {
    double dev = std::nan("");
    std::string note;
    try {
      dev = c.error();
    } catch (const std::exception& e) {
      note = e.what();
    }
    const bool ok = std::isfinite(dev) && dev < c.tolerance;
    all = all && ok;
    char cell[64];
    std::snprintf(cell, sizeof cell, "%-14.3e%-12.0e", dev, c.tolerance);
    log << std::left << std::setw(46) << c.name << cell << (ok ? "PASS" : "FAIL") << (note.empty() ? "" : "  " + note) << "\n";
    table.add_raw_row("\"" + c.name + "\"," + format_double(dev) + "," + format_double(c.tolerance) + "," +
                      (ok ? "1" : "0"));
  }
  out.write_text("validate.csv", table.str());
  return all;
}

}  // namespace topoclock::cli
