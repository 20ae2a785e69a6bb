#include <chrono>
#include <functional>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>

#include "topoclock/analytics.hpp"
#include "topoclock/cli/run.hpp"
#include "topoclock/csv.hpp"
#include "topoclock/error.hpp"
#include "topoclock/interferometer.hpp"
#include "topoclock/noise.hpp"
#include "topoclock/spectroscopy.hpp"
#include "topoclock/units.hpp"

namespace topoclock::cli {

using json = nlohmann::json;

void Artifacts::write_text(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw Error("write failed for " + path.string());
  files_.push_back(name);
}

void Artifacts::write_json(const std::string& name, const json& content) {
  write_text(name, content.dump(2) + "\n");
}

namespace {

// Parameter echo with every *_hz key repeated in rad/s.
json parameters_with_units(const RunConfig& cfg) {
  json out = cfg.echo();
  for (const auto& [k, v] : cfg.params.items()) {
    if (k.size() > 3 && k.compare(k.size() - 3, 3, "_hz") == 0) {
      out[k.substr(0, k.size() - 3) + "_rad_s"] = hz_to_angular(v.get<double>());
    }
  }
  return out;
}

json interval_json(const Interval& i) {
  return {{"median", i.median}, {"low", i.low}, {"high", i.high}, {"width", i.width()}};
}

std::string tag(double r) { return format_double(r); }

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

Fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, syy > 0 ? sxy * sxy / (sxx * syy) : 1.0};
}

}  // namespace

void run_winding(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
  const double a = cfg.hz("winding.carrier_hz");
  const int points = cfg.integer("winding.points");
  CsvTable table({"r", "winding_raw", "winding", "zak_phase"});
  table.add_comment("winding number of the SSH chain, Omega_B = r Omega_A");
  table.add_comment("carrier_hz=" + format_double(cfg.number("winding.carrier_hz")) +
                    " points=" + std::to_string(points));
  json rows = json::array();
  for (double r : cfg.numbers("winding.ratios")) {
    double raw = std::nan(""), w = std::nan(""), zak = std::nan("");
    try {
      raw = winding_number_raw(a, r * a, points);
      w = winding_number(a, r * a, points);
      zak = zak_phase(a, r * a, points);
    } catch (const CriticalPointError&) {
      log << "winding: r = " << r << " sits on the critical point, W undefined\n";
    }
    table.add_row({r, raw, w, zak});
    const auto or_null = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    rows.push_back({{"r", r}, {"winding_raw", or_null(raw)}, {"winding", or_null(w)}, {"zak_phase", or_null(zak)}});
    out.write_text("band_r" + tag(r) + ".csv", band_data(a, r * a, cfg.integer("winding.band_points")).csv());
  }
  out.write_text("winding.csv", table.str());
  out.write_json("winding.json", {{"parameters", parameters_with_units(cfg)}, {"results", rows}});
}

void run_md_scan(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
  const double b = cfg.hz("md.sideband_hz");
  const int sites = cfg.integer("md.sites");
  const double t_max = cfg.number("md.max_phase") * kPi / b;
  const double t_plateau = cfg.number("md.plateau_start") * kPi / b;
  if (t_plateau >= t_max) throw InvalidArgument("md.plateau_start must be below md.max_phase");
  MdOptions options;
  options.samples_per_period = cfg.integer("md.samples_per_period");
  options.edge_guard = cfg.flag("md.edge_guard");

  CsvTable summary({"r", "winding", "plateau", "max_edge_population"});
  summary.add_comment("time-averaged mean displacement over Omega_B T / pi in [" +
                      format_double(cfg.number("md.plateau_start")) + ", " +
                      format_double(cfg.number("md.max_phase")) + "]");
  json rows = json::array();
  for (double r : cfg.numbers("md.ratios")) {
    const double a = b / r;
    const auto tr = run_md_protocol({a, b, 0.0, 0.0, 0.0}, sites, t_max, options);
    CsvTable trace({"t_s", "omega_b_t_over_pi", "iy", "x", "x_direct", "x_analytic"});
    trace.add_comment("r=" + tag(r) + " sideband_hz=" + format_double(cfg.number("md.sideband_hz")) +
                      " sites=" + std::to_string(sites));
    for (std::size_t k = 0; k < tr.time.size(); ++k) {
      const double t = tr.time[k];
      trace.add_row({t, b * t / kPi, tr.iy[k], tr.x[k], tr.x_direct[k], analytic_mean_displacement(a, b, t, 1024)});
    }
    out.write_text("md_r" + tag(r) + ".csv", trace.str());
    const double plateau = plateau_average(tr, t_plateau, t_max);
    double w = std::nan("");
    if (std::abs(r - 1.0) > 1e-9) w = winding_number(a, b);
    summary.add_row({r, w, plateau, tr.max_edge_population});
    rows.push_back({{"r", r},
                    {"winding", std::isnan(w) ? json(nullptr) : json(w)},
                    {"plateau", plateau},
                    {"max_edge_population", tr.max_edge_population}});
    log << "md-scan: r = " << r << " plateau " << plateau << "\n";
  }
  out.write_text("md_summary.csv", summary.str());
  out.write_json("md_summary.json", {{"parameters", parameters_with_units(cfg)}, {"results", rows}});
}

void run_ix_scan(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
  const double b = cfg.hz("ix.sideband_hz");
  const int sites = cfg.integer("ix.sites");
  const double t = cfg.number("ix.hold_phase") * kPi / b;
  const double dmax = cfg.number("ix.detuning_max");
  const double tilt = cfg.number("ix.tilt");
  const int points = cfg.integer("ix.points");
  CsvTable table({"r", "delta_over_omega_b", "tilt_over_omega_b", "ix", "ix_linear"});
  table.add_comment("one-step protocol I_x at Omega_B t / pi = " + format_double(cfg.number("ix.hold_phase")));
  json rows = json::array();
  for (double r : cfg.numbers("ix.ratios")) {
    const double a = b / r;
    std::vector<double> xs, ys;
    for (int j = 0; j < points; ++j) {
      const double d = -dmax + 2.0 * dmax * j / (points - 1);
      const double ix = run_one_step_protocol({a, b, d * b, tilt * b, 0.0}, sites, t);
      table.add_row({r, d, tilt, ix, linear_response_Ix(a, b, d * b, tilt * b, t, sites)});
      xs.push_back(d);
      ys.push_back(ix);
    }
    const auto f = fit_line(xs, ys);
    rows.push_back({{"r", r},
                    {"slope", f.slope},
                    {"intercept", f.intercept},
                    {"r_squared", f.r2},
                    {"detuning_response", detuning_response(a, b, t)},
                    {"tilt_response", tilt_response(a, b, t, sites)}});
    log << "ix-scan: r = " << r << " slope " << f.slope << " R^2 " << f.r2 << "\n";
  }
  out.write_text("ix.csv", table.str());
  out.write_json("ix.json", {{"parameters", parameters_with_units(cfg)}, {"results", rows}});
}

namespace {

struct ClockSetup {
  SSHClockSpec ssh;
  RabiSpec rabi;
  double operating_point = 0.0;
};

ClockSetup clock_setup(const RunConfig& cfg) {
  ClockSetup s;
  s.ssh = {cfg.hz("clock.carrier_hz"), cfg.hz("clock.sideband_hz"), cfg.integer("clock.sites")};
  s.ssh.validate();
  s.rabi = {s.ssh.sideband};  // matched to the sideband coupling, same pulse time
  s.operating_point = rabi_operating_point(s.rabi);
  return s;
}

StatisticalNoise ssh_noise(const ClockSetup& s, double sigma) {
  return statistical_noise(
      [&](const std::vector<double>& e) {
        NoiseRealization r;
        r.amplitude_carrier = e[0];
        r.amplitude_sideband = e[1];
        return run_ssh_clock(s.ssh, 0.0, 0.0, r);
      },
      {sigma, sigma});
}

StatisticalNoise rabi_noise(const ClockSetup& s, double sigma) {
  return statistical_noise(
      [&](const std::vector<double>& e) {
        NoiseRealization r;
        r.amplitude_carrier = e[0];
        return rabi_lineshape(s.rabi, s.operating_point, r);
      },
      {sigma});
}

}  // namespace

void run_clock(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
  const auto s = clock_setup(cfg);
  const auto noise = cfg.noise();
  json result = {{"rabi_operating_point_rad_s", s.operating_point},
                 {"rabi_operating_point_hz", angular_to_hz(s.operating_point)},
                 {"hold_time_s", s.ssh.hold_time()}};
  if (cfg.noise_enabled()) {
    const auto ens = ensemble_run(
        [&](const NoiseRealization& r, std::size_t) {
          return std::vector<double>{run_ssh_clock(s.ssh, 0.0, 0.0, r), rabi_lineshape(s.rabi, s.operating_point, r)};
        },
        {"ssh", "rabi"}, noise, cfg.realizations, cfg.workers);
    out.write_text("clock_ensemble.csv", ens.csv());
    result["ensemble"] = ens.to_json();
    result["interval_ssh"] = interval_json(ens.summary("ssh"));
    result["interval_rabi"] = interval_json(ens.summary("rabi"));
    log << "clock: interval width ssh " << ens.summary("ssh").width() << " rabi " << ens.summary("rabi").width()
        << "\n";
  }
  const auto ns = ssh_noise(s, noise.amplitude);
  const auto nr = rabi_noise(s, noise.amplitude);
  json sigma = json::array();
  for (double n : cfg.numbers("clock.atoms")) {
    sigma.push_back({{"atoms", n}, {"ssh", ns.sigma2(n)}, {"rabi", nr.sigma2(n)}});
  }
  result["sigma_s2"] = sigma;
  result["warnings"] = ns.warnings;
  for (const auto& w : nr.warnings) result["warnings"].push_back(w);
  out.write_json("clock.json", {{"parameters", parameters_with_units(cfg)}, {"results", result}});
}

void run_sensitivity(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
  const auto s = clock_setup(cfg);
  const double sigma = cfg.number("noise.amplitude");
  const auto ns = ssh_noise(s, sigma);
  const auto nr = rabi_noise(s, sigma);
  // single-atom d<o>/d phi with phi = delta t_L
  const double h = 1e-4 * s.ssh.sideband;
  const double t_ssh = s.ssh.hold_time();
  const double t_rabi = s.rabi.pulse_time();
  const double ssh_slope = (run_ssh_clock(s.ssh, h, 0.0) - run_ssh_clock(s.ssh, -h, 0.0)) / (2 * h) / t_ssh;
  const double rabi_slope_phi = rabi_slope(s.rabi, s.operating_point) / t_rabi;
  CsvTable table({"atoms", "sigma_s2_ssh", "sigma_s2_rabi", "delta2_ssh", "delta2_rabi"});
  table.add_comment("delta^2 delta in (rad/s)^2; collective signal slope N d<o>/d phi");
  for (double n : cfg.numbers("clock.atoms")) {
    table.add_row({n, ns.sigma2(n), nr.sigma2(n), clock_sensitivity(n * ssh_slope, ns.sigma2(n), n, t_ssh),
                   clock_sensitivity(n * rabi_slope_phi, nr.sigma2(n), n, t_rabi)});
  }
  out.write_text("sensitivity.csv", table.str());
  out.write_json("sensitivity.json", {{"parameters", parameters_with_units(cfg)},
                                      {"results",
                                       {{"ssh_slope_per_rad", ssh_slope},
                                        {"rabi_slope_per_rad", rabi_slope_phi},
                                        {"ssh_derivatives", ns.derivatives},
                                        {"rabi_derivatives", nr.derivatives}}}});
  log << "sensitivity: " << table.rows() << " atom numbers\n";
}

namespace {

struct MwiProtocol {
  std::string name;
  int pulses = 0;
  std::function<InterferometerRun(double, const NoiseRealization&)> run;
  std::function<double(double)> ideal;
};

MwiProtocol make_protocol(const std::string& name, const RunConfig& cfg) {
  InterferometerOptions opt;
  opt.guard_sites = cfg.integer("mwi.guard_sites");
  opt.stark.enabled = cfg.flag("mwi.stark");
  if (name.rfind("TPP", 0) == 0) {
    const TPPSpec spec = name == "TPP12" ? TPPSpec::tau12() : TPPSpec::tau5();
    return {name, spec.cycles, [spec, opt](double t, const NoiseRealization& r) { return run_tpp(spec, t, r, opt); },
            [spec](double t) { return ideal_phase_tpp(spec, t); }};
  }
  MPPSpec spec = name == "P0" ? MPPSpec::p0() : name == "P1" ? MPPSpec::p1() : MPPSpec::p2();
  spec.mode = cfg.text("mwi.pulse_mode") == "finite" ? PulseMode::finite : PulseMode::ideal;
  return {name, spec.pulses, [spec, opt](double t, const NoiseRealization& r) { return run_mpp(spec, t, r, opt); },
          [spec](double t) { return ideal_phase_mpp(spec, t); }};
}

}  // namespace

void run_mwi(const RunConfig& cfg, Artifacts& out, std::ostream& log) {
  const double tilt = cfg.number("mwi.tilt");
  json results = json::array();
  for (const auto& name : cfg.texts("mwi.protocols")) {
    const auto p = make_protocol(name, cfg);
    const auto clean = p.run(tilt, {});
    CsvTable trace({"stage", "step", "d_eg", "n_e", "n_g", "overlap"});
    trace.add_comment(name + " noise-free, tilt_rad_s=" + format_double(tilt));
    for (const auto& s : clean.trace) {
      trace.add_raw_row(s.stage + "," + std::to_string(s.step) + "," + format_double(s.separation) + "," +
                        format_double(s.ne) + "," + format_double(s.ng) + "," + format_double(s.overlap));
    }
    out.write_text("mwi_" + name + "_trace.csv", trace.str());
    json r = {{"protocol", name},
              {"sites", clean.sites},
              {"phase", clean.phase},
              {"ideal_phase", p.ideal(tilt)},
              {"fidelity", clean.fidelity},
              {"max_separation", clean.max_separation},
              {"separation_ratio", clean.max_separation / (2.0 * p.pulses)},
              {"sz", clean.sz},
              {"warnings", clean.warnings}};
    if (cfg.noise_enabled()) {
      const auto ens = ensemble_run(
          [&](const NoiseRealization& n, std::size_t) {
            const auto run = p.run(tilt, n);
            return std::vector<double>{run.max_separation / (2.0 * p.pulses), run.fidelity, run.phase, run.sz};
          },
          {"d_ratio", "F", "phase", "sz"}, cfg.noise(), cfg.realizations, cfg.workers);
      out.write_text("mwi_" + name + "_ensemble.csv", ens.csv());
      r["ensemble"] = ens.to_json();
    }
    log << "mwi: " << name << " phase " << clean.phase << " F " << clean.fidelity << "\n";
    results.push_back(r);
  }
  out.write_json("mwi.json", {{"parameters", parameters_with_units(cfg)}, {"results", results}});
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  Artifacts out(cfg.out);
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  int status = 0;
  std::string error;
  try {
    if (cfg.kind == "winding") {
      run_winding(cfg, out, log);
    } else if (cfg.kind == "md-scan") {
      run_md_scan(cfg, out, log);
    } else if (cfg.kind == "ix-scan") {
      run_ix_scan(cfg, out, log);
    } else if (cfg.kind == "clock") {
      run_clock(cfg, out, log);
    } else if (cfg.kind == "mwi") {
      run_mwi(cfg, out, log);
    } else if (cfg.kind == "sensitivity") {
      run_sensitivity(cfg, out, log);
    } else if (cfg.kind == "validate") {
      if (!run_validate(cfg, out, log)) status = 3;
    } else {
      throw InvalidArgument("unknown kind " + cfg.kind);
    }
  } catch (const std::exception& e) {
    error = e.what();
    err << "topoclock " << cfg.kind << ": " << error << "\n";
    status = 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest = {{"tool", "topoclock"},
                   {"version", TOPOCLOCK_VERSION},
                   {"kind", cfg.kind},
                   {"config", cfg.echo()},
                   {"out", cfg.out.string()},
                   {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                   {"workers", cfg.workers},
                   {"started_utc", started},
                   {"wall_time_s", wall},
                   {"status", status},
                   {"files", out.files()}};
  if (!error.empty()) manifest["error"] = error;
  try {
    std::ofstream f(cfg.out / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
    if (!f) throw Error("cannot write manifest.json");
  } catch (const std::exception& e) {
    err << "topoclock: " << e.what() << "\n";
    return 1;
  }
  return status;
}

}  // namespace topoclock::cli
