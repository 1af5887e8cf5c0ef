// Command-line harness: scheme order checks, stability/monotonicity
// tables, single solver runs, and temporal convergence studies. All
// outputs are CSV with a header row; errors exit nonzero with a single
// "ERROR <message>" line on stderr.

#include "kimex/config.hpp"
#include "kimex/convergence.hpp"
#include "kimex/integrator.hpp"
#include "kimex/io.hpp"
#include "kimex/limits.hpp"
#include "kimex/stability.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

namespace {

using namespace kimex;

std::unique_ptr<std::ofstream> file_sink;

std::ostream& sink(const std::string& path) {
  if (path.empty()) return std::cout;
  file_sink = std::make_unique<std::ofstream>(path);
  if (!*file_sink) throw std::runtime_error("cannot open output file: " + path);
  return *file_sink;
}

std::vector<std::string> scheme_names_or_all(const std::vector<std::string>& names) {
  if (!names.empty()) return names;
  std::vector<std::string> all;
  for (const auto& s : builtin_schemes()) all.push_back(s.name);
  return all;
}

int cmd_order_check(const std::vector<std::string>& names, const std::string& out_path) {
  auto& out = sink(out_path);
  out << "scheme,order_tested,max_residual\n";
  for (const auto& name : scheme_names_or_all(names)) {
    const auto& sc = find_scheme(name);
    for (int p = 1; p <= sc.order + 1; ++p)
      out << sc.name << ',' << p << ',' << format_number(max_order_residual(sc, p))
          << '\n';
  }
  return 0;
}

int cmd_stability_region(const std::vector<std::string>& names, std::vector<double> xis,
                         double a_max, int n_a, double z_max, int k_samples, int n_scan,
                         const std::string& out_path) {
  if (xis.empty()) xis = {-0.3, -0.15, 0.0, 0.15, 0.3};
  auto& out = sink(out_path);
  out << "scheme,xi,a,z_boundary,censored\n";
  for (const auto& name : scheme_names_or_all(names)) {
    const auto& sc = find_scheme(name);
    for (double xi : xis) {
      auto curve = penalized_stability_boundary(sc, xi, a_max, n_a, z_max, k_samples, n_scan);
      for (const auto& pt : curve)
        out << sc.name << ',' << format_number(xi) << ',' << format_number(pt.a) << ','
            << format_number(pt.z) << ',' << (pt.censored ? 1 : 0) << '\n';
    }
  }
  return 0;
}

int cmd_monotonicity_table(double xi, const std::string& out_path) {
  auto& out = sink(out_path);
  out << "scheme,xi,z_lo,z_hi,feasible,published_z_lo,published_z_hi,matches_published,"
         "flagged\n";
  for (const auto& sc : builtin_schemes()) {
    auto r = monotonicity_region(sc, xi);
    auto pub = published_monotonicity_row(sc.name, xi);
    out << sc.name << ',' << format_number(xi) << ',' << format_number(r.z_lo) << ','
        << format_number(r.z_hi) << ',' << (r.feasible ? 1 : 0) << ',';
    if (pub.has_row && pub.applicable) {
      const bool match = r.feasible && std::abs(r.z_lo - pub.z_lo) < 1e-12 &&
                         std::abs(r.z_hi - pub.z_hi) < 1e-12;
      out << format_number(pub.z_lo) << ',' << format_number(pub.z_hi) << ','
          << (match ? 1 : 0) << ',' << (match ? 0 : 1) << '\n';
    } else {
      out << ",,,\n";
    }
  }
  return 0;
}

DistributionField initial_state_from_config(const Config& cfg, const VelocityGrid& vg,
                                            int nx, double eps,
                                            const FrequencyPolicy& mu) {
  const std::string init = cfg.get_string("init", "navier-stokes");
  const double waves = cfg.get_double("profile_waves", 4.0);
  if (init == "euler" || init == "navier-stokes") {
    auto s = wave_profile(nx, vg.dim, waves);
    const auto regime = init == "euler" ? InitRegime::euler : InitRegime::navier_stokes;
    auto res = well_prepared_init(s, eps, regime, vg, mu);
    if (res.clipped > 0)
      std::cerr << "WARNING init clipped " << res.clipped
                << " negative entries (min " << res.min_value << ")\n";
    return res.f;
  }
  if (init == "bimax") {
    if (nx != 1) throw std::invalid_argument("bimax init is homogeneous (nx = 1)");
    return bimax_profile(vg, cfg.get_double("init_rho", 1.0), cfg.get_double("init_ux", 1.0),
                         cfg.get_double("init_uy", 1.0), cfg.get_double("init_T", 1.0));
  }
  if (init == "bkw") {
    return bkw_solution(cfg.get_double("init_time", 0.0), vg,
                        cfg.get_double("b0", 1.0 / (2.0 * std::numbers::pi)));
  }
  if (init == "bumps") {
    // homogeneous two-bump mixture along v_x
    auto f = make_field(vg, make_spatial_grid(nx));
    const double c = cfg.get_double("init_offset", 1.2);
    const double w = cfg.get_double("init_width", 0.5);
    for (int i = 0; i < nx; ++i)
      for (int k = 0; k < vg.total(); ++k) {
        const double dx1 = vg.vx(k) - c, dx2 = vg.vx(k) + c;
        const double vy2 = vg.vy(k) * vg.vy(k);
        f.values(i, k) = std::exp(-(dx1 * dx1 + vy2) / (2.0 * w)) +
                         std::exp(-(dx2 * dx2 + vy2) / (2.0 * w));
      }
    return f;
  }
  throw std::invalid_argument("unknown init kind: " + init);
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_prefix_flag) {
  Config cfg = config_path.empty() ? Config{} : Config::parse_file(config_path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }

  const int dim = static_cast<int>(cfg.get_long("grid.dim", 1));
  const int nv = static_cast<int>(cfg.get_long("grid.nv", 64));
  const int nx = static_cast<int>(cfg.get_long("grid.nx", 64));
  const double v_max = cfg.get_double("grid.v_max", 8.0);
  auto vg = make_velocity_grid(dim, nv, v_max);

  ProblemSpec p;
  p.eps = cfg.get_double("epsilon", 1.0);
  p.model = model_from_string(cfg.get_string("model", "bgk"));
  p.mu = frequency_from_string(cfg.get_string("mu", "rho"));
  p.xi = cfg.get_double("xi", 0.0);
  p.transport = transport_from_string(cfg.get_string("transport", "weno5"));
  if (p.model == CollisionModel::boltzmann_penalized) {
    const double b0 = cfg.get_double("b0", 1.0 / (2.0 * std::numbers::pi));
    auto K = build_spectral_kernel(vg, b0);
    const std::string cache = cfg.get_string("kernel_cache", "");
    if (!cache.empty()) {
      auto loaded = std::make_shared<SpectralKernel>(*K);
      if (load_kernel_cache(*loaded, cache))
        K = loaded;
      else
        save_kernel_cache(*K, cache);
    }
    p.kernel = K;
  }

  const auto& sc = find_scheme(cfg.get_string("scheme", "IMEX-BDF2"));
  double dt = cfg.get_double("dt", 0.0);
  if (dt <= 0.0) {
    const double frac = cfg.get_double("dt_max_fraction", 1.0);
    dt = frac / (nx * 4.0 * v_max);
  }
  long n_steps = cfg.get_long("n_steps", 0);
  if (n_steps <= 0) {
    const double t_final = cfg.get_double("t_final", 0.05);
    n_steps = std::max(1L, std::lround(t_final / dt));
  }

  auto f0 = initial_state_from_config(cfg, vg, nx, p.eps, p.mu);
  BootstrapOptions bopt;
  if (cfg.has("bootstrap_target_rel"))
    bopt.target_abs = cfg.get_double("bootstrap_target_rel") * linf_norm(f0);
  auto boot = bootstrap(sc, f0, p, dt, bopt);

  RunOptions ropt;
  if (cfg.has("checkpoints")) {
    for (double s : cfg.get_list("checkpoints"))
      ropt.checkpoint_steps.push_back(std::lround(s));
  }
  auto tr = run(sc, std::move(boot.history), p,
                std::max(0L, n_steps - (sc.steps - 1)), ropt);

  const std::string prefix =
      !out_prefix_flag.empty() ? out_prefix_flag : cfg.get_string("output_prefix", "kimex_run");
  {
    std::ofstream out(prefix + "_diagnostics.csv");
    if (!out) throw std::runtime_error("cannot write " + prefix + "_diagnostics.csv");
    write_diagnostics_csv(out, tr);
  }
  {
    std::ofstream out(prefix + "_moments.csv");
    write_moments_csv(out, tr.history.slots[0].U, tr.history.slots[0].f.x);
  }
  for (const auto& [step, field] : tr.checkpoints) {
    std::ofstream out(prefix + "_moments_" + std::to_string(step) + ".csv");
    write_moments_csv(out, moments(field), field.x);
    write_field(prefix + "_field_" + std::to_string(step) + ".bin", field);
  }
  std::cout << "wrote " << prefix << "_diagnostics.csv, " << prefix << "_moments.csv";
  if (!tr.checkpoints.empty()) std::cout << " and " << tr.checkpoints.size() << " field dumps";
  std::cout << "\n";
  return 0;
}

int cmd_convergence(const std::string& preset_name, const std::vector<std::string>& schemes,
                    const std::vector<double>& epsilons, double t_final,
                    const std::string& out_path, const std::string& fits_path) {
  ExperimentPreset p = find_preset(preset_name);
  if (!schemes.empty()) p.schemes = schemes;
  if (!epsilons.empty()) p.epsilons = epsilons;
  if (t_final > 0.0) p.t_final = t_final;
  auto res = convergence_study(p);

  auto& out = sink(out_path);
  out << "scheme,epsilon,dt,error,diverged\n";
  for (const auto& r : res.rows)
    out << r.scheme << ',' << format_number(r.eps) << ',' << format_number(r.dt) << ','
        << format_number(r.error) << ',' << (r.diverged ? 1 : 0) << '\n';

  if (!fits_path.empty()) {
    std::ofstream fout(fits_path);
    if (!fout) throw std::runtime_error("cannot open output file: " + fits_path);
    fout << "scheme,epsilon,slope,points_used,max_residual\n";
    for (const auto& f : res.fits)
      fout << f.scheme << ',' << format_number(f.eps) << ',' << format_number(f.fit.slope)
           << ',' << f.fit.points_used << ',' << format_number(f.fit.max_residual) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMEX linear multistep solvers for stiff kinetic equations"};
  app.require_subcommand(1);

  std::vector<std::string> schemes, overrides;
  std::vector<double> xis, epsilons;
  std::string output, fits_output, config_path, preset, prefix;
  double a_max = 1.0, z_max = 50.0, xi = 0.0, t_final = -1.0;
  int n_a = 25, k_samples = 64, n_scan = 160;

  auto* order = app.add_subcommand("order-check", "order-condition residuals per scheme");
  order->add_option("--scheme", schemes, "scheme name (repeatable; default all)");
  order->add_option("--output", output, "output CSV path (default stdout)");

  auto* stab = app.add_subcommand("stability-region", "penalized stability boundaries");
  stab->add_option("--scheme", schemes, "scheme name (repeatable; default all)");
  stab->add_option("--xi", xis, "penalization factors (default -0.3 -0.15 0 0.15 0.3)");
  stab->add_option("--a-max", a_max, "advection number sweep limit");
  stab->add_option("--a-samples", n_a, "points on the advection sweep");
  stab->add_option("--z-max", z_max, "stiffness ratio sweep limit");
  stab->add_option("--k-samples", k_samples, "Fourier modes sampled on [0, pi)");
  stab->add_option("--scan", n_scan, "coarse scan points before bisection");
  stab->add_option("--output", output, "output CSV path (default stdout)");

  auto* mono = app.add_subcommand("monotonicity-table", "nonnegativity z-intervals");
  mono->add_option("--xi", xi, "penalization factor")->required();
  mono->add_option("--output", output, "output CSV path (default stdout)");

  auto* runc = app.add_subcommand("run", "integrate one configuration");
  runc->add_option("--config", config_path, "key = value configuration file");
  runc->add_option("--set", overrides, "override key=value (repeatable)");
  runc->add_option("--output-prefix", prefix, "prefix for the output files");

  auto* conv = app.add_subcommand("convergence", "temporal convergence study");
  conv->add_option("--preset", preset, "experiment preset name")->required();
  conv->add_option("--schemes", schemes, "schemes to measure (default preset list)");
  conv->add_option("--epsilons", epsilons, "Knudsen numbers (default preset list)");
  conv->add_option("--t-final", t_final, "final time (default preset value)");
  conv->add_option("--output", output, "error table CSV path (default stdout)");
  conv->add_option("--fits", fits_output, "fitted-order CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (order->parsed()) return cmd_order_check(schemes, output);
    if (stab->parsed())
      return cmd_stability_region(schemes, xis, a_max, n_a, z_max, k_samples, n_scan, output);
    if (mono->parsed()) return cmd_monotonicity_table(xi, output);
    if (runc->parsed()) return cmd_run(config_path, overrides, prefix);
    if (conv->parsed())
      return cmd_convergence(preset, schemes, epsilons, t_final, output, fits_output);
  } catch (const std::exception& e) {
    std::cerr << "ERROR " << e.what() << "\n";
    return 1;
  }
  return 0;
}
