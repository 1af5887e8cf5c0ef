#pragma once

#include "kimex/integrator.hpp"
#include "kimex/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace kimex {

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // of the log-log fit
  int points_used = 0;
  std::vector<double> excluded_dt;  // non-finite errors
};

/// Least-squares slope of log(error) against log(dt).
inline OrderFit fit_order(const std::vector<std::pair<double, double>>& dt_error) {
  OrderFit fit;
  std::vector<double> lx, ly;
  for (const auto& [dt, err] : dt_error) {
    if (!std::isfinite(err) || err <= 0.0) {
      fit.excluded_dt.push_back(dt);
      continue;
    }
    lx.push_back(std::log(dt));
    ly.push_back(std::log(err));
  }
  fit.points_used = static_cast<int>(lx.size());
  if (fit.points_used < 2)
    throw std::invalid_argument("fit_order: need at least two finite errors");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < fit.points_used; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double n = fit.points_used;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  for (int i = 0; i < fit.points_used; ++i)
    fit.max_residual =
        std::max(fit.max_residual, std::abs(ly[i] - fit.slope * lx[i] - fit.intercept));
  return fit;
}

enum class InitKind {
  wave_euler,     // maxwellian of the wavy (rho, T) profile
  wave_ns,        // + eps * chapman-enskog correction
  bimax,          // homogeneous two-bump gaussian, dv = 2
};

/// A named experiment configuration: grids, operator, initial data, time
/// step ladder and reference policy.
struct ExperimentPreset {
  std::string name;
  CollisionModel model = CollisionModel::bgk;
  int dim = 1;
  int nv = 64;           // velocity points per dimension
  int nx = 64;           // 1 for homogeneous
  double v_max = 8.0;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-5};
  TransportMethod transport = TransportMethod::weno5;
  FrequencyPolicy mu{FrequencyPolicy::Mode::density_proportional, 1.0};
  InitKind init = InitKind::wave_ns;
  double profile_waves = 4.0;  // sin(2 pi waves x) in the wavy profile
  double t_final = 0.05;
  double dt_max = 0.0;  // 0: dx / (4 v_max)
  std::vector<double> ladder_divisors{2, 4, 8};
  double b0 = 1.0 / (2.0 * std::numbers::pi);
  std::string reference_scheme = "IMEX-BDF3";
  int ref_refine = 16;            // dt_ref = dt_min / ref_refine
  double ref_bootstrap_rel = 1e-11;
  std::vector<std::string> schemes{"IMEX-BDF2", "IMEX-SG2", "IMEX-BDF3", "IMEX-TVB3",
                                   "IMEX-BDF4", "IMEX-TVB4", "IMEX-BDF5", "IMEX-TVB5"};
};

/// The built-in experiment catalog. The *-desk presets are reduced-size
/// variants; the full ones carry the published grid parameters.
inline const std::vector<ExperimentPreset>& builtin_presets() {
  static const std::vector<ExperimentPreset> presets = [] {
    std::vector<ExperimentPreset> v;
    {
      ExperimentPreset p;
      p.name = "bgk-wave";
      p.model = CollisionModel::bgk;
      p.dim = 1;
      p.nv = 512;
      p.nx = 128;
      p.v_max = 8.0;
      v.push_back(p);
      p.name = "bgk-wave-desk";
      p.nv = 64;
      p.nx = 64;
      v.push_back(p);
    }
    {
      ExperimentPreset p;
      p.name = "boltzmann-relax";
      p.model = CollisionModel::boltzmann_penalized;
      p.dim = 2;
      p.nv = 64;
      p.nx = 1;
      p.v_max = 10.0;
      p.epsilons = {1.0};
      p.init = InitKind::bimax;
      p.t_final = 2.0;
      p.dt_max = 0.2;
      p.ladder_divisors = {1, 2, 4, 8};
      // collision evaluations are the cost driver here; the start-up
      // injection only needs to sit well below the finest measured error
      p.ref_bootstrap_rel = 1e-8;
      p.schemes = {"IMEX-BDF2", "IMEX-BDF3", "IMEX-BDF4", "IMEX-BDF5"};
      v.push_back(p);
      p.name = "boltzmann-relax-desk";
      p.nv = 32;
      v.push_back(p);
    }
    {
      ExperimentPreset p;
      p.ref_bootstrap_rel = 1e-9;
      p.name = "boltzmann-wave";
      p.model = CollisionModel::boltzmann_penalized;
      p.dim = 2;
      p.nv = 16;  // 256 velocity nodes
      p.nx = 128;
      p.v_max = 8.0;
      v.push_back(p);
      p.name = "boltzmann-wave-desk";
      p.nx = 32;
      v.push_back(p);
    }
    return v;
  }();
  return presets;
}

inline const ExperimentPreset& find_preset(const std::string& name) {
  for (const auto& p : builtin_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset: " + name);
}

inline EulerState wave_profile(int nx, int dim, double waves) {
  auto xg = make_spatial_grid(nx);
  Eigen::ArrayXd rho(nx), T(nx);
  Eigen::ArrayXXd u = Eigen::ArrayXXd::Zero(nx, dim);
  for (int i = 0; i < nx; ++i) {
    const double x = xg.coord(i);
    rho(i) = (2.0 + std::sin(2.0 * std::numbers::pi * waves * x)) / 3.0;
    T(i) = (2.0 + std::cos(2.0 * std::numbers::pi * waves * x)) / 3.0;
  }
  return EulerState{xg, moments_from_primitive(dim, rho, u, T)};
}

/// Homogeneous two-bump data (dv = 2): gaussians of width T0 centered at
/// (u_x, u_y) and (-3 u_x, u_y), total density rho0.
inline DistributionField bimax_profile(const VelocityGrid& vg, double rho0 = 1.0,
                                       double ux = 1.0, double uy = 1.0, double T0 = 1.0) {
  auto f = make_field(vg, make_spatial_grid(1));
  const double pref = rho0 / (4.0 * std::numbers::pi * T0);
  for (int k = 0; k < vg.total(); ++k) {
    const double dy = vg.vy(k) - uy;
    const double d1 = (vg.vx(k) - ux) * (vg.vx(k) - ux) + dy * dy;
    const double d2 = (vg.vx(k) + 3.0 * ux) * (vg.vx(k) + 3.0 * ux) + dy * dy;
    f.values(0, k) = pref * (std::exp(-d1 / (2.0 * T0)) + std::exp(-d2 / (2.0 * T0)));
  }
  return f;
}

inline DistributionField build_initial_state(const ExperimentPreset& p,
                                             const VelocityGrid& vg, double eps) {
  switch (p.init) {
    case InitKind::wave_euler: {
      auto s = wave_profile(p.nx, p.dim, p.profile_waves);
      return well_prepared_init(s, eps, InitRegime::euler, vg, p.mu).f;
    }
    case InitKind::wave_ns: {
      auto s = wave_profile(p.nx, p.dim, p.profile_waves);
      return well_prepared_init(s, eps, InitRegime::navier_stokes, vg, p.mu).f;
    }
    case InitKind::bimax:
      return bimax_profile(vg);
  }
  throw std::logic_error("build_initial_state: bad init kind");
}

struct ErrorRow {
  std::string scheme;
  double eps = 0.0;
  double dt = 0.0;
  double error = 0.0;
  bool diverged = false;
  std::string note;
};

struct OrderFitRow {
  std::string scheme;
  double eps = 0.0;
  OrderFit fit;
};

struct ConvergenceResult {
  std::vector<ErrorRow> rows;
  std::vector<OrderFitRow> fits;
  double t_final = 0.0;  // snapped to a whole number of dt_max steps
};

namespace detail {

inline double state_error(const DistributionField& f, const DistributionField& ref,
                          bool homogeneous) {
  if (homogeneous) {
    DistributionField d = like(f);
    d.values = f.values - ref.values;
    return l1_norm(d);
  }
  const auto r1 = moments(f).rho;
  const auto r2 = moments(ref).rho;
  return (r1 - r2).abs().sum() * f.x.dx;
}

}  // namespace detail

/// Temporal convergence study against a fine-step reference run of the
/// same spatial resolution. Every measured run starts from states
/// checkpointed on the reference trajectory at the exact history times
/// (machine-accurate initialization); the reference itself starts from
/// Richardson-controlled sub-stepped backward Euler.
inline ConvergenceResult convergence_study(const ExperimentPreset& p) {
  ConvergenceResult out;
  const auto vg = make_velocity_grid(p.dim, p.nv, p.v_max);
  const bool homogeneous = p.nx == 1;
  const double dt_max = p.dt_max > 0.0
                            ? p.dt_max
                            : 1.0 / (p.nx * 4.0 * p.v_max);
  const long n_macro = std::max(1L, std::lround(p.t_final / dt_max));
  out.t_final = n_macro * dt_max;

  std::vector<double> ladder;
  for (double d : p.ladder_divisors) ladder.push_back(dt_max / d);
  const double dt_min = *std::min_element(ladder.begin(), ladder.end());
  const double dt_ref = dt_min / p.ref_refine;
  const long n_ref = std::lround(out.t_final / dt_ref);

  std::shared_ptr<const SpectralKernel> kernel;
  if (p.model == CollisionModel::boltzmann_penalized)
    kernel = build_spectral_kernel(vg, p.b0);

  const auto& ref_scheme = find_scheme(p.reference_scheme);

  for (double eps : p.epsilons) {
    ProblemSpec prob;
    prob.eps = eps;
    prob.model = p.model;
    prob.mu = p.mu;
    prob.transport = p.transport;
    prob.kernel = kernel;

    const DistributionField f0 = build_initial_state(p, vg, eps);

    // checkpoint schedule: history states j dt for every ladder dt, plus
    // the common final time
    std::set<long> steps_needed;
    int s_max = 1;
    for (const auto& name : p.schemes) s_max = std::max(s_max, find_scheme(name).steps);
    for (double dt : ladder) {
      const long stride = std::lround(dt / dt_ref);
      if (std::abs(stride * dt_ref - dt) > 1e-12 * dt)
        throw std::logic_error("convergence_study: ladder not commensurate with dt_ref");
      for (int j = 1; j < s_max; ++j) steps_needed.insert(j * stride);
    }
    steps_needed.insert(n_ref);

    BootstrapOptions ref_boot;
    ref_boot.target_abs = p.ref_bootstrap_rel * linf_norm(f0);
    auto boot = bootstrap(ref_scheme, f0, prob, dt_ref, ref_boot);
    RunOptions ref_opt;
    ref_opt.diagnostics = false;
    ref_opt.checkpoint_steps.assign(steps_needed.begin(), steps_needed.end());
    auto ref = run(ref_scheme, std::move(boot.history), prob,
                   n_ref - (ref_scheme.steps - 1), ref_opt);

    std::map<long, const DistributionField*> at;
    for (const auto& [step, field] : ref.checkpoints) at[step] = &field;
    const DistributionField& f_ref_final = *at.at(n_ref);

    for (const auto& name : p.schemes) {
      const auto& sc = find_scheme(name);
      std::vector<std::pair<double, double>> dt_err;
      for (double dt : ladder) {
        ErrorRow row;
        row.scheme = name;
        row.eps = eps;
        row.dt = dt;
        const long stride = std::lround(dt / dt_ref);
        try {
          std::vector<DistributionField> states;
          states.push_back(f0);
          for (int j = 1; j < sc.steps; ++j) states.push_back(*at.at(j * stride));
          auto h = make_history(sc, states, prob, dt);
          const long n_steps = std::lround(out.t_final / dt) - (sc.steps - 1);
          RunOptions opt;
          opt.diagnostics = false;
          auto tr = run(sc, std::move(h), prob, n_steps, opt);
          row.error = detail::state_error(tr.history.slots[0].f, f_ref_final, homogeneous);
          if (!std::isfinite(row.error)) throw std::runtime_error("non-finite error");
        } catch (const std::exception& e) {
          row.error = std::numeric_limits<double>::infinity();
          row.diverged = true;
          row.note = e.what();
        }
        dt_err.emplace_back(dt, row.error);
        out.rows.push_back(std::move(row));
      }
      int finite = 0;
      for (const auto& [dt, err] : dt_err)
        if (std::isfinite(err)) ++finite;
      if (finite >= 2) out.fits.push_back({name, eps, fit_order(dt_err)});
    }
  }
  return out;
}

}  // namespace kimex
