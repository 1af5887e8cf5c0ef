#pragma once

#include "kimex/bgk.hpp"
#include "kimex/moments.hpp"
#include "kimex/schemes.hpp"
#include "kimex/transport.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace kimex {

/// Macroscopic state U = (rho, rho u, E) on the periodic spatial grid,
/// closed with the kinetic temperature relation of `dim` velocity
/// dimensions.
struct EulerState {
  SpatialGrid grid;
  MomentSet U;
};

inline void check_admissible(const EulerState& s, const char* what) {
  if (!s.U.admissible())
    throw std::domain_error(std::string(what) + ": inadmissible state in cell " +
                            std::to_string(s.U.degenerate.front()));
}

/// F(U) along x: (rho u_x, rho u_x u + p e_x, (E + p) u_x)
inline Eigen::MatrixXd euler_flux(const EulerState& s) {
  check_admissible(s, "euler_flux");
  const int dim = s.U.dim;
  const auto u = s.U.velocity();
  const Eigen::ArrayXd p = s.U.pressure();
  Eigen::MatrixXd F(s.U.cells(), 2 + dim);
  const Eigen::ArrayXd ux = u.col(0);
  F.col(0) = (s.U.rho * ux).matrix();
  for (int d = 0; d < dim; ++d) F.col(1 + d) = (s.U.mom.col(d) * ux).matrix();
  F.col(1) += p.matrix();
  F.col(1 + dim) = ((s.U.energy + p) * ux).matrix();
  return F;
}

namespace detail {

// 4th-order centered periodic first derivative
inline Eigen::ArrayXd ddx4(const Eigen::ArrayXd& f, double dx) {
  const int n = static_cast<int>(f.size());
  if (n < 5) throw std::invalid_argument("ddx4: need at least 5 cells");
  Eigen::ArrayXd d(n);
  auto at = [&](int i) { return f(((i % n) + n) % n); };
  for (int i = 0; i < n; ++i)
    d(i) = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * dx);
  return d;
}

}  // namespace detail

/// Trace-free strain rate as a dim x dim matrix per cell; gradients are
/// along x only. For dim = 1 this vanishes identically.
inline std::vector<Eigen::MatrixXd> strain_rate(const EulerState& s) {
  const int dim = s.U.dim;
  const int n = s.U.cells();
  const auto u = s.U.velocity();
  std::vector<Eigen::ArrayXd> du(dim);
  for (int d = 0; d < dim; ++d) du[d] = detail::ddx4(u.col(d), s.grid.dx);
  std::vector<Eigen::MatrixXd> sigma(n, Eigen::MatrixXd::Zero(dim, dim));
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
    for (int d = 0; d < dim; ++d) G(d, 0) = du[d](i);  // d u_d / d x
    sigma[i] = 0.5 * (G + G.transpose()) -
               (G.trace() / dim) * Eigen::MatrixXd::Identity(dim, dim);
  }
  return sigma;
}

/// First Chapman-Enskog correction for the BGK closure:
///
///   g = -(1/mu) M[U] ( A(V):sigma(u) + 2 B(V) . grad sqrt(T) )
///   A(V) = V (x) V - (|V|^2/dim) I,  B(V) = (|V|^2 - (dim+2)) V / 2
///
/// with V = (v-u)/sqrt(T). A is trace-free, so A:sigma = (V(x)V):sigma.
inline DistributionField chapman_enskog_g(const EulerState& s, const VelocityGrid& vg,
                                          const FrequencyPolicy& mu_policy) {
  check_admissible(s, "chapman_enskog_g");
  if (vg.dim != s.U.dim) throw std::invalid_argument("chapman_enskog_g: dim mismatch");
  const int n = s.U.cells();
  const auto u = s.U.velocity();
  const Eigen::ArrayXd T = s.U.temperature();
  const Eigen::ArrayXd mu = collision_frequency(mu_policy, s.U);
  const Eigen::ArrayXd dsqrtT = detail::ddx4(T.sqrt(), s.grid.dx);
  const auto sigma = strain_rate(s);
  const DistributionField M = maxwellian(s.U, vg, s.grid);

  DistributionField g = make_field(vg, s.grid);
  const int dim = vg.dim;
  for (int i = 0; i < n; ++i) {
    const double rt = std::sqrt(T(i));
    for (int k = 0; k < vg.total(); ++k) {
      const double Vx = (vg.vx(k) - u(i, 0)) / rt;
      const double Vy = dim > 1 ? (vg.vy(k) - u(i, 1)) / rt : 0.0;
      const double V2 = Vx * Vx + Vy * Vy;
      double a_sigma = 0.0;
      if (dim == 2) {
        a_sigma = Vx * Vx * sigma[i](0, 0) + Vy * Vy * sigma[i](1, 1) +
                  2.0 * Vx * Vy * sigma[i](0, 1);
      }
      const double b_heat = 0.5 * (V2 - (dim + 2)) * Vx * dsqrtT(i);
      g.values(i, k) = -M.values(i, k) / mu(i) * (a_sigma + 2.0 * b_heat);
    }
  }
  return g;
}

enum class InitRegime { euler, navier_stokes };

struct WellPreparedInit {
  DistributionField f;
  long clipped = 0;        // entries below -1e-12 raised to zero
  double min_value = 0.0;  // before clipping
};

/// Euler regime: f0 = M[U0]. Navier-Stokes regime: f0 = M[U0] + eps g(U0).
inline WellPreparedInit well_prepared_init(const EulerState& s, double eps,
                                           InitRegime regime, const VelocityGrid& vg,
                                           const FrequencyPolicy& mu_policy) {
  check_admissible(s, "well_prepared_init");
  WellPreparedInit out{maxwellian(s.U, vg, s.grid), 0, 0.0};
  if (regime == InitRegime::navier_stokes && eps != 0.0)
    out.f.values += eps * chapman_enskog_g(s, vg, mu_policy).values;
  out.min_value = out.f.values.minCoeff();
  if (out.min_value < -1e-12) {
    for (int i = 0; i < out.f.cells(); ++i)
      for (int k = 0; k < out.f.nodes(); ++k)
        if (out.f.values(i, k) < 0.0) {
          out.f.values(i, k) = 0.0;
          ++out.clipped;
        }
  }
  return out;
}

/// History for the limit explicit multistep scheme on U. The flux
/// divergence is the kinetic one: moments of L(M[U]) with the same
/// discrete transport operator as the kinetic solver, which is what the
/// stiff limit of the kinetic scheme produces.
struct EulerHistory {
  SpatialGrid grid;
  VelocityGrid vgrid;
  TransportMethod transport = TransportMethod::weno5;
  std::vector<MomentSet> U;                // newest first
  std::vector<Eigen::MatrixXd> div_flux;   // cached, matching U
  double dt = 0.0;
  double time = 0.0;
  long step = 0;
};

inline Eigen::MatrixXd kinetic_flux_divergence(const MomentSet& U, const SpatialGrid& xg,
                                               const VelocityGrid& vg,
                                               TransportMethod method) {
  const DistributionField M = maxwellian(U, vg, xg);
  return advection_derivative(M, method).values.matrix() * vg.phi_w;
}

inline EulerHistory make_euler_history(const ImexScheme& sc,
                                       const std::vector<MomentSet>& ascending,
                                       const SpatialGrid& xg, const VelocityGrid& vg,
                                       TransportMethod method, double dt) {
  if (static_cast<int>(ascending.size()) != sc.steps)
    throw std::invalid_argument("make_euler_history: need s states");
  EulerHistory h;
  h.grid = xg;
  h.vgrid = vg;
  h.transport = method;
  h.dt = dt;
  h.time = (sc.steps - 1) * dt;
  h.step = sc.steps - 1;
  for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) {
    h.U.push_back(*it);
    h.div_flux.push_back(kinetic_flux_divergence(*it, xg, vg, method));
  }
  return h;
}

/// U^{n+1} = -sum_j a_j U^{n-j} - dt sum_j b_j divF^{n-j}
inline MomentSet euler_limit_step(const ImexScheme& sc, const EulerHistory& h) {
  if (static_cast<int>(h.U.size()) != sc.steps)
    throw std::invalid_argument("euler_limit_step: history length mismatch");
  Eigen::MatrixXd packed =
      Eigen::MatrixXd::Zero(h.U[0].cells(), 2 + h.U[0].dim);
  for (int j = 0; j < sc.steps; ++j) {
    packed.noalias() -= sc.a_r[j] * h.U[j].packed();
    packed.noalias() -= (h.dt * sc.b_r[j]) * h.div_flux[j];
  }
  MomentSet next = moments_from_packed(packed, h.U[0].dim);
  if (!next.admissible())
    throw std::domain_error("euler_limit_step: inadmissible state in cell " +
                            std::to_string(next.degenerate.front()));
  return next;
}

inline void advance_euler(const ImexScheme& sc, EulerHistory& h) {
  MomentSet next = euler_limit_step(sc, h);
  h.U.pop_back();
  h.div_flux.pop_back();
  h.U.insert(h.U.begin(), next);
  h.div_flux.insert(h.div_flux.begin(),
                    kinetic_flux_divergence(next, h.grid, h.vgrid, h.transport));
  h.time += h.dt;
  ++h.step;
}

/// BGK Navier-Stokes diffusion flux D(grad U) = (0, nu sigma_x, kappa T'
/// + nu (sigma u)_x) with nu = p/mu and kappa = (dim+2)/2 p/mu
/// (Prandtl number 5/(dim+2)). Reference diagnostic only.
inline Eigen::MatrixXd ns_diffusion(const EulerState& s, const FrequencyPolicy& mu_policy) {
  check_admissible(s, "ns_diffusion");
  const int dim = s.U.dim;
  const int n = s.U.cells();
  const Eigen::ArrayXd T = s.U.temperature();
  const Eigen::ArrayXd p = s.U.pressure();
  const Eigen::ArrayXd mu = collision_frequency(mu_policy, s.U);
  const Eigen::ArrayXd nu = p / mu;
  const Eigen::ArrayXd kappa = 0.5 * (dim + 2) * p / mu;
  const Eigen::ArrayXd dT = detail::ddx4(T, s.grid.dx);
  const auto sigma = strain_rate(s);
  const auto u = s.U.velocity();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, 2 + dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) D(i, 1 + d) = nu(i) * sigma[i](d, 0);
    double sig_u = 0.0;
    for (int d = 0; d < dim; ++d) sig_u += sigma[i](0, d) * u(i, d);
    D(i, 1 + dim) = kappa(i) * dT(i) + nu(i) * sig_u;
  }
  return D;
}

inline double prandtl_number(int dim) { return 5.0 / (dim + 2); }

}  // namespace kimex
