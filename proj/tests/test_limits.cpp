#include "kimex/limits.hpp"

#include "support/test_utils.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace kimex;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

// wavy density/temperature profile of the experiments
EulerState wave_state(int nx, int dim = 1, double waves = 1.0) {
  auto xg = make_spatial_grid(nx);
  Eigen::ArrayXd rho(nx), T(nx);
  Eigen::ArrayXXd u = Eigen::ArrayXXd::Zero(nx, dim);
  for (int i = 0; i < nx; ++i) {
    const double x = xg.coord(i);
    rho(i) = (2.0 + std::sin(2.0 * kPi * waves * x)) / 3.0;
    T(i) = (2.0 + std::cos(2.0 * kPi * waves * x)) / 3.0;
  }
  return EulerState{xg, moments_from_primitive(dim, rho, u, T)};
}

const FrequencyPolicy mu_rho{FrequencyPolicy::Mode::density_proportional, 1.0};

}  // namespace

TEST_CASE("euler flux of a stationary gas") {
  auto xg = make_spatial_grid(4);
  Eigen::ArrayXd rho = Eigen::ArrayXd::Constant(4, 1.0);
  Eigen::ArrayXXd u = Eigen::ArrayXXd::Zero(4, 1);
  Eigen::ArrayXd T = Eigen::ArrayXd::Constant(4, 0.8);
  EulerState s{xg, moments_from_primitive(1, rho, u, T)};
  auto F = euler_flux(s);
  for (int i = 0; i < 4; ++i) {
    CHECK(F(i, 0) == 0.0);                       // mass flux
    CHECK_THAT(F(i, 1), WithinAbs(0.8, 1e-14));  // momentum flux = p
    CHECK(F(i, 2) == 0.0);                       // energy flux
  }
}

TEST_CASE("mass flux transforms as rho(u+w) under velocity shift") {
  auto xg = make_spatial_grid(3);
  Eigen::ArrayXd rho(3);
  rho << 0.5, 1.0, 1.5;
  Eigen::ArrayXd T = Eigen::ArrayXd::Constant(3, 1.0);
  Eigen::ArrayXXd u(3, 1);
  u << 0.1, -0.2, 0.3;
  const double w = 0.77;
  Eigen::ArrayXXd uw = u + w;
  auto F = euler_flux(EulerState{xg, moments_from_primitive(1, rho, u, T)});
  auto Fw = euler_flux(EulerState{xg, moments_from_primitive(1, rho, uw, T)});
  for (int i = 0; i < 3; ++i)
    CHECK_THAT(Fw(i, 0), WithinAbs(F(i, 0) + rho(i) * w, 1e-13));
}

TEST_CASE("kinetic flux moments of the maxwellian equal the euler flux") {
  auto s = wave_state(16);
  auto vg = make_velocity_grid(1, 256, 8.0);
  auto M = maxwellian(s.U, vg, s.grid);
  Eigen::MatrixXd kinetic(16, 3);
  for (int i = 0; i < 16; ++i)
    kinetic.row(i) =
        (M.values.row(i).transpose() * vg.vx).matrix().transpose() * vg.phi_w;
  auto F = euler_flux(s);
  CHECK((kinetic - F).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("euler flux rejects inadmissible states") {
  auto xg = make_spatial_grid(1);
  Eigen::ArrayXd rho(1), E(1);
  Eigen::ArrayXXd m(1, 1);
  rho << 1.0;
  m << 2.0;
  E << 0.5;  // E < rho u^2 / 2
  EulerState bad{xg, make_moments(1, rho, m, E)};
  CHECK_THROWS_AS(euler_flux(bad), std::domain_error);
}

TEST_CASE("chapman-enskog correction") {
  SECTION("constant state has exactly zero correction") {
    auto xg = make_spatial_grid(8);
    Eigen::ArrayXd rho = Eigen::ArrayXd::Constant(8, 1.3);
    Eigen::ArrayXXd u = Eigen::ArrayXXd::Constant(8, 1, 0.4);
    Eigen::ArrayXd T = Eigen::ArrayXd::Constant(8, 0.9);
    EulerState s{xg, moments_from_primitive(1, rho, u, T)};
    auto g = chapman_enskog_g(s, make_velocity_grid(1, 64, 8.0), mu_rho);
    CHECK(linf_norm(g) < 1e-14);  // fp-contracted stencil of a constant
  }
  SECTION("correction carries no conserved moments, dv = 1") {
    auto s = wave_state(32);
    auto g = chapman_enskog_g(s, make_velocity_grid(1, 128, 8.0), mu_rho);
    CHECK(moments(g).packed().cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("correction carries no conserved moments, dv = 2 with shear") {
    auto xg = make_spatial_grid(32);
    Eigen::ArrayXd rho = Eigen::ArrayXd::Constant(32, 1.0);
    Eigen::ArrayXd T(32);
    Eigen::ArrayXXd u(32, 2);
    for (int i = 0; i < 32; ++i) {
      const double x = xg.coord(i);
      T(i) = 1.0 + 0.2 * std::cos(2.0 * kPi * x);
      u(i, 0) = 0.1 * std::sin(2.0 * kPi * x);
      u(i, 1) = 0.15 * std::cos(2.0 * kPi * x);
    }
    EulerState s{xg, moments_from_primitive(2, rho, u, T)};
    auto g = chapman_enskog_g(s, make_velocity_grid(2, 48, 8.0), mu_rho);
    CHECK(moments(g).packed().cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("uniform temperature leaves only the strain term, dv = 2") {
    // pure shear u_y(x), constant T: g = -(M/mu) Vx Vy du_y/dx
    auto xg = make_spatial_grid(64);
    Eigen::ArrayXd rho = Eigen::ArrayXd::Constant(64, 1.0);
    Eigen::ArrayXd T = Eigen::ArrayXd::Constant(64, 1.0);
    Eigen::ArrayXXd u = Eigen::ArrayXXd::Zero(64, 2);
    for (int i = 0; i < 64; ++i) u(i, 1) = 0.2 * std::sin(2.0 * kPi * xg.coord(i));
    EulerState s{xg, moments_from_primitive(2, rho, u, T)};
    auto vg = make_velocity_grid(2, 32, 7.0);
    auto g = chapman_enskog_g(s, vg, mu_rho);
    auto M = maxwellian(s.U, vg, xg);
    // 4th-order derivative of the sine on 64 cells is accurate to ~1e-5
    for (int i : {0, 7, 21}) {
      const double duy = 0.2 * 2.0 * kPi * std::cos(2.0 * kPi * xg.coord(i));
      for (int k : {100, 300, 500}) {
        const double Vx = vg.vx(k);
        const double Vy = vg.vy(k) - u(i, 1);
        const double expect = -M.values(i, k) * Vx * Vy * duy;
        CHECK_THAT(g.values(i, k), WithinAbs(expect, 2e-5 * std::abs(expect) + 1e-14));
      }
    }
  }
  SECTION("heat-flux factor is odd in the centered velocity") {
    // u = 0: g(v)/M(v) must be odd across the paired grid nodes
    auto s = wave_state(32);
    auto vg = make_velocity_grid(1, 64, 8.0);
    auto g = chapman_enskog_g(s, vg, mu_rho);
    auto M = maxwellian(s.U, vg, s.grid);
    for (int i : {3, 17}) {
      for (int k = 1; k < 32; ++k) {
        const int kr = 64 - k;  // node with v_kr = -v_k
        REQUIRE(vg.vx(kr) == -vg.vx(k));
        const double lhs = g.values(i, k) / M.values(i, k);
        const double rhs = -g.values(i, kr) / M.values(i, kr);
        CHECK_THAT(lhs, WithinAbs(rhs, 1e-12 * (1.0 + std::abs(rhs))));
      }
    }
  }
}

TEST_CASE("strain rate is trace-free and symmetric") {
  auto xg = make_spatial_grid(16);
  Eigen::ArrayXd rho = Eigen::ArrayXd::Constant(16, 1.0);
  Eigen::ArrayXd T = Eigen::ArrayXd::Constant(16, 1.0);
  Eigen::ArrayXXd u(16, 2);
  for (int i = 0; i < 16; ++i) {
    u(i, 0) = 0.3 * std::sin(2.0 * kPi * xg.coord(i));
    u(i, 1) = 0.2 * std::cos(4.0 * kPi * xg.coord(i));
  }
  EulerState s{xg, moments_from_primitive(2, rho, u, T)};
  for (const auto& sig : strain_rate(s)) {
    CHECK(std::abs(sig.trace()) < 1e-13);
    CHECK(sig(0, 1) == sig(1, 0));
  }
}

TEST_CASE("well-prepared initialization") {
  auto vg = make_velocity_grid(1, 128, 8.0);
  auto s = wave_state(32, 1, 4.0);  // four-wave experiment profile

  SECTION("euler regime is exactly the maxwellian") {
    auto init = well_prepared_init(s, 0.0, InitRegime::euler, vg, mu_rho);
    auto M = maxwellian(s.U, vg, s.grid);
    CHECK(((init.f.values - M.values).abs()).maxCoeff() == 0.0);
    CHECK(init.clipped == 0);
  }
  SECTION("navier-stokes regime at small eps keeps the moments") {
    const double eps = 1e-5;
    auto init = well_prepared_init(s, eps, InitRegime::navier_stokes, vg, mu_rho);
    CHECK(init.clipped == 0);
    CHECK((moments(init.f).packed() - s.U.packed()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("experiment profile at eps = 0.1: valid state, clipped far tails reported") {
    auto init = well_prepared_init(s, 0.1, InitRegime::navier_stokes, vg, mu_rho);
    auto U = moments(init.f);
    CHECK(U.admissible());
    CHECK(init.min_value < -1e-12);  // the correction does dip negative
    CHECK(init.clipped > 0);
    // at this eps the correction overwhelms M around |V| ~ 2.3, so the
    // clip visibly shifts the moments; measured 0.24 on the energy row
    CHECK((U.packed() - s.U.packed()).cwiseAbs().maxCoeff() < 0.3);
  }
}

TEST_CASE("euler limit step") {
  auto vg = make_velocity_grid(1, 64, 8.0);

  SECTION("constant state is steady") {
    auto xg = make_spatial_grid(16);
    Eigen::ArrayXd rho = Eigen::ArrayXd::Constant(16, 1.0);
    Eigen::ArrayXXd u = Eigen::ArrayXXd::Zero(16, 1);
    Eigen::ArrayXd T = Eigen::ArrayXd::Constant(16, 1.0);
    auto U0 = moments_from_primitive(1, rho, u, T);
    const auto& sc = find_scheme("IMEX-BDF2");
    auto h = make_euler_history(sc, {U0, U0}, xg, vg, TransportMethod::weno5, 1e-3);
    auto U1 = euler_limit_step(sc, h);
    CHECK((U1.packed() - U0.packed()).cwiseAbs().maxCoeff() < 1e-13);
  }
  SECTION("IMEX-BDF1 reduces to forward Euler on U") {
    auto s = wave_state(32);
    const auto& bdf1 = find_scheme("IMEX-BDF1");
    const double dt = 1e-3;
    auto h = make_euler_history(bdf1, {s.U}, s.grid, vg, TransportMethod::weno5, dt);
    auto U1 = euler_limit_step(bdf1, h);
    auto expect =
        (s.U.packed() -
         dt * kinetic_flux_divergence(s.U, s.grid, vg, TransportMethod::weno5))
            .eval();
    CHECK((U1.packed() - expect).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("kinetic solver at eps -> 0 follows the limit scheme") {
    // reduced version of the acceptance test: 5 steps, BDF2, weno5
    auto s = wave_state(32, 1, 4.0);
    auto vg2 = make_velocity_grid(1, 32, 8.0);
    ProblemSpec p;
    p.eps = 1e-12;
    p.model = CollisionModel::bgk;
    p.mu = mu_rho;
    const auto& sc = find_scheme("IMEX-BDF2");
    const double dt = 1e-3;

    auto eh = make_euler_history(sc, {s.U, s.U}, s.grid, vg2, p.transport, dt);
    auto M0 = maxwellian(s.U, vg2, s.grid);
    auto kh = make_history(sc, {M0, M0}, p, dt);

    for (int step = 0; step < 5; ++step) {
      advance_euler(sc, eh);
      advance(sc, kh, p);
      const double rel = (kh.slots[0].U.packed() - eh.U[0].packed()).cwiseAbs().maxCoeff() /
                         eh.U[0].packed().cwiseAbs().maxCoeff();
      INFO("step " << step);
      CHECK(rel < 1e-8);
    }
  }
}

TEST_CASE("ns diffusion flux") {
  SECTION("uniform state has zero diffusion flux") {
    auto xg = make_spatial_grid(8);
    Eigen::ArrayXd rho = Eigen::ArrayXd::Constant(8, 1.0);
    Eigen::ArrayXXd u = Eigen::ArrayXXd::Constant(8, 1, 0.3);
    Eigen::ArrayXd T = Eigen::ArrayXd::Constant(8, 1.0);
    EulerState s{xg, moments_from_primitive(1, rho, u, T)};
    CHECK(ns_diffusion(s, mu_rho).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("prandtl number is 5/(dv+2)") {
    CHECK_THAT(prandtl_number(1), WithinAbs(5.0 / 3.0, 1e-15));
    CHECK_THAT(prandtl_number(2), WithinAbs(5.0 / 4.0, 1e-15));
    CHECK_THAT(prandtl_number(3), WithinAbs(1.0, 1e-15));
  }
  SECTION("dv = 1 flux is heat conduction alone") {
    auto s = wave_state(32);
    auto D = ns_diffusion(s, mu_rho);
    CHECK(D.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(D.col(1).cwiseAbs().maxCoeff() == 0.0);  // sigma = 0 in 1D
    CHECK(D.col(2).cwiseAbs().maxCoeff() > 0.1);
  }
}

TEST_CASE("measured kinetic deviation approaches the chapman-enskog form") {
  // single-point version of the slope study: BGK, dv = 1, eps = 1e-4
  auto vg = make_velocity_grid(1, 64, 8.0);
  auto s = wave_state(16, 1, 1.0);
  ProblemSpec p;
  p.eps = 1e-4;
  p.model = CollisionModel::bgk;
  p.mu = mu_rho;
  const auto& sc = find_scheme("IMEX-BDF2");
  const double dt = 2e-3;

  auto init = well_prepared_init(s, p.eps, InitRegime::navier_stokes, vg, mu_rho);
  // the non-hydrodynamic part of any bootstrap error is damped by the
  // stiff solve within a few steps, so a modest target suffices
  BootstrapOptions bopt;
  bopt.target_abs = 1e-7 * linf_norm(init.f);
  auto boot = bootstrap(sc, init.f, p, dt, bopt);
  auto tr = run(sc, std::move(boot.history), p, 20);

  const auto& f = tr.history.slots[0].f;
  auto U = moments(f);
  auto M = maxwellian(U, vg, s.grid);
  DistributionField g_num = like(f);
  g_num.values = (f.values - M.values) / p.eps;
  auto g_ce = chapman_enskog_g(EulerState{s.grid, U}, vg, mu_rho);
  DistributionField diff = like(f);
  diff.values = g_num.values - g_ce.values;
  const double rel = l1_norm(diff) / l1_norm(g_ce);
  INFO("relative L1 deviation " << rel);
  CHECK(rel < 0.2);
}
