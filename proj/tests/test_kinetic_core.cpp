#include "kimex/moments.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace kimex;
using Catch::Matchers::WithinAbs;

namespace {

MomentSet uniform_moments(int dim, double rho, Eigen::ArrayXd u, double T, int nx = 1) {
  Eigen::ArrayXd r = Eigen::ArrayXd::Constant(nx, rho);
  Eigen::ArrayXXd uu(nx, dim);
  for (int d = 0; d < dim; ++d) uu.col(d) = u(d);
  Eigen::ArrayXd TT = Eigen::ArrayXd::Constant(nx, T);
  return moments_from_primitive(dim, r, uu, TT);
}

}  // namespace

TEST_CASE("moments of a sampled maxwellian, dv=1") {
  auto vg = make_velocity_grid(1, 512, 8.0);
  auto xg = make_spatial_grid(1);
  auto U0 = uniform_moments(1, 1.0, Eigen::ArrayXd::Zero(1), 1.0);
  auto f = maxwellian(U0, vg, xg);
  auto U = moments(f);
  CHECK_THAT(U.rho(0), WithinAbs(1.0, 1e-10));
  CHECK_THAT(U.mom(0, 0), WithinAbs(0.0, 1e-10));
  CHECK_THAT(U.energy(0), WithinAbs(0.5, 1e-10));
}

TEST_CASE("zero field has zero moments and a flagged degenerate cell") {
  auto vg = make_velocity_grid(1, 32, 6.0);
  auto f = make_field(vg, make_spatial_grid(1));
  auto U = moments(f);
  CHECK(U.rho(0) == 0.0);
  CHECK(U.energy(0) == 0.0);
  CHECK_FALSE(U.admissible());
  REQUIRE(U.degenerate.size() == 1);
}

TEST_CASE("dv=2 energy closed form: E = rho|u|^2/2 + rho T") {
  auto vg = make_velocity_grid(2, 64, 8.0);
  auto xg = make_spatial_grid(1);
  Eigen::ArrayXd u(2);
  u << 1.0, 1.0;
  auto U0 = uniform_moments(2, 2.0, u, 1.0);
  auto f = maxwellian(U0, vg, xg);
  auto U = moments(f);
  CHECK_THAT(U.energy(0), WithinAbs(4.0, 1e-9));  // 0.5*2*2 + 2*1
}

TEST_CASE("maxwellian peak value at v = u is rho/(2 pi T)^{dv/2}") {
  auto vg = make_velocity_grid(2, 64, 8.0);
  auto xg = make_spatial_grid(1);
  auto U0 = uniform_moments(2, 1.0, Eigen::ArrayXd::Zero(2), 1.0);
  auto f = maxwellian(U0, vg, xg);
  // v = 0 is a grid node (even n)
  const int k0 = (vg.n / 2) + vg.n * (vg.n / 2);
  CHECK(vg.vx(k0) == 0.0);
  CHECK(vg.vy(k0) == 0.0);
  CHECK_THAT(f.values(0, k0), WithinAbs(1.0 / (2.0 * std::numbers::pi), 1e-14));
}

TEST_CASE("moment round trip across parameter sweep") {
  auto vg = make_velocity_grid(1, 128, 8.0);
  auto xg = make_spatial_grid(1);
  for (double rho : {0.3, 1.0, 2.5}) {
    for (double u : {-0.8, 0.0, 0.5}) {
      for (double T : {0.4, 1.0}) {
        Eigen::ArrayXd uu(1);
        uu << u;
        auto U0 = uniform_moments(1, rho, uu, T);
        auto U = moments(maxwellian(U0, vg, xg));
        CHECK_THAT(U.rho(0), WithinAbs(rho, 1e-9));
        CHECK_THAT(U.mom(0, 0), WithinAbs(rho * u, 1e-9));
        CHECK_THAT(U.energy(0), WithinAbs(0.5 * rho * u * u + 0.5 * rho * T, 1e-9));
      }
    }
  }
}

TEST_CASE("maxwellian rejects nonpositive temperature or density") {
  auto vg = make_velocity_grid(1, 32, 6.0);
  auto xg = make_spatial_grid(1);
  Eigen::ArrayXd rho(1), E(1);
  Eigen::ArrayXXd m(1, 1);
  rho << 1.0;
  m << 0.0;
  E << -0.5;  // T < 0
  auto bad = make_moments(1, rho, m, E);
  CHECK_FALSE(bad.admissible());
  CHECK_THROWS_AS(maxwellian(bad, vg, xg), std::domain_error);
}

TEST_CASE("bracket is linear in the field") {
  auto vg = make_velocity_grid(1, 64, 6.0);
  auto xg = make_spatial_grid(4);
  auto f = make_field(vg, xg);
  auto g = make_field(vg, xg);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < vg.total(); ++k) {
      f.values(i, k) = std::exp(-0.5 * vg.vx(k) * vg.vx(k)) * (1.0 + 0.1 * i);
      g.values(i, k) = std::exp(-0.3 * (vg.vx(k) - 1) * (vg.vx(k) - 1)) * (1.0 - 0.05 * i);
    }
  const double al = 1.7, be = -0.4;
  DistributionField h = like(f);
  h.values = al * f.values + be * g.values;
  auto Uh = moments(h).packed();
  auto Ulin = (al * moments(f).packed() + be * moments(g).packed()).eval();
  CHECK((Uh - Ulin).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("entropy") {
  auto vg = make_velocity_grid(1, 128, 8.0);
  auto xg = make_spatial_grid(1);

  SECTION("zero field has zero entropy by the 0 log 0 convention") {
    auto f = make_field(vg, xg);
    CHECK(entropy(f)(0) == 0.0);
  }
  SECTION("negative entry is an error naming the node") {
    auto f = make_field(vg, xg);
    f.values(0, 7) = -1e-3;
    CHECK_THROWS_WITH(entropy(f), Catch::Matchers::ContainsSubstring("node 7"));
  }
  SECTION("maxwellian minimizes entropy among equal-moment states") {
    // two-bump state vs the maxwellian with the same moments
    auto f = make_field(vg, xg);
    for (int k = 0; k < vg.total(); ++k) {
      const double v = vg.vx(k);
      f.values(0, k) = 0.5 * (std::exp(-8.0 * (v - 1.5) * (v - 1.5)) +
                              std::exp(-8.0 * (v + 1.5) * (v + 1.5)));
    }
    auto U = moments(f);
    auto M = maxwellian(U, vg, xg);
    CHECK(entropy(M)(0) < entropy(f)(0));
  }
}

TEST_CASE("velocity grid weights sum to the box volume") {
  auto g1 = make_velocity_grid(1, 77, 5.0);
  CHECK_THAT(g1.total() * g1.weight(), WithinAbs(10.0, 1e-12));
  auto g2 = make_velocity_grid(2, 24, 7.0);
  CHECK_THAT(g2.total() * g2.weight(), WithinAbs(14.0 * 14.0, 1e-10));
}
