#pragma once

// Brute-force discrete-velocity quadrature of the 2D Maxwell-molecule
// collision integral, independent of the spectral path. Midpoint rule over
// the collision partner, trapezoid over the scattering angle, relative
// velocities truncated at the same radius R the spectral kernel uses.
// Off-grid post-collision values come from an analytic density when one is
// supplied, else from bicubic interpolation of the gridded field.

#include "kimex/boltzmann.hpp"
#include "kimex/field.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace kimex::testing {

using Density2D = std::function<double(double, double)>;

// Catmull-Rom bicubic interpolation of cell values, zero outside the box
class BicubicField {
 public:
  explicit BicubicField(const DistributionField& f) : f_(f) {}

  double operator()(double x, double y) const {
    const auto& g = f_.v;
    const double sx = (x + g.v_max) / g.dv;
    const double sy = (y + g.v_max) / g.dv;
    const int ix = static_cast<int>(std::floor(sx));
    const int iy = static_cast<int>(std::floor(sy));
    const double tx = sx - ix, ty = sy - iy;
    double rows[4];
    for (int j = 0; j < 4; ++j) {
      double p[4];
      for (int i = 0; i < 4; ++i) p[i] = at(ix - 1 + i, iy - 1 + j);
      rows[j] = catmull(p, tx);
    }
    return catmull(rows, ty);
  }

 private:
  double at(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= f_.v.n || iy >= f_.v.n) return 0.0;
    return f_.values(0, ix + f_.v.n * iy);
  }
  static double catmull(const double p[4], double t) {
    return p[1] + 0.5 * t * (p[2] - p[0] +
                             t * (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3] +
                                  t * (3.0 * (p[1] - p[2]) + p[3] - p[0])));
  }
  const DistributionField& f_;
};

/// Q(f,f)(v_i) = sum_j w_j int_{S^1} b0 [f(v')f(v'_*) - f(v_i)f(v_j)] dn,
/// restricted to |v_i - v_j| <= R.
inline DistributionField dvm_collision(const DistributionField& f, double b0,
                                       double trunc_radius, int n_angles,
                                       const Density2D& density) {
  const auto& g = f.v;
  DistributionField out = like(f);
  const double w = g.weight();
  const double dtheta = 2.0 * std::numbers::pi / n_angles;
  const double two_pi_b0 = 2.0 * std::numbers::pi * b0;
  const int total = g.total();

  std::vector<double> cs(n_angles), sn(n_angles);
  for (int q = 0; q < n_angles; ++q) {
    cs[q] = std::cos(q * dtheta);
    sn[q] = std::sin(q * dtheta);
  }

  for (int i = 0; i < total; ++i) {
    const double vx = g.vx(i), vy = g.vy(i);
    const double fi = f.values(0, i);
    double acc = 0.0;
    for (int j = 0; j < total; ++j) {
      const double gx = vx - g.vx(j), gy = vy - g.vy(j);
      const double gn = std::hypot(gx, gy);
      if (gn > trunc_radius) continue;
      const double fj = f.values(0, j);
      double gain = 0.0;
      for (int q = 0; q < n_angles; ++q) {
        const double sx = gn * cs[q], sy = gn * sn[q];
        const double vpx = vx - 0.5 * (gx - sx), vpy = vy - 0.5 * (gy - sy);
        const double vsx = vx - 0.5 * (gx + sx), vsy = vy - 0.5 * (gy + sy);
        gain += density(vpx, vpy) * density(vsx, vsy);
      }
      acc += b0 * dtheta * gain - two_pi_b0 * fi * fj;
    }
    out.values(0, i) = acc * w;
  }
  return out;
}

inline DistributionField dvm_collision(const DistributionField& f, double b0,
                                       double trunc_radius, int n_angles) {
  BicubicField interp(f);
  return dvm_collision(f, b0, trunc_radius, n_angles,
                       [&interp](double x, double y) { return interp(x, y); });
}

}  // namespace kimex::testing
