#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace kimex {

/// Uniform tensor-product velocity grid on [-v_max, v_max)^dim with
/// nodes v_j = -v_max + j*dv and midpoint weights dv^dim.
struct VelocityGrid {
  int dim = 1;   // velocity dimension (1 or 2)
  int n = 0;     // points per dimension
  double v_max = 0.0;
  double dv = 0.0;

  Eigen::ArrayXd vx, vy;    // coordinates per flat node (vy all zero for dim 1)
  Eigen::ArrayXd kin;       // |v|^2 / 2 per node
  Eigen::MatrixXd phi_w;    // total x (2+dim): weighted invariants [1, v, |v|^2/2]*w

  int total() const { return dim == 1 ? n : n * n; }
  double weight() const { return std::pow(dv, dim); }
  double axis_coord(int j) const { return -v_max + j * dv; }
};

inline VelocityGrid make_velocity_grid(int dim, int n, double v_max) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("velocity grid: dim must be 1 or 2");
  if (n < 2 || v_max <= 0)
    throw std::invalid_argument("velocity grid: need n >= 2 and v_max > 0");
  VelocityGrid g;
  g.dim = dim;
  g.n = n;
  g.v_max = v_max;
  g.dv = 2.0 * v_max / n;
  const int total = g.total();
  g.vx.resize(total);
  g.vy = Eigen::ArrayXd::Zero(total);
  for (int k = 0; k < total; ++k) {
    if (dim == 1) {
      g.vx(k) = g.axis_coord(k);
    } else {
      g.vx(k) = g.axis_coord(k % n);
      g.vy(k) = g.axis_coord(k / n);
    }
  }
  g.kin = 0.5 * (g.vx.square() + g.vy.square());
  const double w = g.weight();
  g.phi_w.resize(total, 2 + dim);
  g.phi_w.col(0) = Eigen::VectorXd::Constant(total, w);
  g.phi_w.col(1) = (g.vx * w).matrix();
  if (dim == 2) g.phi_w.col(2) = (g.vy * w).matrix();
  g.phi_w.col(1 + dim) = (g.kin * w).matrix();
  return g;
}

inline bool same_grid(const VelocityGrid& a, const VelocityGrid& b) {
  return a.dim == b.dim && a.n == b.n && a.v_max == b.v_max;
}

/// Periodic spatial grid on [0,1) with nodes x_i = i/n.
struct SpatialGrid {
  int n = 1;
  double dx = 1.0;
  double coord(int i) const { return i * dx; }
};

inline SpatialGrid make_spatial_grid(int n) {
  if (n < 1) throw std::invalid_argument("spatial grid: n must be >= 1");
  return SpatialGrid{n, 1.0 / n};
}

}  // namespace kimex
