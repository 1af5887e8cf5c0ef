#pragma once

#include "kimex/grid.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace kimex {

/// Discrete distribution f(x_i, v_k). values(i, k) with i the spatial cell
/// and k the flat velocity node; a column holds one velocity node over all
/// cells. Homogeneous problems use a single spatial cell.
struct DistributionField {
  VelocityGrid v;
  SpatialGrid x;
  Eigen::ArrayXXd values;  // n_x rows, v.total() cols

  int cells() const { return x.n; }
  int nodes() const { return v.total(); }
};

inline DistributionField make_field(const VelocityGrid& v, const SpatialGrid& x) {
  DistributionField f;
  f.v = v;
  f.x = x;
  f.values = Eigen::ArrayXXd::Zero(x.n, v.total());
  return f;
}

inline DistributionField like(const DistributionField& f) { return make_field(f.v, f.x); }

inline void check_compatible(const DistributionField& a, const DistributionField& b,
                             const std::string& what) {
  if (!same_grid(a.v, b.v) || a.x.n != b.x.n)
    throw std::invalid_argument(what + ": fields live on different grids");
}

// discrete L1 norm, weighted by dx * dv^dim
inline double l1_norm(const DistributionField& f) {
  return f.values.abs().sum() * f.x.dx * f.v.weight();
}

inline double linf_norm(const DistributionField& f) {
  return f.values.abs().maxCoeff();
}

}  // namespace kimex
