#pragma once

#include "kimex/field.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace kimex {

/// Conserved moments (rho, rho*u, E) per spatial cell, dim velocity
/// components. Temperature closure: E = rho |u|^2 / 2 + (dim/2) rho T.
struct MomentSet {
  int dim = 1;
  Eigen::ArrayXd rho;
  Eigen::ArrayXXd mom;  // n_x rows, dim cols
  Eigen::ArrayXd energy;
  std::vector<int> degenerate;  // cells with rho <= 0 or T <= 0

  int cells() const { return static_cast<int>(rho.size()); }

  Eigen::ArrayXXd velocity() const { return mom.colwise() / rho; }

  Eigen::ArrayXd temperature() const {
    Eigen::ArrayXd usq = Eigen::ArrayXd::Zero(rho.size());
    for (int d = 0; d < dim; ++d) usq += mom.col(d).square() / rho.square();
    return (2.0 * energy - rho * usq) / (dim * rho);
  }

  Eigen::ArrayXd pressure() const { return rho * temperature(); }

  bool admissible() const { return degenerate.empty(); }

  // packed (2+dim)-column view, same layout as VelocityGrid::phi_w moments
  Eigen::MatrixXd packed() const {
    Eigen::MatrixXd m(rho.size(), 2 + dim);
    m.col(0) = rho.matrix();
    for (int d = 0; d < dim; ++d) m.col(1 + d) = mom.col(d).matrix();
    m.col(1 + dim) = energy.matrix();
    return m;
  }
};

inline MomentSet moments_from_packed(const Eigen::MatrixXd& m, int dim) {
  MomentSet out;
  out.dim = dim;
  out.rho = m.col(0).array();
  out.mom.resize(m.rows(), dim);
  for (int d = 0; d < dim; ++d) out.mom.col(d) = m.col(1 + d).array();
  out.energy = m.col(1 + dim).array();
  const auto T = out.temperature();
  for (int i = 0; i < m.rows(); ++i)
    if (!(out.rho(i) > 0.0) || !(T(i) > 0.0)) out.degenerate.push_back(i);
  return out;
}

inline MomentSet moments(const DistributionField& f) {
  if (!f.values.isFinite().all())
    throw std::domain_error("moments: field contains non-finite values");
  return moments_from_packed(f.values.matrix() * f.v.phi_w, f.v.dim);
}

inline MomentSet make_moments(int dim, Eigen::ArrayXd rho, Eigen::ArrayXXd mom,
                              Eigen::ArrayXd energy) {
  MomentSet m;
  m.dim = dim;
  m.rho = std::move(rho);
  m.mom = std::move(mom);
  m.energy = std::move(energy);
  const auto T = m.temperature();
  for (int i = 0; i < m.rho.size(); ++i)
    if (!(m.rho(i) > 0.0) || !(T(i) > 0.0)) m.degenerate.push_back(i);
  return m;
}

// moments from primitive (rho, u, T)
inline MomentSet moments_from_primitive(int dim, const Eigen::ArrayXd& rho,
                                        const Eigen::ArrayXXd& u,
                                        const Eigen::ArrayXd& T) {
  Eigen::ArrayXd usq = Eigen::ArrayXd::Zero(rho.size());
  for (int d = 0; d < dim; ++d) usq += u.col(d).square();
  Eigen::ArrayXXd mom(rho.size(), dim);
  for (int d = 0; d < dim; ++d) mom.col(d) = rho * u.col(d);
  Eigen::ArrayXd E = 0.5 * rho * usq + 0.5 * dim * rho * T;
  return make_moments(dim, rho, mom, E);
}

/// Pointwise sample of the local Maxwellian
///   M(rho,u,T) = rho / (2 pi T)^{dim/2} exp(-|v-u|^2 / (2T)).
inline DistributionField maxwellian(const MomentSet& mom, const VelocityGrid& grid,
                                    const SpatialGrid& xgrid) {
  if (!mom.admissible())
    throw std::domain_error("maxwellian: nonpositive rho or T in cell " +
                            std::to_string(mom.degenerate.front()));
  if (mom.dim != grid.dim)
    throw std::invalid_argument("maxwellian: dimension mismatch");
  DistributionField f = make_field(grid, xgrid);
  const auto u = mom.velocity();
  const auto T = mom.temperature();
  for (int i = 0; i < xgrid.n; ++i) {
    const double pref = mom.rho(i) / std::pow(2.0 * std::numbers::pi * T(i), grid.dim / 2.0);
    Eigen::ArrayXd arg = (grid.vx - u(i, 0)).square();
    if (grid.dim == 2) arg += (grid.vy - u(i, 1)).square();
    f.values.row(i) = pref * (-arg / (2.0 * T(i))).exp().transpose();
  }
  return f;
}

/// H(f) = sum_k w f_k log f_k per cell, with 0 log 0 = 0.
/// Negative entries are an error; use entropy_clamped for run diagnostics.
inline Eigen::ArrayXd entropy(const DistributionField& f) {
  for (int i = 0; i < f.cells(); ++i)
    for (int k = 0; k < f.nodes(); ++k)
      if (f.values(i, k) < 0.0)
        throw std::domain_error("entropy: negative value at cell " + std::to_string(i) +
                                ", velocity node " + std::to_string(k));
  Eigen::ArrayXd h = Eigen::ArrayXd::Zero(f.cells());
  for (int i = 0; i < f.cells(); ++i) {
    double acc = 0.0;
    for (int k = 0; k < f.nodes(); ++k) {
      const double v = f.values(i, k);
      if (v > 0.0) acc += v * std::log(v);
    }
    h(i) = acc * f.v.weight();
  }
  return h;
}

// entropy with negative values treated as empty nodes (diagnostics only)
inline Eigen::ArrayXd entropy_clamped(const DistributionField& f) {
  Eigen::ArrayXd h = Eigen::ArrayXd::Zero(f.cells());
  for (int i = 0; i < f.cells(); ++i) {
    double acc = 0.0;
    for (int k = 0; k < f.nodes(); ++k) {
      const double v = f.values(i, k);
      if (v > 0.0) acc += v * std::log(v);
    }
    h(i) = acc * f.v.weight();
  }
  return h;
}

}  // namespace kimex
