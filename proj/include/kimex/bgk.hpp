#pragma once

#include "kimex/moments.hpp"

#include <stdexcept>
#include <string>

namespace kimex {

/// Collision frequency mu(x): either proportional to density (mu = kappa*rho)
/// or a constant.
struct FrequencyPolicy {
  enum class Mode { density_proportional, constant };
  Mode mode = Mode::density_proportional;
  double value = 1.0;  // kappa, or the constant
};

inline FrequencyPolicy frequency_from_string(const std::string& s) {
  if (s == "rho") return {FrequencyPolicy::Mode::density_proportional, 1.0};
  if (s.rfind("rho*", 0) == 0)
    return {FrequencyPolicy::Mode::density_proportional, std::stod(s.substr(4))};
  if (s.rfind("const:", 0) == 0)
    return {FrequencyPolicy::Mode::constant, std::stod(s.substr(6))};
  throw std::invalid_argument("frequency policy: expected 'rho', 'rho*<k>' or 'const:<v>', got " + s);
}

inline Eigen::ArrayXd collision_frequency(const FrequencyPolicy& pol, const MomentSet& U) {
  if (pol.mode == FrequencyPolicy::Mode::constant)
    return Eigen::ArrayXd::Constant(U.cells(), pol.value);
  return pol.value * U.rho;
}

/// Q_BGK(f) = mu(x) (M[f] - f)
inline DistributionField q_bgk(const DistributionField& f, const FrequencyPolicy& pol) {
  const MomentSet U = moments(f);
  if (!U.admissible())
    throw std::domain_error("q_bgk: degenerate moments in cell " +
                            std::to_string(U.degenerate.front()));
  const Eigen::ArrayXd mu = collision_frequency(pol, U);
  DistributionField out = like(f);
  out.values = (maxwellian(U, f.v, f.x).values - f.values).colwise() * mu;
  return out;
}

/// Closed-form solve of the implicit relaxation step:
///
///   f = (eps * explicit_part + dt c_m1 mu M[target]) / (eps + c_m1 mu dt)
///
/// target_moments are the moments of f^{n+1}, known explicitly from the
/// conservative moment update, and mu_next is evaluated from them. The
/// solve leaves the moments at target up to the sampling defect of the
/// discrete Maxwellian.
inline DistributionField implicit_relaxation_solve(const DistributionField& explicit_part,
                                                   const MomentSet& target_moments,
                                                   const Eigen::ArrayXd& mu_next,
                                                   double eps, double dt, double c_m1) {
  if (!target_moments.admissible())
    throw std::domain_error("implicit_relaxation_solve: degenerate target moments in cell " +
                            std::to_string(target_moments.degenerate.front()));
  const Eigen::ArrayXd denom = eps + c_m1 * dt * mu_next;
  if ((denom <= 0.0).any())
    throw std::domain_error("implicit_relaxation_solve: eps + c_m1 mu dt <= 0");
  const DistributionField M =
      maxwellian(target_moments, explicit_part.v, explicit_part.x);
  DistributionField out = like(explicit_part);
  out.values =
      (eps * explicit_part.values + (M.values.colwise() * (dt * c_m1 * mu_next)))
          .colwise() /
      denom;
  return out;
}

}  // namespace kimex
