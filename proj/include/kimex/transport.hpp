#pragma once

#include "kimex/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kimex {

enum class TransportMethod { weno5, upwind1, central2 };

inline TransportMethod transport_from_string(const std::string& s) {
  if (s == "weno5") return TransportMethod::weno5;
  if (s == "upwind1") return TransportMethod::upwind1;
  if (s == "central2") return TransportMethod::central2;
  throw std::invalid_argument("unknown transport method: " + s);
}

inline const char* to_string(TransportMethod m) {
  switch (m) {
    case TransportMethod::weno5: return "weno5";
    case TransportMethod::upwind1: return "upwind1";
    case TransportMethod::central2: return "central2";
  }
  return "?";
}

namespace detail {

constexpr double kWenoEps = 1e-6;  // smoothness regularizer

// Upwind-biased WENO5 face value from the five cells {m2,m1,c,p1,p2}
// around the face, ordered in the wind direction.
inline double weno5_face(double m2, double m1, double c, double p1, double p2) {
  const double q0 = (2.0 * m2 - 7.0 * m1 + 11.0 * c) / 6.0;
  const double q1 = (-m1 + 5.0 * c + 2.0 * p1) / 6.0;
  const double q2 = (2.0 * c + 5.0 * p1 - p2) / 6.0;

  const double b0 = (13.0 / 12.0) * std::pow(m2 - 2.0 * m1 + c, 2) +
                    0.25 * std::pow(m2 - 4.0 * m1 + 3.0 * c, 2);
  const double b1 = (13.0 / 12.0) * std::pow(m1 - 2.0 * c + p1, 2) +
                    0.25 * std::pow(m1 - p1, 2);
  const double b2 = (13.0 / 12.0) * std::pow(c - 2.0 * p1 + p2, 2) +
                    0.25 * std::pow(3.0 * c - 4.0 * p1 + p2, 2);

  const double w0 = 0.1 / std::pow(kWenoEps + b0, 2);
  const double w1 = 0.6 / std::pow(kWenoEps + b1, 2);
  const double w2 = 0.3 / std::pow(kWenoEps + b2, 2);
  return (w0 * q0 + w1 * q1 + w2 * q2) / (w0 + w1 + w2);
}

}  // namespace detail

/// Discrete advection term v_x * d f / d x on the periodic grid.
/// weno5 is a finite-difference flux form with sign-of-v upwinding (the
/// advection speed per velocity node is the constant v_x, so the flux
/// splitting degenerates to pure upwinding); conservation then holds by
/// telescoping of the face fluxes.
inline DistributionField advection_derivative(const DistributionField& f,
                                              TransportMethod method) {
  const int nx = f.x.n;
  const int stencil = method == TransportMethod::weno5 ? 5
                      : method == TransportMethod::central2 ? 3
                                                            : 2;
  if (nx < stencil)
    throw std::invalid_argument("advection_derivative: stencil wider than grid (n_x=" +
                                std::to_string(nx) + ")");
  DistributionField out = like(f);
  const double dx = f.x.dx;
  const auto wrap = [nx](int i) { return ((i % nx) + nx) % nx; };

  for (int k = 0; k < f.nodes(); ++k) {
    const double v = f.v.vx(k);
    if (v == 0.0) continue;
    switch (method) {
      case TransportMethod::upwind1:
        for (int i = 0; i < nx; ++i) {
          const double d = v > 0 ? f.values(i, k) - f.values(wrap(i - 1), k)
                                 : f.values(wrap(i + 1), k) - f.values(i, k);
          out.values(i, k) = v * d / dx;
        }
        break;
      case TransportMethod::central2:
        for (int i = 0; i < nx; ++i)
          out.values(i, k) =
              v * (f.values(wrap(i + 1), k) - f.values(wrap(i - 1), k)) / (2.0 * dx);
        break;
      case TransportMethod::weno5: {
        // face flux at i+1/2 for every i, then difference
        Eigen::ArrayXd face(nx);
        for (int i = 0; i < nx; ++i) {
          if (v > 0) {
            face(i) = v * detail::weno5_face(f.values(wrap(i - 2), k),
                                             f.values(wrap(i - 1), k), f.values(i, k),
                                             f.values(wrap(i + 1), k),
                                             f.values(wrap(i + 2), k));
          } else {
            face(i) = v * detail::weno5_face(f.values(wrap(i + 3), k),
                                             f.values(wrap(i + 2), k),
                                             f.values(wrap(i + 1), k), f.values(i, k),
                                             f.values(wrap(i - 1), k));
          }
        }
        for (int i = 0; i < nx; ++i)
          out.values(i, k) = (face(i) - face(wrap(i - 1))) / dx;
        break;
      }
    }
  }
  return out;
}

}  // namespace kimex
