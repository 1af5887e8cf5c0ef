#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace kimex {

using Rational = boost::rational<long long>;

inline double to_real(const Rational& r) { return boost::rational_cast<double>(r); }

inline std::vector<double> to_real(const std::vector<Rational>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_real(v[i]);
  return out;
}

/// An s-step IMEX linear multistep scheme
///
///   f^{n+1} = -sum_j a_j f^{n-j} - dt sum_j b_j (v.grad_x f)^{n-j}
///             + (dt/eps) [ sum_j c_j Q(f^{n-j}) + c_m1 Q(f^{n+1}) ]
///
/// with j = 0..s-1 and c_m1 != 0. Coefficients are kept as exact
/// rationals; the *_r members are the real-valued views.
struct ImexScheme {
  std::string name;
  int steps = 0;  // s
  int order = 0;  // declared order p
  std::vector<Rational> a, b, c;
  Rational c_m1;

  std::vector<double> a_r, b_r, c_r;
  double c_m1_r = 0.0;

  bool is_bdf() const {
    for (const auto& cj : c)
      if (cj != Rational(0)) return false;
    return true;
  }
};

namespace detail {

inline Rational factorial(int k) {
  long long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return Rational(f);
}

// (-j)^k as an exact rational, with 0^0 = 1
inline Rational neg_pow(int j, int k) {
  if (k == 0) return Rational(1);
  long long v = 1;
  for (int i = 0; i < k; ++i) v *= -j;
  return Rational(v);
}

}  // namespace detail

/// Residuals of the 2p+1 order conditions: entry 0 is the consistency row
/// 1 + sum_j a_j, and for each k = 1..p the pair
///   explicit:  [1/k! + sum_j a_j (-j)^k / k!] - sum_j b_j (-j)^{k-1}/(k-1)!
///   implicit:  [1/k! + sum_j a_j (-j)^k / k!]
///              - [c_m1/(k-1)! + sum_j c_j (-j)^{k-1}/(k-1)!]
/// A scheme has order >= p iff all residuals vanish.
inline std::vector<Rational> order_residuals_exact(const ImexScheme& s, int p) {
  if (p < 1) throw std::invalid_argument("order_residuals: p must be >= 1");
  std::vector<Rational> res;
  res.reserve(2 * p + 1);

  Rational consistency(1);
  for (const auto& aj : s.a) consistency += aj;
  res.push_back(consistency);

  for (int k = 1; k <= p; ++k) {
    Rational lhs = Rational(1) / detail::factorial(k);
    for (int j = 0; j < s.steps; ++j)
      lhs += s.a[j] * detail::neg_pow(j, k) / detail::factorial(k);

    Rational rhs_e(0);
    for (int j = 0; j < s.steps; ++j)
      rhs_e += s.b[j] * detail::neg_pow(j, k - 1) / detail::factorial(k - 1);

    Rational rhs_i = s.c_m1 / detail::factorial(k - 1);
    for (int j = 0; j < s.steps; ++j)
      rhs_i += s.c[j] * detail::neg_pow(j, k - 1) / detail::factorial(k - 1);

    res.push_back(lhs - rhs_e);
    res.push_back(lhs - rhs_i);
  }
  return res;
}

inline std::vector<double> order_residuals(const ImexScheme& s, int p) {
  auto exact = order_residuals_exact(s, p);
  return to_real(exact);
}

inline double max_order_residual(const ImexScheme& s, int p) {
  double m = 0.0;
  for (double r : order_residuals(s, p)) m = std::max(m, std::abs(r));
  return m;
}

inline bool has_order(const ImexScheme& s, int p) {
  return max_order_residual(s, p) < 1e-12;
}

/// Validating constructor for user-defined schemes.
inline ImexScheme make_scheme(std::string name, int order, std::vector<Rational> a,
                              std::vector<Rational> b, Rational c_m1,
                              std::vector<Rational> c) {
  ImexScheme s;
  s.name = std::move(name);
  s.steps = static_cast<int>(a.size());
  s.order = order;
  s.a = std::move(a);
  s.b = std::move(b);
  s.c = std::move(c);
  s.c_m1 = c_m1;
  if (s.steps < 1) throw std::invalid_argument(s.name + ": needs at least one step");
  if (s.b.size() != s.a.size() || s.c.size() != s.a.size())
    throw std::invalid_argument(s.name + ": a, b, c must all have length s");
  if (s.c_m1 == Rational(0))
    throw std::invalid_argument(s.name + ": c_{-1} must be nonzero");
  s.a_r = to_real(s.a);
  s.b_r = to_real(s.b);
  s.c_r = to_real(s.c);
  s.c_m1_r = to_real(s.c_m1);
  if (!has_order(s, 1))
    throw std::invalid_argument(s.name + ": scheme is not consistent");
  if (!has_order(s, s.order))
    throw std::invalid_argument(s.name + ": declared order " +
                                std::to_string(s.order) + " not satisfied");
  return s;
}

/// The twelve built-in schemes, orders one to five.
/// Two entries are normalized against the order conditions: IMEX-TVB4's
/// a_1 is 22753/8192 (the unique value passing the consistency row), and
/// IMEX-TVB3's implicit tuple is assigned as c_m1 = 1089/2048,
/// c = (-1139/12288, -367/6144, 1699/12288) — the unique assignment of
/// those four values that satisfies the order-3 conditions.
inline const std::vector<ImexScheme>& builtin_schemes() {
  static const std::vector<ImexScheme> schemes = [] {
    using R = Rational;
    std::vector<ImexScheme> v;
    v.push_back(make_scheme("IMEX-BDF1", 1, {R(-1)}, {R(1)}, R(1), {R(0)}));
    v.push_back(make_scheme("IMEX-CN2", 2, {R(-1), R(0)}, {R(3, 2), R(-1, 2)},
                            R(1, 2), {R(1, 2), R(0)}));
    v.push_back(make_scheme("IMEX-MCN2", 2, {R(-1), R(0)}, {R(3, 2), R(-1, 2)},
                            R(9, 16), {R(3, 8), R(1, 16)}));
    v.push_back(make_scheme("IMEX-BDF2", 2, {R(-4, 3), R(1, 3)},
                            {R(4, 3), R(-2, 3)}, R(2, 3), {R(0), R(0)}));
    v.push_back(make_scheme("IMEX-SG2", 2, {R(-3, 4), R(0), R(-1, 4)},
                            {R(3, 2), R(0), R(0)}, R(1), {R(0), R(0), R(1, 2)}));
    v.push_back(make_scheme("IMEX-BDF3", 3, {R(-18, 11), R(9, 11), R(-2, 11)},
                            {R(18, 11), R(-18, 11), R(6, 11)}, R(6, 11),
                            {R(0), R(0), R(0)}));
    v.push_back(make_scheme("IMEX-AD3", 3, {R(-1), R(0), R(0)},
                            {R(23, 12), R(-4, 3), R(5, 12)}, R(4661, 10000),
                            {R(15551, 30000), R(1949, 30000), R(-1483, 30000)}));
    v.push_back(make_scheme(
        "IMEX-TVB3", 3, {R(-3909, 2048), R(1367, 1024), R(-873, 2048)},
        {R(18463, 12288), R(-1271, 768), R(8233, 12288)}, R(1089, 2048),
        {R(-1139, 12288), R(-367, 6144), R(1699, 12288)}));
    v.push_back(make_scheme("IMEX-BDF4", 4,
                            {R(-48, 25), R(36, 25), R(-16, 25), R(3, 25)},
                            {R(48, 25), R(-72, 25), R(48, 25), R(-12, 25)},
                            R(12, 25), {R(0), R(0), R(0), R(0)}));
    v.push_back(make_scheme(
        "IMEX-TVB4", 4,
        {R(-21531, 8192), R(22753, 8192), R(-12245, 8192), R(2831, 8192)},
        {R(13261, 8192), R(-75029, 24576), R(54799, 24576), R(-15245, 24576)},
        R(4207, 8192), {R(-3567, 8192), R(697, 24576), R(4315, 24576), R(-41, 384)}));
    v.push_back(make_scheme(
        "IMEX-BDF5", 5,
        {R(-300, 137), R(300, 137), R(-200, 137), R(75, 137), R(-12, 137)},
        {R(300, 137), R(-600, 137), R(600, 137), R(-300, 137), R(60, 137)},
        R(60, 137), {R(0), R(0), R(0), R(0), R(0)}));
    v.push_back(make_scheme(
        "IMEX-TVB5", 5,
        {R(-13553, 4096), R(38121, 8192), R(-7315, 2048), R(6161, 4096),
         R(-2269, 8192)},
        {R(10306951, 5898240), R(-13656497, 2949120), R(1249949, 245760),
         R(-7937687, 2949120), R(3387361, 5898240)},
        R(4007, 8192),
        {R(-4118249, 5898240), R(768703, 2949120), R(47849, 245760),
         R(-725087, 2949120), R(502321, 5898240)}));
    return v;
  }();
  return schemes;
}

inline const ImexScheme& find_scheme(const std::string& name) {
  for (const auto& s : builtin_schemes())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown scheme: " + name);
}

struct ExtrapolationWeights {
  std::vector<double> weights;   // (b_j - c_j) / c_m1
  std::vector<double> lagrange;  // prod_{k != j} (k+1)/(k-j)
  double max_deviation = 0.0;
  bool matches = false;  // deviation within 1e-12 (full-order schemes)
};

/// Weights extrapolating the history to t^{n+1}. For schemes of full order
/// p = s these coincide with the Lagrange interpolation weights; the
/// deviation is reported as a diagnostic, non-matching is not fatal.
inline ExtrapolationWeights extrapolation_weights(const ImexScheme& s) {
  ExtrapolationWeights out;
  out.weights.resize(s.steps);
  out.lagrange.resize(s.steps);
  for (int j = 0; j < s.steps; ++j) {
    out.weights[j] = to_real((s.b[j] - s.c[j]) / s.c_m1);
    double prod = 1.0;
    for (int k = 0; k < s.steps; ++k) {
      if (k == j) continue;
      prod *= static_cast<double>(k + 1) / static_cast<double>(k - j);
    }
    out.lagrange[j] = prod;
    out.max_deviation = std::max(out.max_deviation,
                                 std::abs(out.weights[j] - out.lagrange[j]));
  }
  out.matches = out.max_deviation < 1e-12;
  return out;
}

}  // namespace kimex
