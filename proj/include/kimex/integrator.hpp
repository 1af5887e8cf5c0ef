#pragma once

#include "kimex/bgk.hpp"
#include "kimex/boltzmann.hpp"
#include "kimex/schemes.hpp"
#include "kimex/transport.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kimex {

enum class CollisionModel { bgk, bgk_penalized, boltzmann_penalized };

inline CollisionModel model_from_string(const std::string& s) {
  if (s == "bgk") return CollisionModel::bgk;
  if (s == "bgk-penalized") return CollisionModel::bgk_penalized;
  if (s == "boltzmann-penalized") return CollisionModel::boltzmann_penalized;
  throw std::invalid_argument("unknown collision model: " + s);
}

inline const char* to_string(CollisionModel m) {
  switch (m) {
    case CollisionModel::bgk: return "bgk";
    case CollisionModel::bgk_penalized: return "bgk-penalized";
    case CollisionModel::boltzmann_penalized: return "boltzmann-penalized";
  }
  return "?";
}

/// Operator side of a kinetic problem. For bgk_penalized the true operator
/// is eta (M - f) with eta = (1 + xi) mu, penalized by mu (M - f); the
/// penalization mismatch xi drives the monotonicity and stability studies.
struct ProblemSpec {
  double eps = 1.0;
  CollisionModel model = CollisionModel::bgk;
  FrequencyPolicy mu{};
  double xi = 0.0;
  TransportMethod transport = TransportMethod::weno5;
  std::shared_ptr<const SpectralKernel> kernel;

  bool penalized() const { return model != CollisionModel::bgk; }
};

inline void validate(const ProblemSpec& p, const DistributionField& f) {
  if (!(p.eps > 0)) throw std::invalid_argument("problem: eps must be positive");
  if (p.model == CollisionModel::boltzmann_penalized) {
    if (!p.kernel) throw std::invalid_argument("problem: boltzmann model needs a kernel");
    detail::check_kernel_field(*p.kernel, f, "problem");
  }
  if (p.model == CollisionModel::bgk_penalized && p.xi <= -1.0)
    throw std::invalid_argument("problem: penalization factor must exceed -1");
}

/// The full collision operator Q(f) of the chosen model.
inline DistributionField collision_operator(const DistributionField& f, const ProblemSpec& p) {
  switch (p.model) {
    case CollisionModel::bgk:
      return q_bgk(f, p.mu);
    case CollisionModel::bgk_penalized: {
      auto q = q_bgk(f, p.mu);
      q.values *= (1.0 + p.xi);
      return q;
    }
    case CollisionModel::boltzmann_penalized:
      return q_bilinear(f, f, *p.kernel);
  }
  throw std::logic_error("collision_operator: bad model");
}

struct HistorySlot {
  DistributionField f;
  DistributionField transport;  // L(f)
  DistributionField q_pen;      // Q_P(f) = mu (M[f] - f)
  DistributionField g_pen;      // G_P(f,f) = Q(f) - Q_P(f), penalized models
  MomentSet U;
  Eigen::MatrixXd phi_transport;
  Eigen::MatrixXd phi_qpen;
  Eigen::MatrixXd phi_gpen;
  bool has_gpen = false;
};

inline HistorySlot make_slot(const DistributionField& f, const ProblemSpec& p) {
  HistorySlot s;
  s.f = f;
  s.U = moments(f);
  if (!s.U.admissible())
    throw std::domain_error("history state has degenerate moments in cell " +
                            std::to_string(s.U.degenerate.front()));
  if (f.x.n > 1) {
    s.transport = advection_derivative(f, p.transport);
  } else {
    s.transport = like(f);
  }
  const Eigen::ArrayXd mu = collision_frequency(p.mu, s.U);
  const DistributionField M = maxwellian(s.U, f.v, f.x);
  s.q_pen = like(f);
  s.q_pen.values = (M.values - f.values).colwise() * mu;
  if (p.model == CollisionModel::bgk_penalized) {
    s.g_pen = like(f);
    s.g_pen.values = p.xi * s.q_pen.values;
    s.has_gpen = true;
  } else if (p.model == CollisionModel::boltzmann_penalized) {
    s.g_pen = q_bilinear(f, f, *p.kernel);
    s.g_pen.values -= s.q_pen.values;
    s.has_gpen = true;
  }
  s.phi_transport = s.transport.values.matrix() * f.v.phi_w;
  s.phi_qpen = s.q_pen.values.matrix() * f.v.phi_w;
  if (s.has_gpen) s.phi_gpen = s.g_pen.values.matrix() * f.v.phi_w;
  return s;
}

/// Ring buffer of the last s states with their cached explicit evaluations;
/// slots[j] holds f^{n-j}. Each advance computes exactly one new collision
/// evaluation (the new slot's).
struct StepHistory {
  std::vector<HistorySlot> slots;
  double dt = 0.0;
  double time = 0.0;  // time of slots[0]
  long step = 0;      // index of the newest state
};

/// states in ascending time order t0, t0+dt, ..., t0+(s-1)dt
inline StepHistory make_history(const ImexScheme& sc,
                                const std::vector<DistributionField>& states,
                                const ProblemSpec& p, double dt, double t0 = 0.0) {
  if (static_cast<int>(states.size()) != sc.steps)
    throw std::invalid_argument("make_history: need exactly s = " +
                                std::to_string(sc.steps) + " states");
  StepHistory h;
  h.dt = dt;
  h.time = t0 + (sc.steps - 1) * dt;
  h.step = sc.steps - 1;
  h.slots.reserve(states.size());
  for (auto it = states.rbegin(); it != states.rend(); ++it)
    h.slots.push_back(make_slot(*it, p));
  return h;
}

/// One IMEX multistep update. The conservative moment update is evaluated
/// first (it is explicit), the collision frequency and Maxwellian of the
/// new state are built from it, and the implicit relaxation is closed in
/// one pointwise solve.
inline DistributionField imex_step(const ImexScheme& sc, const StepHistory& h,
                                   const ProblemSpec& p, MomentSet* target_out = nullptr) {
  const int s = sc.steps;
  if (static_cast<int>(h.slots.size()) != s)
    throw std::invalid_argument("imex_step: history length does not match scheme");
  const auto& f0 = h.slots[0].f;
  const double dt = h.dt;
  const double eps = p.eps;

  Eigen::MatrixXd packed = Eigen::MatrixXd::Zero(f0.x.n, 2 + f0.v.dim);
  for (int j = 0; j < s; ++j) {
    const auto& sl = h.slots[j];
    packed.noalias() -= sc.a_r[j] * sl.U.packed();
    packed.noalias() -= (dt * sc.b_r[j]) * sl.phi_transport;
    if (sl.has_gpen) packed.noalias() += (dt / eps * sc.b_r[j]) * sl.phi_gpen;
    if (sc.c_r[j] != 0.0) packed.noalias() += (dt / eps * sc.c_r[j]) * sl.phi_qpen;
  }
  MomentSet target = moments_from_packed(packed, f0.v.dim);
  if (!target.admissible())
    throw std::domain_error("imex_step: degenerate updated moments in cell " +
                            std::to_string(target.degenerate.front()));

  DistributionField ep = like(f0);
  for (int j = 0; j < s; ++j) {
    const auto& sl = h.slots[j];
    ep.values -= sc.a_r[j] * sl.f.values;
    ep.values -= (dt * sc.b_r[j]) * sl.transport.values;
    if (sl.has_gpen) ep.values += (dt / eps * sc.b_r[j]) * sl.g_pen.values;
    if (sc.c_r[j] != 0.0) ep.values += (dt / eps * sc.c_r[j]) * sl.q_pen.values;
  }

  const Eigen::ArrayXd mu_next = collision_frequency(p.mu, target);
  DistributionField f1 =
      implicit_relaxation_solve(ep, target, mu_next, eps, dt, sc.c_m1_r);
  if (!f1.values.isFinite().all())
    throw std::runtime_error("imex_step: non-finite values in updated state");
  if (target_out) *target_out = std::move(target);
  return f1;
}

inline void advance(const ImexScheme& sc, StepHistory& h, const ProblemSpec& p) {
  DistributionField f1 = imex_step(sc, h, p);
  HistorySlot slot = make_slot(f1, p);
  h.slots.pop_back();
  h.slots.insert(h.slots.begin(), std::move(slot));
  h.time += h.dt;
  ++h.step;
}

/// Splitting form of the IMEX-BDF schemes: transport-extrapolate to
/// f^{n+1/2}, then one backward-Euler relaxation. Algebraically identical
/// to imex_step on the bgk path.
inline DistributionField bdf_splitting_step(const ImexScheme& sc, const StepHistory& h,
                                            const ProblemSpec& p) {
  if (!sc.is_bdf())
    throw std::invalid_argument("bdf_splitting_step: scheme has nonzero explicit c");
  if (p.model != CollisionModel::bgk)
    throw std::invalid_argument("bdf_splitting_step: only the bgk path");
  const int s = sc.steps;
  if (static_cast<int>(h.slots.size()) != s)
    throw std::invalid_argument("bdf_splitting_step: history length mismatch");
  DistributionField half = like(h.slots[0].f);
  for (int j = 0; j < s; ++j) {
    half.values -= sc.a_r[j] * h.slots[j].f.values;
    half.values -= (h.dt * sc.b_r[j]) * h.slots[j].transport.values;
  }
  MomentSet U = moments(half);
  if (!U.admissible())
    throw std::domain_error("bdf_splitting_step: degenerate half-step moments");
  const Eigen::ArrayXd mu = collision_frequency(p.mu, U);
  return implicit_relaxation_solve(half, U, mu, p.eps, h.dt, sc.c_m1_r);
}

struct BootstrapOptions {
  double target_abs = -1.0;  // < 0: use 0.01 dt^{p+1} * max|f0|
  int max_substeps = 1 << 16;
};

struct BootstrapResult {
  StepHistory history;
  int substeps = 1;
  double error_estimate = 0.0;
};

namespace detail {

inline std::vector<DistributionField> bdf1_macro_states(const DistributionField& f0,
                                                        const ProblemSpec& p, double dt,
                                                        int n_macro, int m) {
  static const ImexScheme bdf1 = find_scheme("IMEX-BDF1");
  StepHistory h = make_history(bdf1, {f0}, p, dt / m);
  std::vector<DistributionField> out;
  out.reserve(n_macro);
  for (int macro = 0; macro < n_macro; ++macro) {
    for (int i = 0; i < m; ++i) advance(bdf1, h, p);
    out.push_back(h.slots[0].f);
  }
  return out;
}

}  // namespace detail

/// Start-up history for an s-step scheme from a single state: sub-stepped
/// backward-Euler with the substep count chosen by Richardson control
/// (difference between m and 2m substeps per macro step below the target).
/// Exact states, when known, go through make_history instead.
inline BootstrapResult bootstrap(const ImexScheme& sc, const DistributionField& f0,
                                 const ProblemSpec& p, double dt,
                                 BootstrapOptions opt = {}) {
  validate(p, f0);
  BootstrapResult out;
  if (sc.steps == 1) {
    out.history = make_history(sc, {f0}, p, dt);
    return out;
  }
  const double target = opt.target_abs > 0
                            ? opt.target_abs
                            : 0.01 * std::pow(dt, sc.order + 1) * linf_norm(f0);
  const int n_macro = sc.steps - 1;
  auto prev = detail::bdf1_macro_states(f0, p, dt, n_macro, 1);
  for (int m = 2; m <= opt.max_substeps; m *= 2) {
    auto cur = detail::bdf1_macro_states(f0, p, dt, n_macro, m);
    double est = 0.0;
    for (int j = 0; j < n_macro; ++j)
      est = std::max(est, (cur[j].values - prev[j].values).abs().maxCoeff());
    if (est <= target) {
      std::vector<DistributionField> states;
      states.push_back(f0);
      for (auto& s : cur) states.push_back(std::move(s));
      out.history = make_history(sc, states, p, dt);
      out.substeps = m;
      out.error_estimate = est;
      return out;
    }
    prev = std::move(cur);
  }
  throw std::runtime_error("bootstrap: error target " + std::to_string(target) +
                           " not met within " + std::to_string(opt.max_substeps) +
                           " substeps; reduce dt");
}

struct StepRecord {
  long step = 0;
  double time = 0.0;
  double mass = 0.0, mom_x = 0.0, mom_y = 0.0, energy = 0.0;
  double entropy = 0.0;
  double min_f = 0.0;
};

inline StepRecord record_state(const StepHistory& h) {
  const auto& sl = h.slots[0];
  StepRecord r;
  r.step = h.step;
  r.time = h.time;
  const double dx = sl.f.x.dx;
  r.mass = sl.U.rho.sum() * dx;
  r.mom_x = sl.U.mom.col(0).sum() * dx;
  r.mom_y = sl.U.dim > 1 ? sl.U.mom.col(1).sum() * dx : 0.0;
  r.energy = sl.U.energy.sum() * dx;
  r.entropy = entropy_clamped(sl.f).sum() * dx;
  r.min_f = sl.f.values.minCoeff();
  return r;
}

struct RunOptions {
  std::vector<long> checkpoint_steps;
  bool diagnostics = true;
};

struct Trajectory {
  std::vector<StepRecord> records;
  std::vector<std::pair<long, DistributionField>> checkpoints;
  StepHistory history;
};

/// Fixed-step time loop with per-step conservation/entropy/positivity
/// diagnostics. Deterministic for fixed inputs.
inline Trajectory run(const ImexScheme& sc, StepHistory history, const ProblemSpec& p,
                      long n_steps, RunOptions opt = {}) {
  validate(p, history.slots.at(0).f);
  Trajectory tr;
  auto want_checkpoint = [&](long step) {
    for (long c : opt.checkpoint_steps)
      if (c == step) return true;
    return false;
  };
  if (opt.diagnostics) tr.records.push_back(record_state(history));
  if (want_checkpoint(history.step))
    tr.checkpoints.emplace_back(history.step, history.slots[0].f);
  for (long i = 0; i < n_steps; ++i) {
    try {
      advance(sc, history, p);
    } catch (const std::exception& e) {
      throw std::runtime_error("step " + std::to_string(history.step + 1) + " (t=" +
                               std::to_string(history.time + history.dt) +
                               "): " + e.what());
    }
    if (opt.diagnostics) tr.records.push_back(record_state(history));
    if (want_checkpoint(history.step))
      tr.checkpoints.emplace_back(history.step, history.slots[0].f);
  }
  tr.history = std::move(history);
  return tr;
}

/// || eps L(f) - Q(f) ||_inf with the run's own discrete operators.
inline double steady_state_residual(const DistributionField& f, const ProblemSpec& p) {
  DistributionField lhs = f.x.n > 1 ? advection_derivative(f, p.transport) : like(f);
  const DistributionField q = collision_operator(f, p);
  return (p.eps * lhs.values - q.values).abs().maxCoeff();
}

}  // namespace kimex
