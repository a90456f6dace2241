#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "critns/dynamics.hpp"

namespace critns {

/// Field samples at t_m = m * horizon / (size() - 1).
struct Trajectory {
  double horizon = 0.0;
  std::vector<SpectralVectorField> samples;

  std::size_t intervals() const noexcept { return samples.empty() ? 0 : samples.size() - 1; }
  double dt() const noexcept { return intervals() ? horizon / static_cast<double>(intervals()) : 0.0; }
  double time(std::size_t m) const noexcept { return static_cast<double>(m) * dt(); }
};

inline Trajectory heat_flow(const SpectralVectorField& u0, double nu, double horizon, std::size_t n_time) {
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (n_time < 1) throw InvalidArgument("n_time must be >= 1");
  Trajectory tr{horizon, {}};
  tr.samples.reserve(n_time + 1);
  const double h = horizon / static_cast<double>(n_time);
  for (std::size_t m = 0; m <= n_time; ++m) tr.samples.push_back(heat_propagate(u0, static_cast<double>(m) * h, nu));
  return tr;
}

/// t -> e^{nu t Lap} u0 + int_0^t e^{nu (t-s) Lap} N(u(s)) ds with N = -P div(u (x) u).
///
/// The s-integral uses the trapezoid rule with the exact heat multiplier in
/// the integrand, evaluated by the recursion
///   I_{m+1} = E(h) I_m + (h/2) (E(h) N_m + N_{m+1}).
inline Trajectory duhamel_map(const Trajectory& u, const SpectralVectorField& u0, double nu) {
  if (u.samples.size() < 2) throw InvalidArgument("trajectory needs at least two samples");
  const auto& g = u0.grid();
  for (const auto& s : u.samples)
    if (!(s.grid() == g)) throw InvalidArgument("trajectory grid does not match initial datum");
  const double h = u.dt();
  std::vector<double> e_h(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) e_h[f] = std::exp(-nu * h * g.k2(f));

  const NonlinearOperator nonlinear(g);
  Trajectory out{u.horizon, {}};
  out.samples.reserve(u.samples.size());
  SpectralVectorField integral(g);
  SpectralVectorField n_prev = nonlinear(u.samples[0]);
  out.samples.push_back(u0);
  for (std::size_t m = 1; m < u.samples.size(); ++m) {
    const SpectralVectorField n_next = nonlinear(u.samples[m]);
    parallel_for(g.size(), [&](std::size_t f) {
      for (int d = 0; d < 3; ++d) {
        auto& acc = integral.component(d)[f];
        acc = e_h[f] * acc + 0.5 * h * (e_h[f] * n_prev.component(d)[f] + n_next.component(d)[f]);
      }
    });
    out.samples.push_back(heat_propagate(u0, u.time(m), nu) + integral);
    n_prev = n_next;
  }
  return out;
}

/// sup_t |a - b|_{X^-1} + nu * int_0^T |a - b|_{X^1} dt (trapezoid).
inline double mixed_distance(const Trajectory& a, const Trajectory& b, double nu) {
  if (a.samples.size() != b.samples.size()) throw InvalidArgument("trajectory lengths differ");
  double sup = 0.0, integral = 0.0, prev = 0.0;
  for (std::size_t m = 0; m < a.samples.size(); ++m) {
    const auto diff = a.samples[m] - b.samples[m];
    sup = std::max(sup, x_norm(diff, -1));
    const double x1 = x_norm(diff, 1);
    if (m > 0) integral += 0.5 * a.dt() * (prev + x1);
    prev = x1;
  }
  return sup + nu * integral;
}

struct PicardOptions {
  double horizon = 0.5;
  std::size_t n_time = 200;
  int max_iter = 50;
  double tol = 1e-12;
};

struct PicardReport {
  int iterates = 0;
  std::vector<double> diffs;
  std::vector<double> ratios;
  bool converged = false;
  /// max over samples of |u(t)|_{X^-1} + (nu - |u0|_{X^-1}) int_0^t |u|_{X^1}
  /// minus |u0|_{X^-1}; only meaningful when |u0|_{X^-1} < nu.
  double bound_excess = 0.0;
  bool small_data = false;

  /// Ratios over the last few iterations (at most three).
  bool ratio_tail_below_one() const {
    if (ratios.empty()) return true;
    const std::size_t k = std::min<std::size_t>(3, ratios.size());
    return std::all_of(ratios.end() - static_cast<std::ptrdiff_t>(k), ratios.end(), [](double r) { return r < 1.0; });
  }
};

inline void to_json(nlohmann::json& j, const PicardReport& r) {
  j = {{"iterates", r.iterates}, {"diffs", r.diffs}, {"ratios", r.ratios}, {"converged", r.converged},
       {"bound_excess", r.bound_excess}, {"small_data", r.small_data}};
}

struct PicardResult {
  Trajectory trajectory;
  PicardReport report;
};

/// Fixed-point iteration of duhamel_map starting from the heat flow of u0.
/// Stops when the mixed-norm update falls below tol; non-convergence is
/// reported, not thrown.
inline PicardResult solve_picard(const SpectralVectorField& u0, double nu, const PicardOptions& opt) {
  if (!(nu > 0.0)) throw InvalidArgument("nu must be positive");
  if (divergence_residual(u0) > 1e-10) throw InvalidArgument("initial field is not divergence-free");
  PicardResult res{heat_flow(u0, nu, opt.horizon, opt.n_time), {}};
  auto& rep = res.report;
  for (int it = 0; it < opt.max_iter; ++it) {
    Trajectory next = duhamel_map(res.trajectory, u0, nu);
    const double d = mixed_distance(next, res.trajectory, nu);
    if (!std::isfinite(d)) break;
    if (!rep.diffs.empty() && rep.diffs.back() > 0.0) rep.ratios.push_back(d / rep.diffs.back());
    rep.diffs.push_back(d);
    rep.iterates = it + 1;
    res.trajectory = std::move(next);
    if (d < opt.tol) {
      rep.converged = true;
      break;
    }
  }

  const double x0 = x_norm(u0, -1);
  rep.small_data = x0 < nu;
  double integral = 0.0, prev = 0.0, worst = -x0;
  for (std::size_t m = 0; m < res.trajectory.samples.size(); ++m) {
    const auto& s = res.trajectory.samples[m];
    const double x1 = x_norm(s, 1);
    if (m > 0) integral += 0.5 * res.trajectory.dt() * (prev + x1);
    prev = x1;
    worst = std::max(worst, x_norm(s, -1) + (nu - x0) * integral - x0);
  }
  rep.bound_excess = worst;
  return res;
}

struct CrossValidation {
  double max_relative_discrepancy = 0.0;
  PicardReport picard;
};

inline void to_json(nlohmann::json& j, const CrossValidation& c) {
  j = {{"max_relative_discrepancy", c.max_relative_discrepancy}, {"picard", c.picard}};
}

/// Compares the Picard trajectory with the time stepper at the Picard sample
/// times: max_t |u_picard(t) - u_step(t)|_{X^-1} / |u_step(t)|_{X^-1}.
/// The stepper dt must divide the Picard sample spacing.
inline CrossValidation cross_validate(const SpectralVectorField& u0, double nu, const PicardOptions& opt, double dt) {
  CrossValidation cv;
  auto res = solve_picard(u0, nu, opt);
  cv.picard = res.report;
  const double spacing = res.trajectory.dt();
  const double ratio = spacing / dt;
  const long sub = std::lround(ratio);
  if (sub < 1 || std::abs(ratio - static_cast<double>(sub)) > 1e-9 * ratio)
    throw InvalidArgument("stepper dt must divide the Picard sample spacing");
  const Stepper stepper(nu, spacing / static_cast<double>(sub), u0.grid());
  SpectralVectorField u = u0;
  for (std::size_t m = 1; m < res.trajectory.samples.size(); ++m) {
    for (long s = 0; s < sub; ++s) u = stepper.advance(u);
    const double ref = x_norm(u, -1);
    const double diff = x_norm(res.trajectory.samples[m] - u, -1);
    if (diff > 0.0) cv.max_relative_discrepancy = std::max(cv.max_relative_discrepancy, diff / ref);
  }
  return cv;
}

}  // namespace critns
