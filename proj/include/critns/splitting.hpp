#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critns/dynamics.hpp"

namespace critns {

/// Frequency/amplitude split u0 = v0 + w0 where v0 keeps the modes with
/// |xi| <= k and |c_xi| <= k.
struct SplittingData {
  double k = 1.0;
  std::vector<std::uint8_t> mask;
  SpectralVectorField v0;
  SpectralVectorField w0;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
};

inline SplittingData build_splitting(const SpectralVectorField& u0, double k) {
  if (!(k > 0.0)) throw InvalidArgument("splitting threshold k must be positive");
  const auto& g = u0.grid();
  SplittingData s{k, std::vector<std::uint8_t>(g.size(), 0), SpectralVectorField(g), SpectralVectorField(g)};
  const double k2 = k * k;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const bool keep = g.k2(f) <= k2 && u0.magnitude(f) <= k;
    s.mask[f] = keep ? 1 : 0;
    (keep ? s.v0 : s.w0).set(f, u0.at(f));
  }
  return s;
}

/// Smallest integer k >= 1 with |w_k^0|_{X^-1} < epsilon/2. When nu is given,
/// epsilon > nu/2 draws a warning.
inline int choose_k(const SpectralVectorField& u0, double epsilon, std::optional<double> nu = std::nullopt) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (nu && epsilon > *nu / 2.0)
    warn("epsilon=" + std::to_string(epsilon) + " exceeds nu/2; smallness of the remainder is no longer guaranteed");
  const auto& g = u0.grid();
  double reach = 1.0;
  for (std::size_t f = 0; f < g.size(); ++f)
    if (u0.magnitude(f) != 0.0) reach = std::max({reach, std::sqrt(g.k2(f)), u0.magnitude(f)});
  auto small = [&](int k) { return x_norm(build_splitting(u0, k).w0, -1) < epsilon / 2.0; };
  // the remainder norm is nonincreasing in k and vanishes at k = ceil(reach)
  int lo = 1, hi = static_cast<int>(std::min(std::ceil(reach), double(std::numeric_limits<int>::max() / 2)));
  if (small(lo)) return lo;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (small(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct CheckResult {
  /// max over the run of (lhs - rhs) / rhs; <= 0 means the inequality holds.
  double max_residual = -std::numeric_limits<double>::infinity();
  bool holds = true;

  void observe(double lhs, double rhs, double slack) {
    double r;
    if (rhs > 0.0)
      r = (lhs - rhs) / rhs;
    else
      r = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    max_residual = std::max(max_residual, r);
    holds = holds && r <= slack;
  }
};

inline void to_json(nlohmann::json& j, const CheckResult& c) {
  j = {{"max_residual", std::isfinite(c.max_residual) ? nlohmann::json(c.max_residual) : nlohmann::json(nullptr)},
       {"holds", c.holds}};
}

struct SplitReport {
  double k = 0.0;
  double epsilon = 0.0;
  double nu = 1.0;
  std::optional<double> t0;
  double x_m1_u0 = 0.0, x_m1_v0 = 0.0, x_m1_w0 = 0.0, l2_v0 = 0.0;
  CheckResult a;  ///< |w(t)|_{X^-1} + (nu/2) int |w|_{X^1} <= |w0|_{X^-1}
  CheckResult b;  ///< |v|_{L2}^2 + nu int |grad v|^2 <= |v0|^2 exp(2|w0|^2/nu^2)
  CheckResult c;  ///< int |v|_{X^-1}^4 <= |v0|^4 exp(4|w0|^2/nu^2) / nu
  CheckResult d;  ///< |u(t)|_{X^-1} <= epsilon for t >= t0
  double b_rhs = 0.0, c_rhs = 0.0, c_lhs_final = 0.0;
  TimeSeries u_series;
  TimeSeries w_series;

  bool all_hold() const { return a.holds && b.holds && c.holds && d.holds && t0.has_value(); }
};

inline void to_json(nlohmann::json& j, const SplitReport& r) {
  j = {{"k", r.k},
       {"epsilon", r.epsilon},
       {"nu", r.nu},
       {"t0", r.t0 ? nlohmann::json(*r.t0) : nlohmann::json(nullptr)},
       {"x_m1_u0", r.x_m1_u0},
       {"x_m1_v0", r.x_m1_v0},
       {"x_m1_w0", r.x_m1_w0},
       {"l2_v0", r.l2_v0},
       {"checks", {{"a", r.a}, {"b", r.b}, {"c", r.c}, {"d", r.d}}},
       {"b_rhs", r.b_rhs},
       {"c_rhs", r.c_rhs},
       {"c_lhs_final", r.c_lhs_final},
       {"series", {{"u", "series.csv"}, {"w", "w_series.csv"}}}};
}

/// Evolves u from u0 and w from the small remainder w0 in lockstep, forms
/// v = u - w at every step, and checks the four decay-mechanism inequalities
/// on every step with relative slack `slack`. If k is not given, choose_k
/// picks it.
inline SplitReport run_splitting_experiment(const SpectralVectorField& u0, double epsilon, const SolverConfig& cfg,
                                            std::optional<double> k = std::nullopt, double slack = 1e-3) {
  cfg.validate();
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double nu = cfg.nu;
  const double k_used = k ? *k : static_cast<double>(choose_k(u0, epsilon, nu));
  if (k && epsilon > nu / 2.0) warn("epsilon exceeds nu/2");
  auto split = build_splitting(u0, k_used);
  split.epsilon = epsilon;

  SplitReport rep;
  rep.k = k_used;
  rep.epsilon = epsilon;
  rep.nu = nu;
  rep.x_m1_u0 = x_norm(u0, -1);
  rep.x_m1_v0 = x_norm(split.v0, -1);
  rep.x_m1_w0 = x_norm(split.w0, -1);
  rep.l2_v0 = l2_norm(split.v0);
  if (!(rep.x_m1_w0 < epsilon / 2.0)) throw InvalidArgument("remainder is not smaller than epsilon/2");
  if (!(epsilon / 2.0 < nu)) throw InvalidArgument("epsilon/2 must be below nu");

  const double w0n = rep.x_m1_w0;
  rep.b_rhs = rep.l2_v0 * rep.l2_v0 * std::exp(2.0 * w0n * w0n / (nu * nu));
  rep.c_rhs = std::pow(rep.l2_v0, 4) * std::exp(4.0 * w0n * w0n / (nu * nu)) / nu;

  TrajectoryMonitor u_mon(nu, u0, cfg.record_every), w_mon(nu, split.w0, cfg.record_every);
  double int_w_x1 = 0.0, int_grad_v_sq = 0.0, int_v_x4 = 0.0;
  double prev_w_x1 = x_norm(split.w0, 1);
  double prev_grad_sq = std::pow(hs_norm(split.v0, 1.0), 2), prev_v4 = std::pow(rep.x_m1_v0, 4);

  auto check_all = [&](double t, const SpectralVectorField& u, const SpectralVectorField& w,
                       const SpectralVectorField& v) {
    rep.a.observe(x_norm(w, -1) + 0.5 * nu * int_w_x1, w0n, slack);
    const double l2v = l2_norm(v);
    rep.b.observe(l2v * l2v + nu * int_grad_v_sq, rep.b_rhs, slack);
    rep.c.observe(int_v_x4, rep.c_rhs, slack);
    const double xu = x_norm(u, -1);
    if (!rep.t0 && xu < epsilon) rep.t0 = t;
    if (rep.t0) rep.d.observe(xu, epsilon, slack);
  };

  check_all(0.0, u0, split.w0, split.v0);
  const Stepper u_step(cfg), w_step(cfg);
  SpectralVectorField u = u0, w = split.w0;
  const long steps = cfg.steps();
  for (long s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * cfg.dt;
    u = u_step.advance(u, t_prev);
    w = w_step.advance(w, t_prev);
    const double t = static_cast<double>(s) * cfg.dt;
    const SpectralVectorField v = u - w;
    const double w_x1 = x_norm(w, 1);
    const double grad_sq = std::pow(hs_norm(v, 1.0), 2);
    const double v4 = std::pow(x_norm(v, -1), 4);
    int_w_x1 += 0.5 * cfg.dt * (prev_w_x1 + w_x1);
    int_grad_v_sq += 0.5 * cfg.dt * (prev_grad_sq + grad_sq);
    int_v_x4 += 0.5 * cfg.dt * (prev_v4 + v4);
    prev_w_x1 = w_x1;
    prev_grad_sq = grad_sq;
    prev_v4 = v4;
    u_mon.feed(t, u, s == steps);
    w_mon.feed(t, w, s == steps);
    check_all(t, u, w, v);
  }
  u_mon.finish();
  w_mon.finish();
  rep.c_lhs_final = int_v_x4;
  if (!rep.t0) rep.d.holds = false;
  rep.u_series = u_mon.take();
  rep.w_series = w_mon.take();
  return rep;
}

}  // namespace critns
