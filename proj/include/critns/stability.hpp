#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "critns/dynamics.hpp"
#include "critns/splitting.hpp"

namespace critns {

struct ThresholdEstimate {
  double integral = 0.0;  ///< int_0^{t_end} |u^|_{L^1}^2
  double tail = 0.0;      ///< extrapolated int_{t_end}^inf from the terminal decay rate
  double threshold = 0.0; ///< (nu/8) exp(-(2/nu) (integral + tail))
};

inline void to_json(nlohmann::json& j, const ThresholdEstimate& t) {
  j = {{"integral", t.integral}, {"tail", t.tail}, {"threshold", t.threshold}};
}

/// Admissible perturbation radius (nu/8) exp(-(2/nu) int_0^inf |u^|_{L^1}^2).
/// The infinite-horizon integral is the recorded one plus an exponential tail
/// fitted to the last tenth of the records, which enlarges the integral and
/// shrinks the threshold relative to plain truncation.
inline ThresholdEstimate perturbation_threshold(const TimeSeries& base, double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("nu must be positive");
  if (base.records.empty()) throw InvalidArgument("base run has no records");
  const auto growth = detail::integral_growth(
      base, [](const Record& r) { return r.norms.x_0 * r.norms.x_0; }, [](const Record& r) { return r.int_l1hat_sq; },
      std::numeric_limits<double>::infinity());
  if (!std::isfinite(growth.tail_estimate)) throw InvalidArgument("base run |u^|_{L^1}^2 is not decaying; no tail estimate");
  ThresholdEstimate est;
  est.integral = base.back().int_l1hat_sq;
  est.tail = growth.tail_estimate;
  est.threshold = nu / 8.0 * std::exp(-2.0 / nu * (est.integral + est.tail));
  return est;
}

struct StabilityRecord {
  double t = 0.0;
  double lhs = 0.0;  ///< |w(t)|_{X^-1} + (nu/2) int_0^t |w|_{X^1}
  double rhs = 0.0;  ///< delta exp((2/nu) int_0^t |u^|_{L^1}^2)
};

struct StabilityReport {
  double nu = 1.0;
  double delta = 0.0;
  ThresholdEstimate threshold;
  bool precondition_met = false;
  std::vector<StabilityRecord> bound_series;
  CheckResult bound;
  std::optional<double> wall_T;  ///< first time |w|_{X^-1} >= nu/4
  double sup_w = 0.0;
  double final_rhs = 0.0;
  TimeSeries base_series;
  TimeSeries w_series;  ///< bound_lhs/bound_rhs columns carry the stability bound

  bool sup_below_nu_over_8() const { return sup_w < nu / 8.0; }
  bool all_hold() const { return bound.holds && !wall_T && sup_below_nu_over_8(); }
};

inline void to_json(nlohmann::json& j, const StabilityReport& r) {
  j = {{"nu", r.nu},
       {"delta", r.delta},
       {"threshold", r.threshold},
       {"precondition_met", r.precondition_met},
       {"bound", r.bound},
       {"wall_T", r.wall_T ? nlohmann::json(*r.wall_T) : nlohmann::json(nullptr)},
       {"sup_w", r.sup_w},
       {"sup_below_nu_over_8", r.sup_below_nu_over_8()},
       {"final_rhs", r.final_rhs}};
}

/// Evolves u from u0 and v from u0 + perturbation, and checks the
/// Gronwall-controlled bound on w = v - u at every step. `base` is the
/// already computed series of u under the same cfg.
inline StabilityReport run_stability(const SpectralVectorField& u0, const SpectralVectorField& perturbation,
                                     const SolverConfig& cfg, TimeSeries base, double slack = 1e-3) {
  cfg.validate();
  const double nu = cfg.nu;
  StabilityReport rep;
  rep.nu = nu;
  rep.base_series = std::move(base);
  rep.threshold = perturbation_threshold(rep.base_series, nu);
  rep.delta = x_norm(perturbation, -1);
  rep.precondition_met = rep.delta < rep.threshold.threshold;
  if (!rep.precondition_met)
    warn("perturbation size " + std::to_string(rep.delta) + " is not below the admissible radius " +
         std::to_string(rep.threshold.threshold));

  const SpectralVectorField v0 = u0 + perturbation;
  const Stepper u_step(cfg), v_step(cfg);
  SpectralVectorField u = u0, v = v0;
  TrajectoryMonitor w_mon(nu, perturbation, cfg.record_every);

  double int_l1_sq = 0.0, int_w_x1 = 0.0;
  double prev_l1 = fourier_l1(u0), prev_w_x1 = x_norm(perturbation, 1);
  auto observe = [&](double t, const SpectralVectorField& w) {
    const double xw = x_norm(w, -1);
    StabilityRecord rec{t, xw + 0.5 * nu * int_w_x1, rep.delta * std::exp(2.0 / nu * int_l1_sq)};
    rep.bound.observe(rec.lhs, rec.rhs, slack);
    rep.sup_w = std::max(rep.sup_w, xw);
    if (!rep.wall_T && xw >= nu / 4.0) rep.wall_T = t;
    rep.final_rhs = rec.rhs;
    return rec;
  };
  rep.bound_series.push_back(observe(0.0, perturbation));

  const long steps = cfg.steps();
  for (long s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * cfg.dt;
    u = u_step.advance(u, t_prev);
    v = v_step.advance(v, t_prev);
    const double t = static_cast<double>(s) * cfg.dt;
    const SpectralVectorField w = v - u;
    const double l1 = fourier_l1(u), w_x1 = x_norm(w, 1);
    int_l1_sq += 0.5 * cfg.dt * (prev_l1 * prev_l1 + l1 * l1);
    int_w_x1 += 0.5 * cfg.dt * (prev_w_x1 + w_x1);
    prev_l1 = l1;
    prev_w_x1 = w_x1;
    const auto rec = observe(t, w);
    const bool record = (s % cfg.record_every == 0) || s == steps;
    if (record) rep.bound_series.push_back(rec);
    w_mon.feed(t, w, s == steps);
  }
  w_mon.finish();
  rep.w_series = w_mon.take();
  for (std::size_t i = 0; i < rep.w_series.records.size() && i < rep.bound_series.size(); ++i) {
    rep.w_series.records[i].bound_lhs = rep.bound_series[i].lhs;
    rep.w_series.records[i].bound_rhs = rep.bound_series[i].rhs;
  }
  return rep;
}

inline StabilityReport run_stability(const SpectralVectorField& u0, const SpectralVectorField& perturbation,
                                     const SolverConfig& cfg, double slack = 1e-3) {
  return run_stability(u0, perturbation, cfg, evolve(u0, cfg), slack);
}

}  // namespace critns
