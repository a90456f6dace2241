#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critns/fft.hpp"
#include "critns/field.hpp"
#include "critns/norms.hpp"

namespace critns {

struct SolverConfig {
  double nu = 1.0;
  double dt = 1e-3;
  double t_end = 5.0;
  Grid grid{32};
  int record_every = 1;

  void validate() const {
    if (!(nu > 0.0)) throw InvalidArgument("nu must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be nonnegative");
    if (record_every < 1) throw InvalidArgument("record_every must be >= 1");
    const double steps = t_end / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
      throw InvalidArgument("t_end must be an integer multiple of dt");
  }
  long steps() const { return std::lround(t_end / dt); }
};

/// -P div(u (x) u) by the pseudo-spectral method with the 2/3 rule. Owns FFT
/// scratch buffers, so one instance must not be shared across threads.
class NonlinearOperator {
 public:
  explicit NonlinearOperator(Grid grid) : grid_(std::move(grid)) {
    for (auto& h : half_) h = detail::alloc_complex(grid_.half_size());
    for (auto& r : real_) r = detail::alloc_real(grid_.size());
    for (auto& p : prod_) p = detail::alloc_real(grid_.size());
    for (auto& h : prod_half_) h = detail::alloc_complex(grid_.half_size());
  }

  const Grid& grid() const noexcept { return grid_; }

  SpectralVectorField operator()(const SpectralVectorField& u) const {
    if (!(u.grid() == grid_)) throw InvalidArgument("field grid does not match operator grid");
    if (const double r = divergence_residual(u); r > 1e-10)
      throw InvalidArgument("input field is not divergence-free (residual " + std::to_string(r) + ")");

    const int n = grid_.n(), h = n / 2 + 1;
    const auto& fft = detail::RealFft::get(n);

    // dealiased velocity to physical space
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (int d = 0; d < 3; ++d) {
      Complex* dst = half_[d].get();
      const auto src = u.component(d);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < h; ++l) {
            const std::size_t f = grid_.flat(i, j, l);
            dst[(static_cast<std::size_t>(i) * n + j) * h + l] = grid_.in_mask(f) ? src[f] : Complex{};
          }
      fft.backward(dst, real_[d].get());
    }

    const std::size_t total = grid_.size();
    parallel_for(total, [&](std::size_t k) {
      const double a = real_[0][k], b = real_[1][k], c = real_[2][k];
      prod_[0][k] = a * a;
      prod_[1][k] = a * b;
      prod_[2][k] = a * c;
      prod_[3][k] = b * b;
      prod_[4][k] = b * c;
      prod_[5][k] = c * c;
    });

#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (int p = 0; p < 6; ++p) fft.forward(prod_[p].get(), prod_half_[p].get());

    // N_i = -i xi_j (u_i u_j)^, then dealias and project
    const double scale = 1.0 / static_cast<double>(total);
    parallel_for(static_cast<std::size_t>(n) * n, [&](std::size_t ij) {
      const int i = static_cast<int>(ij / n), j = static_cast<int>(ij % n);
      for (int l = 0; l < h; ++l) {
        const std::size_t f = grid_.flat(i, j, l);
        const std::size_t k = ij * h + l;
        if (f == 0 || !grid_.in_mask(f) || grid_.on_nyquist(f)) {
          for (auto& out : half_) out[k] = Complex{};
          continue;
        }
        const auto xi = grid_.wavevector(f);
        const double kx = xi[0], ky = xi[1], kz = xi[2];
        const Complex p00 = prod_half_[0][k] * scale, p01 = prod_half_[1][k] * scale,
                      p02 = prod_half_[2][k] * scale, p11 = prod_half_[3][k] * scale,
                      p12 = prod_half_[4][k] * scale, p22 = prod_half_[5][k] * scale;
        const Complex minus_i{0.0, -1.0};
        Complex n0 = minus_i * (kx * p00 + ky * p01 + kz * p02);
        Complex n1 = minus_i * (kx * p01 + ky * p11 + kz * p12);
        Complex n2 = minus_i * (kx * p02 + ky * p12 + kz * p22);
        const Complex s = (kx * n0 + ky * n1 + kz * n2) / grid_.k2(f);
        half_[0][k] = n0 - s * kx;
        half_[1][k] = n1 - s * ky;
        half_[2][k] = n2 - s * kz;
      }
    });

    SpectralVectorField out(grid_);
    for (int d = 0; d < 3; ++d) detail::half_to_full(grid_, half_[d].get(), out.component(d));
    return out;
  }

 private:
  Grid grid_;
  mutable std::array<detail::FftwBuffer<Complex>, 3> half_;
  mutable std::array<detail::FftwBuffer<double>, 3> real_;
  mutable std::array<detail::FftwBuffer<double>, 6> prod_;
  mutable std::array<detail::FftwBuffer<Complex>, 6> prod_half_;
};

inline SpectralVectorField nonlinear_term(const SpectralVectorField& u) { return NonlinearOperator(u.grid())(u); }

/// Exact heat semigroup: c_xi <- exp(-nu tau |xi|^2) c_xi.
inline SpectralVectorField heat_propagate(const SpectralVectorField& u, double tau, double nu) {
  if (tau < 0.0) throw InvalidArgument("heat propagation time must be nonnegative");
  SpectralVectorField out(u.grid());
  const auto& g = u.grid();
  parallel_for(g.size(), [&](std::size_t f) {
    const double m = std::exp(-nu * tau * g.k2(f));
    for (int d = 0; d < 3; ++d) out.component(d)[f] = m * u.component(d)[f];
  });
  return out;
}

/// Largest dt for which explicit RK4 stays inside its imaginary-axis stability
/// interval, using |u|_inf <= |u|_{X^0} and the largest retained wavenumber.
inline double cfl_estimate(const SpectralVectorField& u) {
  const double umax = x_norm(u, 0);
  const double kmax = std::sqrt(3.0) * u.grid().cutoff();
  if (umax == 0.0 || kmax == 0.0) return std::numeric_limits<double>::infinity();
  return 2.8 / (umax * kmax);
}

/// Integrating-factor RK4: the viscous part is propagated exactly and the
/// projected nonlinearity is treated explicitly.
class Stepper {
 public:
  Stepper(double nu, double dt, const Grid& grid) : nu_(nu), dt_(dt), nonlinear_(grid) {
    e_half_.resize(grid.size());
    e_full_.resize(grid.size());
    for (std::size_t f = 0; f < grid.size(); ++f) {
      e_half_[f] = std::exp(-nu * 0.5 * dt * grid.k2(f));
      e_full_[f] = std::exp(-nu * dt * grid.k2(f));
    }
  }
  explicit Stepper(const SolverConfig& cfg) : Stepper(cfg.nu, cfg.dt, cfg.grid) {}

  double dt() const noexcept { return dt_; }
  double nu() const noexcept { return nu_; }

  /// One step from time t (t is only used for error reporting).
  SpectralVectorField advance(const SpectralVectorField& u, double t = 0.0) const {
    const auto& g = u.grid();
    const std::size_t size = g.size();
    const double h = dt_;
    auto combine = [&](auto&& fn) {
      SpectralVectorField out(g);
      parallel_for(size, [&](std::size_t f) {
        for (int d = 0; d < 3; ++d) out.component(d)[f] = fn(d, f);
      });
      return out;
    };

    const auto k1 = nonlinear_(u);
    const auto a = combine([&](int d, std::size_t f) {
      return e_half_[f] * (u.component(d)[f] + 0.5 * h * k1.component(d)[f]);
    });
    const auto k2 = nonlinear_(a);
    const auto b = combine([&](int d, std::size_t f) {
      return e_half_[f] * u.component(d)[f] + 0.5 * h * k2.component(d)[f];
    });
    const auto k3 = nonlinear_(b);
    const auto c = combine([&](int d, std::size_t f) {
      return e_full_[f] * u.component(d)[f] + h * e_half_[f] * k3.component(d)[f];
    });
    const auto k4 = nonlinear_(c);
    auto next = combine([&](int d, std::size_t f) {
      const Complex incr = e_full_[f] * k1.component(d)[f] +
                           2.0 * e_half_[f] * (k2.component(d)[f] + k3.component(d)[f]) + k4.component(d)[f];
      return e_full_[f] * u.component(d)[f] + (h / 6.0) * incr;
    });

    for (int d = 0; d < 3; ++d)
      for (const auto& z : next.component(d))
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1e150)
          throw Unresolved("resolution or dt insufficient (non-finite coefficients)", t + h);
    return next;
  }

 private:
  double nu_;
  double dt_;
  NonlinearOperator nonlinear_;
  std::vector<double> e_half_;
  std::vector<double> e_full_;
};

inline SpectralVectorField step(const SpectralVectorField& u, const SolverConfig& cfg) {
  return Stepper(cfg.nu, cfg.dt, u.grid()).advance(u);
}

struct Record {
  double t = 0.0;
  NormReport norms;
  double int_x1 = 0.0;        ///< int_0^t |u|_{X^1}
  double int_x0_sq = 0.0;     ///< int_0^t |u|_{X^0}^2
  double int_l1hat_sq = 0.0;  ///< int_0^t |u^|_{L^1}^2
  double bound_lhs = std::numeric_limits<double>::quiet_NaN();
  double bound_rhs = std::numeric_limits<double>::quiet_NaN();
};

struct TimeSeries {
  double nu = 1.0;
  double x_m1_initial = 0.0;
  /// The small-data bound is evaluated only when |u0|_{X^-1} < nu.
  bool bound_active = false;
  double cfl_dt = std::numeric_limits<double>::infinity();
  std::vector<Record> records;

  const Record& back() const { return records.back(); }
};

/// Accumulates the running time integrals with the trapezoid rule on every
/// sample it is fed, and keeps a record every `record_every` samples.
class TrajectoryMonitor {
 public:
  TrajectoryMonitor(double nu, const SpectralVectorField& u0, int record_every = 1) : every_(record_every) {
    series_.nu = nu;
    series_.x_m1_initial = x_norm(u0, -1);
    series_.bound_active = series_.x_m1_initial < nu;
    series_.cfl_dt = cfl_estimate(u0);
    feed(0.0, u0, true);
  }

  void feed(double t, const SpectralVectorField& u, bool force_record = false) {
    const NormReport r = norm_report(u, 1.0);
    if (count_ > 0) {
      const double h = t - last_t_;
      int_x1_ += 0.5 * h * (last_.x_1 + r.x_1);
      int_x0_sq_ += 0.5 * h * (last_.x_0 * last_.x_0 + r.x_0 * r.x_0);
      int_l1hat_sq_ += 0.5 * h * (last_.x_0 * last_.x_0 + r.x_0 * r.x_0);
    }
    if (force_record || count_ % every_ == 0) push(t, r);
    last_ = r;
    last_t_ = t;
    ++count_;
  }

  /// Records the most recent sample if it was not already recorded.
  void finish() {
    if (series_.records.empty() || series_.records.back().t != last_t_) push(last_t_, last_);
  }

  const TimeSeries& series() const noexcept { return series_; }
  TimeSeries take() { return std::move(series_); }

 private:
  void push(double t, const NormReport& r) {
    Record rec;
    rec.t = t;
    rec.norms = r;
    rec.int_x1 = int_x1_;
    rec.int_x0_sq = int_x0_sq_;
    rec.int_l1hat_sq = int_l1hat_sq_;
    if (series_.bound_active) {
      rec.bound_lhs = r.x_m1 + (series_.nu - series_.x_m1_initial) * int_x1_;
      rec.bound_rhs = series_.x_m1_initial;
    }
    series_.records.push_back(rec);
  }

  int every_;
  long count_ = 0;
  double last_t_ = 0.0;
  NormReport last_;
  double int_x1_ = 0.0, int_x0_sq_ = 0.0, int_l1hat_sq_ = 0.0;
  TimeSeries series_;
};

using RecordCallback = std::function<void(double t, const SpectralVectorField& u)>;

/// Integrates from u0 to cfg.t_end. on_record, when set, sees the field at
/// every recorded time (e.g. for checkpoints).
inline TimeSeries evolve(const SpectralVectorField& u0, const SolverConfig& cfg, const RecordCallback& on_record = {}) {
  cfg.validate();
  if (!(u0.grid() == cfg.grid)) throw InvalidArgument("initial field grid does not match solver grid");
  if (u0.magnitude(0) != 0.0) throw InvalidArgument("mean mode present");
  if (divergence_residual(u0) > 1e-10) throw InvalidArgument("initial field is not divergence-free");

  TrajectoryMonitor monitor(cfg.nu, u0, cfg.record_every);
  if (cfg.dt > monitor.series().cfl_dt)
    warn("dt " + std::to_string(cfg.dt) + " exceeds the advective stability estimate " +
         std::to_string(monitor.series().cfl_dt));
  if (on_record) on_record(0.0, u0);

  const Stepper stepper(cfg);
  SpectralVectorField u = u0;
  const long steps = cfg.steps();
  for (long s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * cfg.dt;
    u = stepper.advance(u, t_prev);
    const double t = static_cast<double>(s) * cfg.dt;
    const bool record = (s % cfg.record_every == 0) || s == steps;
    monitor.feed(t, u, s == steps);
    if (record && on_record) on_record(t, u);
  }
  monitor.finish();
  return monitor.take();
}

struct IntegralGrowth {
  double value = 0.0;          ///< integral at the last record
  double integrand_end = 0.0;  ///< growth rate dI/dt at the last record
  double decay_rate = 0.0;     ///< terminal exponential decay rate of the integrand
  double tail_estimate = 0.0;  ///< integrand_end / decay_rate, or inf
  bool bounded = false;
};

struct BlowupReport {
  IntegralGrowth x0_sq;
  IntegralGrowth x1;
  /// Both continuation integrals plateau on the recorded horizon.
  bool bounded = false;
};

namespace detail {

inline IntegralGrowth integral_growth(const TimeSeries& s, double (*integrand)(const Record&),
                                      double (*integral)(const Record&), double plateau_tol) {
  IntegralGrowth g;
  if (s.records.empty()) {
    g.bounded = true;
    return g;
  }
  const auto& last = s.records.back();
  g.value = integral(last);
  g.integrand_end = integrand(last);
  if (g.integrand_end == 0.0) {
    g.bounded = true;
    return g;
  }
  const std::size_t lag = std::max<std::size_t>(1, s.records.size() / 10);
  if (s.records.size() <= lag) {
    g.tail_estimate = std::numeric_limits<double>::infinity();
    return g;
  }
  const auto& prev = s.records[s.records.size() - 1 - lag];
  const double q0 = integrand(prev);
  if (q0 > 0.0 && last.t > prev.t) g.decay_rate = std::log(q0 / g.integrand_end) / (last.t - prev.t);
  g.tail_estimate = g.decay_rate > 0.0 ? g.integrand_end / g.decay_rate : std::numeric_limits<double>::infinity();
  g.bounded = g.tail_estimate <= plateau_tol * g.value;
  return g;
}

}  // namespace detail

/// Flags whether int |u|_{X^0}^2 and int |u|_{X^1} have plateaued: the
/// integrand decays exponentially at the end of the run and the extrapolated
/// tail is below plateau_tol of the accumulated value.
inline BlowupReport blowup_monitor(const TimeSeries& s, double plateau_tol = 0.05) {
  BlowupReport r;
  r.x0_sq = detail::integral_growth(
      s, [](const Record& x) { return x.norms.x_0 * x.norms.x_0; }, [](const Record& x) { return x.int_x0_sq; },
      plateau_tol);
  r.x1 = detail::integral_growth(
      s, [](const Record& x) { return x.norms.x_1; }, [](const Record& x) { return x.int_x1; }, plateau_tol);
  r.bounded = r.x0_sq.bounded && r.x1.bounded;
  return r;
}

inline void to_json(nlohmann::json& j, const IntegralGrowth& g) {
  j = {{"value", g.value},
       {"integrand_end", g.integrand_end},
       {"decay_rate", g.decay_rate},
       {"tail_estimate", std::isfinite(g.tail_estimate) ? nlohmann::json(g.tail_estimate) : nlohmann::json(nullptr)},
       {"bounded", g.bounded}};
}

inline void to_json(nlohmann::json& j, const BlowupReport& r) {
  j = {{"int_x0_sq", r.x0_sq}, {"int_x1", r.x1}, {"bounded", r.bounded}};
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One row per record: t, x_m1, x_0, x_1, l2, int_x1, int_x0_sq, int_l1hat_sq,
/// bound_lhs, bound_rhs. Columns other than t carry `prefix`.
inline void write_csv(std::ostream& os, const TimeSeries& s, const std::string& prefix = "") {
  os << "t";
  for (const char* name : {"x_m1", "x_0", "x_1", "l2", "int_x1", "int_x0_sq", "int_l1hat_sq", "bound_lhs", "bound_rhs"})
    os << ',' << prefix << name;
  os << '\n';
  for (const auto& r : s.records) {
    os << format_number(r.t);
    for (double v : {r.norms.x_m1, r.norms.x_0, r.norms.x_1, r.norms.l2, r.int_x1, r.int_x0_sq, r.int_l1hat_sq,
                     r.bound_lhs, r.bound_rhs})
      os << ',' << format_number(v);
    os << '\n';
  }
}

}  // namespace critns
