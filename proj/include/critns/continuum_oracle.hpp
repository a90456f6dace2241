#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critns/error.hpp"

namespace critns {

/// Radial integrals on R^3 for Fourier amplitudes |f^(xi)| = phi(|xi|), using
/// int_{R^3} F(|xi|) dxi = 4 pi int_0^inf r^2 F(r) dr.
///
/// A value of std::nullopt means the integral diverges.
using RadialValue = std::optional<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// amplitude * r^exponent on [lo, hi); hi may be infinite.
struct PowerSegment {
  double lo = 0.0;
  double hi = 1.0;
  double exponent = 0.0;
  double amplitude = 1.0;
};

class RadialProfile {
 public:
  /// Segments must be ordered and non-overlapping, with 0 <= lo < hi.
  static RadialProfile piecewise_power(std::vector<PowerSegment> segments) {
    double prev = 0.0;
    for (const auto& s : segments) {
      if (!(s.lo >= prev) || !(s.hi > s.lo)) throw InvalidArgument("power segments must be ordered and non-overlapping");
      if (!(s.amplitude >= 0.0)) throw InvalidArgument("segment amplitude must be nonnegative");
      prev = s.hi;
    }
    RadialProfile p;
    p.segments_ = std::move(segments);
    return p;
  }

  /// A general nonnegative profile supported on [lo, hi).
  static RadialProfile general(std::function<double(double)> phi, double lo, double hi) {
    if (!(hi > lo && lo >= 0.0)) throw InvalidArgument("invalid profile support");
    RadialProfile p;
    p.phi_ = std::move(phi);
    p.lo_ = lo;
    p.hi_ = hi;
    return p;
  }

  bool is_piecewise_power() const noexcept { return !phi_; }
  const std::vector<PowerSegment>& segments() const noexcept { return segments_; }
  double support_lo() const noexcept { return phi_ ? lo_ : (segments_.empty() ? 0.0 : segments_.front().lo); }
  double support_hi() const noexcept { return phi_ ? hi_ : (segments_.empty() ? 0.0 : segments_.back().hi); }

  double operator()(double r) const {
    if (phi_) return (r >= lo_ && r < hi_) ? phi_(r) : 0.0;
    for (const auto& s : segments_)
      if (r >= s.lo && r < s.hi) return s.amplitude * std::pow(r, s.exponent);
    return 0.0;
  }

  /// The profile r -> phi(lambda r).
  RadialProfile scaled(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidArgument("scale factor must be positive");
    if (phi_) {
      auto phi = phi_;
      return general([phi, lambda](double r) { return phi(lambda * r); }, lo_ / lambda, hi_ / lambda);
    }
    std::vector<PowerSegment> segs;
    for (const auto& s : segments_)
      segs.push_back({s.lo / lambda, s.hi / lambda, s.exponent, s.amplitude * std::pow(lambda, s.exponent)});
    return piecewise_power(std::move(segs));
  }

 private:
  std::vector<PowerSegment> segments_;
  std::function<double(double)> phi_;
  double lo_ = 0.0, hi_ = 0.0;
};

namespace detail {

/// int_lo^hi r^e dr in closed form; nullopt when divergent.
inline RadialValue power_integral(double lo, double hi, double e) {
  if (!(hi > lo)) return 0.0;
  if (lo == 0.0 && e <= -1.0) return std::nullopt;
  if (std::isinf(hi) && e >= -1.0) return std::nullopt;
  if (e == -1.0) return std::log(hi / lo);
  const double upper = std::isinf(hi) ? 0.0 : std::pow(hi, e + 1.0);
  const double lower = lo == 0.0 ? 0.0 : std::pow(lo, e + 1.0);
  return (upper - lower) / (e + 1.0);
}

/// 4 pi sum_seg amp^q int_{max(lo,a)}^{min(hi,b)} r^{w + q p} dr, the
/// integral of r^w phi(r)^q over (a, b) in radial form.
inline RadialValue power_moment(const RadialProfile& p, double w, double q, double a = 0.0, double b = kInf) {
  double total = 0.0;
  for (const auto& s : p.segments()) {
    if (s.amplitude == 0.0) continue;
    const double lo = std::max(s.lo, a), hi = std::min(s.hi, b);
    if (!(hi > lo)) continue;
    const auto v = power_integral(lo, hi, w + q * s.exponent);
    if (!v) return std::nullopt;
    total += std::pow(s.amplitude, q) * *v;
  }
  return 4.0 * std::numbers::pi * total;
}

inline RadialValue quadrature(const std::function<double(double)>& f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  double value = 0.0;
  try {
    if (std::isinf(hi)) {
      // r = r0 e^x turns algebraic tails into exponential ones
      const double r0 = lo > 0.0 ? lo : 1.0;
      boost::math::quadrature::exp_sinh<double> integrator;
      auto g = [&](double x) {
        const double r = r0 * std::exp(x);
        if (!std::isfinite(r)) return 0.0;
        const double v = f(r);
        return v == 0.0 ? 0.0 : r * v;
      };
      value = integrator.integrate(g, 0.0, kInf, 1e-13);
      if (lo == 0.0) value += quadrature(f, 0.0, 1.0).value_or(kInf);
    } else {
      // on (-1, 1) the integrator hands over the distance to the nearer end,
      // which keeps r off the endpoints where power laws may be singular
      const double half = 0.5 * (hi - lo);
      auto g = [&](double t, double tc) {
        const double r = t < 0.0 ? lo - half * tc : hi - half * tc;
        return half * f(r);
      };
      boost::math::quadrature::tanh_sinh<double> integrator;
      value = integrator.integrate(g, -1.0, 1.0, 1e-13);
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

/// Adaptive quadrature of 4 pi int_a^b r^w phi(r)^q dr, split at segment
/// boundaries for piecewise profiles.
inline RadialValue quadrature_moment(const RadialProfile& p, double w, double q, double a = 0.0, double b = kInf) {
  auto integrand = [&](double r) {
    const double phi = p(r);
    return phi == 0.0 ? 0.0 : std::pow(r, w) * std::pow(phi, q);
  };
  double total = 0.0;
  auto add = [&](double lo, double hi) {
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    const auto v = quadrature(integrand, lo, hi);
    if (!v) return false;
    total += *v;
    return true;
  };
  if (p.is_piecewise_power()) {
    for (const auto& s : p.segments()) {
      // r^w phi^q is a pure power on the segment; use it directly so the
      // integrator never sees the discontinuity at the segment ends
      const double e = w + q * s.exponent, c = std::pow(s.amplitude, q);
      const double lo = std::max(s.lo, a), hi = std::min(s.hi, b);
      if (!(hi > lo) || c == 0.0) continue;
      const auto v = quadrature([e, c](double r) { return c * std::pow(r, e); }, lo, hi);
      if (!v) return std::nullopt;
      total += *v;
    }
  } else if (!add(p.support_lo(), p.support_hi())) {
    return std::nullopt;
  }
  return 4.0 * std::numbers::pi * total;
}

inline RadialValue moment(const RadialProfile& p, double w, double q, double a = 0.0, double b = kInf) {
  return p.is_piecewise_power() ? power_moment(p, w, q, a, b) : quadrature_moment(p, w, q, a, b);
}

}  // namespace detail

/// int |xi|^s phi(|xi|) dxi = 4 pi int r^{s+2} phi(r) dr.
inline RadialValue radial_x_norm(const RadialProfile& p, double s) { return detail::moment(p, s + 2.0, 1.0); }

/// int |xi|^{2s} phi(|xi|)^2 dxi = 4 pi int r^{2s+2} phi(r)^2 dr.
inline RadialValue radial_hs_sq(const RadialProfile& p, double s) { return detail::moment(p, 2.0 * s + 2.0, 2.0); }

/// Same integrals by adaptive quadrature only (independent of the closed forms).
inline RadialValue quadrature_x_norm(const RadialProfile& p, double s) {
  return detail::quadrature_moment(p, s + 2.0, 1.0);
}
inline RadialValue quadrature_hs_sq(const RadialProfile& p, double s) {
  return detail::quadrature_moment(p, 2.0 * s + 2.0, 2.0);
}

/// Embedding constant sqrt(4 pi) + sqrt(4 pi / (2s - 1)) for s > 1/2.
inline double embedding_constant(double s) {
  if (!(s > 0.5)) throw InvalidArgument("embedding requires s > 1/2");
  const double four_pi = 4.0 * std::numbers::pi;
  return std::sqrt(four_pi) + std::sqrt(four_pi / (2.0 * s - 1.0));
}

struct EmbeddingReport {
  double s = 1.0;
  double lhs = 0.0;    ///< |f|_{X^-1}
  double rhs = 0.0;    ///< C_s |f|_{L2}^{1-1/(2s)} |f|_{H^s}^{1/(2s)}
  double c_s = 0.0;
  double r_star = 0.0; ///< (|f|_{H^s} / |f|_{L2})^{1/s}
  double l2 = 0.0;
  double hs = 0.0;
  double low = 0.0, low_bound = 0.0;    ///< |xi| < R part and sqrt(4 pi R) |f|_{L2}
  double high = 0.0, high_bound = 0.0;  ///< |xi| > R part and sqrt(4 pi/(2s-1)) R^{1/2-s} |f|_{H^s}
  bool low_holds = false, high_holds = false, holds = false;
};

inline void to_json(nlohmann::json& j, const EmbeddingReport& r) {
  j = {{"s", r.s},       {"lhs", r.lhs},         {"rhs", r.rhs},           {"C_s", r.c_s},
       {"R_star", r.r_star}, {"l2", r.l2},      {"hs", r.hs},             {"low", r.low},
       {"low_bound", r.low_bound}, {"high", r.high}, {"high_bound", r.high_bound},
       {"low_holds", r.low_holds}, {"high_holds", r.high_holds}, {"holds", r.holds}};
}

/// |f|_{X^-1} <= C_s |f|_{L2}^{1-1/(2s)} |f|_{H^s}^{1/(2s)}, split at the
/// optimal radius. The low-frequency part is controlled by the L2 norm and
/// the high-frequency part by the H^s norm.
inline EmbeddingReport lemma22_check(const RadialProfile& p, double s) {
  if (!(s > 0.5)) throw InvalidArgument("embedding into X^-1 requires s > 1/2");
  const auto x = radial_x_norm(p, -1.0);
  const auto l2sq = radial_hs_sq(p, 0.0);
  const auto hssq = radial_hs_sq(p, s);
  if (!l2sq || !hssq) throw InvalidArgument("profile must have finite L2 and H^s norms");
  if (!x) throw InvalidArgument("profile has divergent X^-1 norm despite finite L2 and H^s norms");
  EmbeddingReport r;
  r.s = s;
  r.lhs = *x;
  r.l2 = std::sqrt(*l2sq);
  r.hs = std::sqrt(*hssq);
  r.c_s = embedding_constant(s);
  if (r.l2 == 0.0) {
    r.low_holds = r.high_holds = r.holds = r.lhs == 0.0;
    return r;
  }
  r.rhs = r.c_s * std::pow(r.l2, 1.0 - 1.0 / (2.0 * s)) * std::pow(r.hs, 1.0 / (2.0 * s));
  r.r_star = std::pow(r.hs / r.l2, 1.0 / s);
  r.low = detail::moment(p, 1.0, 1.0, 0.0, r.r_star).value_or(kInf);
  r.high = detail::moment(p, 1.0, 1.0, r.r_star, kInf).value_or(kInf);
  const double four_pi = 4.0 * std::numbers::pi;
  r.low_bound = std::sqrt(four_pi * r.r_star) * r.l2;
  r.high_bound = std::sqrt(four_pi / (2.0 * s - 1.0)) * std::pow(r.r_star, 0.5 - s) * r.hs;
  constexpr double slack = 1e-10;
  r.low_holds = r.low <= r.low_bound * (1.0 + slack);
  r.high_holds = r.high <= r.high_bound * (1.0 + slack);
  r.holds = r.lhs <= r.rhs * (1.0 + slack);
  return r;
}

/// |f^| = r^{-3/2} on |xi| < 1.
inline RadialProfile remark_profile_f() { return RadialProfile::piecewise_power({{0.0, 1.0, -1.5, 1.0}}); }
/// |g^| = r^{-7/4} on |xi| > 1.
inline RadialProfile remark_profile_g() { return RadialProfile::piecewise_power({{1.0, kInf, -1.75, 1.0}}); }

inline nlohmann::json radial_value_json(const RadialValue& v) { return v ? nlohmann::json(*v) : nlohmann::json("DIVERGES"); }

}  // namespace critns
