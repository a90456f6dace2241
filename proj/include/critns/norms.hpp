#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critns/fft.hpp"
#include "critns/field.hpp"
#include "critns/parallel.hpp"

namespace critns {

// All norms are Fourier-side lattice sums with no volume factors:
//   |f|_{X^s} = sum_xi |xi|^s |c_xi|,  |f|_{L^2} = (sum |c_xi|^2)^{1/2},
//   |f|_{H^s} = (sum_{xi != 0} |xi|^{2s} |c_xi|^2)^{1/2}.
// Reductions use pairwise summation in lattice order.

namespace detail {

template <class Term>
double lattice_sum(std::size_t count, Term&& term) {
  std::vector<double> terms(count);
  parallel_for(count, [&](std::size_t f) { terms[f] = term(f); });
  return pairwise_sum(terms);
}

inline double weight(double k2, double s) {
  if (s == 0.0) return 1.0;
  if (s == 1.0) return std::sqrt(k2);
  if (s == -1.0) return 1.0 / std::sqrt(k2);
  return std::pow(k2, 0.5 * s);
}

}  // namespace detail

/// sum_xi |xi|^s |c_xi| for s in {-1, 0, 1}. The mean mode contributes only for
/// s = 0; s = -1 rejects fields with a nonzero mean.
inline double x_norm(const SpectralVectorField& u, int s) {
  if (s < -1 || s > 1) throw InvalidArgument("x_norm supports s in {-1, 0, 1}");
  const auto& g = u.grid();
  if (s == -1 && u.magnitude(0) != 0.0) throw InvalidArgument("mean mode present");
  return detail::lattice_sum(g.size(), [&](std::size_t f) {
    if (f == 0) return s == 0 ? u.magnitude(0) : 0.0;
    return detail::weight(g.k2(f), s) * u.magnitude(f);
  });
}

inline double x_norm(const ScalarSpectralField& u, int s) {
  if (s < -1 || s > 1) throw InvalidArgument("x_norm supports s in {-1, 0, 1}");
  const auto& g = u.grid();
  const auto c = u.coeffs();
  if (s == -1 && c[0] != Complex{}) throw InvalidArgument("mean mode present");
  return detail::lattice_sum(g.size(), [&](std::size_t f) {
    if (f == 0) return s == 0 ? std::abs(c[0]) : 0.0;
    return detail::weight(g.k2(f), s) * std::abs(c[f]);
  });
}

inline double l2_norm(const SpectralVectorField& u) {
  return std::sqrt(detail::lattice_sum(u.grid().size(), [&](std::size_t f) {
    const double m = u.magnitude(f);
    return m * m;
  }));
}

inline double hs_norm(const SpectralVectorField& u, double s) {
  const auto& g = u.grid();
  return std::sqrt(detail::lattice_sum(g.size(), [&](std::size_t f) {
    if (f == 0) return 0.0;
    const double m = u.magnitude(f);
    return detail::weight(g.k2(f), 2.0 * s) * m * m;
  }));
}

/// |u^|_{L^1}; identical to x_norm(u, 0) including the mean mode.
inline double fourier_l1(const SpectralVectorField& u) { return x_norm(u, 0); }

struct NormReport {
  double x_m1 = 0.0;
  double x_0 = 0.0;
  double x_1 = 0.0;
  double l2 = 0.0;
  double hs = 0.0;
  double s = 1.0;
};

inline NormReport norm_report(const SpectralVectorField& u, double s = 1.0) {
  return {x_norm(u, -1), x_norm(u, 0), x_norm(u, 1), l2_norm(u), hs_norm(u, s), s};
}

inline void to_json(nlohmann::json& j, const NormReport& r) {
  j = {{"x_m1", r.x_m1}, {"x_0", r.x_0}, {"x_1", r.x_1}, {"l2", r.l2}, {"hs_s", r.hs}, {"s", r.s}};
}

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

inline void to_json(nlohmann::json& j, const InequalityReport& r) {
  j = {{"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}};
}

namespace detail {

/// Largest |xi_i| over the nonzero coefficients; -1 for the zero field.
inline int support_radius(const ScalarSpectralField& f) {
  int r = -1;
  const auto& g = f.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (f.coeffs()[k] == Complex{}) continue;
    if (g.on_nyquist(k)) throw InvalidArgument("support too large for alias-free convolution (Nyquist plane occupied)");
    const auto xi = g.wavevector(k);
    r = std::max({r, std::abs(xi[0]), std::abs(xi[1]), std::abs(xi[2])});
  }
  return r;
}

}  // namespace detail

/// Coefficients of the product f*g computed on a padded m^3 lattice large
/// enough that the periodic convolution equals the free one. Returned as a
/// list of nonzero-capable coefficients on the padded lattice (flat order).
inline std::vector<Complex> product_coefficients(const ScalarSpectralField& f, const ScalarSpectralField& g,
                                                 int* padded_size = nullptr) {
  if (!(f.grid() == g.grid())) throw InvalidArgument("fields live on different grids");
  const int rf = detail::support_radius(f), rg = detail::support_radius(g);
  if (rf < 0 || rg < 0) {
    if (padded_size) *padded_size = 0;
    return {};
  }
  int m = 2 * (rf + rg) + 2;
  m = std::max(4, m + (m % 2));
  if (padded_size) *padded_size = m;
  const auto& grid = f.grid();
  const std::size_t total = static_cast<std::size_t>(m) * m * m;
  auto a = detail::alloc_complex(total), b = detail::alloc_complex(total);
  auto pa = detail::alloc_complex(total), pb = detail::alloc_complex(total);
  std::fill(a.get(), a.get() + total, Complex{});
  std::fill(b.get(), b.get() + total, Complex{});
  auto wrap = [m](int k) { return k >= 0 ? k : k + m; };
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (f.coeffs()[k] == Complex{} && g.coeffs()[k] == Complex{}) continue;
    const auto xi = grid.wavevector(k);
    const std::size_t idx = (static_cast<std::size_t>(wrap(xi[0])) * m + wrap(xi[1])) * m + wrap(xi[2]);
    a[idx] = f.coeffs()[k];
    b[idx] = g.coeffs()[k];
  }
  const auto& fft = detail::ComplexFft::get(m);
  fft.backward(a.get(), pa.get());
  fft.backward(b.get(), pb.get());
  for (std::size_t k = 0; k < total; ++k) pa[k] *= pb[k];
  fft.forward(pa.get(), a.get());
  const double scale = 1.0 / static_cast<double>(total);
  std::vector<Complex> out(total);
  for (std::size_t k = 0; k < total; ++k) out[k] = a[k] * scale;
  return out;
}

/// |fg|_{X^0} <= |f|_{X^0} |g|_{X^0}, with 1e-12 relative slack.
inline InequalityReport check_product_inequality(const ScalarSpectralField& f, const ScalarSpectralField& g) {
  const auto prod = product_coefficients(f, g);
  std::vector<double> mags(prod.size());
  for (std::size_t k = 0; k < prod.size(); ++k) mags[k] = std::abs(prod[k]);
  InequalityReport r;
  r.lhs = pairwise_sum(mags);
  r.rhs = x_norm(f, 0) * x_norm(g, 0);
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

/// |f|_{X^0} <= |f|_{X^-1}^{1/2} |f|_{X^1}^{1/2}, with 1e-12 relative slack.
inline InequalityReport check_interpolation(const SpectralVectorField& f) {
  InequalityReport r;
  r.lhs = x_norm(f, 0);
  r.rhs = std::sqrt(x_norm(f, -1)) * std::sqrt(x_norm(f, 1));
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

/// Rescales a field so that its X^-1 norm equals target (zero stays zero).
inline SpectralVectorField scaled_to_x_m1(SpectralVectorField u, double target) {
  const double current = x_norm(u, -1);
  if (current == 0.0) return u;
  u *= target / current;
  return u;
}

}  // namespace critns
