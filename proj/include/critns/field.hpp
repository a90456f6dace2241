#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critns/error.hpp"
#include "critns/grid.hpp"
#include "critns/parallel.hpp"

namespace critns {

using Complex = std::complex<double>;
using ComplexVec3 = std::array<Complex, 3>;

inline double magnitude(const ComplexVec3& c) noexcept {
  return std::sqrt(std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]));
}

/// Real velocity field u(x) = sum_xi c_xi exp(i xi.x) stored as the full
/// lattice of 3-component Fourier coefficients.
///
/// Invariants maintained by every constructor and operation in this library:
/// c_{partner(xi)} == conj(c_xi) exactly, and c_0 == 0.
class SpectralVectorField {
 public:
  explicit SpectralVectorField(Grid grid) : grid_(std::move(grid)) {
    for (auto& c : coeffs_) c.assign(grid_.size(), Complex{});
  }

  const Grid& grid() const noexcept { return grid_; }

  std::span<const Complex> component(int d) const noexcept { return coeffs_[d]; }
  std::span<Complex> component(int d) noexcept { return coeffs_[d]; }

  ComplexVec3 at(std::size_t f) const noexcept { return {coeffs_[0][f], coeffs_[1][f], coeffs_[2][f]}; }
  void set(std::size_t f, const ComplexVec3& c) noexcept {
    for (int d = 0; d < 3; ++d) coeffs_[d][f] = c[d];
  }

  /// Euclidean norm of the 3-component coefficient at a mode.
  double magnitude(std::size_t f) const noexcept { return critns::magnitude(at(f)); }

  double max_magnitude() const noexcept {
    double m = 0.0;
    for (std::size_t f = 0; f < grid_.size(); ++f) m = std::max(m, magnitude(f));
    return m;
  }

  bool is_zero() const noexcept {
    for (const auto& c : coeffs_)
      for (const auto& z : c)
        if (z != Complex{}) return false;
    return true;
  }

  SpectralVectorField& operator+=(const SpectralVectorField& o) {
    require_same_grid(o);
    for (int d = 0; d < 3; ++d)
      for (std::size_t f = 0; f < grid_.size(); ++f) coeffs_[d][f] += o.coeffs_[d][f];
    return *this;
  }
  SpectralVectorField& operator-=(const SpectralVectorField& o) {
    require_same_grid(o);
    for (int d = 0; d < 3; ++d)
      for (std::size_t f = 0; f < grid_.size(); ++f) coeffs_[d][f] -= o.coeffs_[d][f];
    return *this;
  }
  SpectralVectorField& operator*=(double s) noexcept {
    for (auto& c : coeffs_)
      for (auto& z : c) z *= s;
    return *this;
  }

  friend SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) { return a += b; }
  friend SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) { return a -= b; }
  friend SpectralVectorField operator*(double s, SpectralVectorField a) { return a *= s; }
  friend SpectralVectorField operator*(SpectralVectorField a, double s) { return a *= s; }

  friend bool operator==(const SpectralVectorField& a, const SpectralVectorField& b) {
    return a.grid_ == b.grid_ && a.coeffs_ == b.coeffs_;
  }

 private:
  void require_same_grid(const SpectralVectorField& o) const {
    if (!(grid_ == o.grid_)) throw InvalidArgument("fields live on different grids");
  }

  Grid grid_;
  std::array<std::vector<Complex>, 3> coeffs_;
};

/// Scalar spectral field. Coefficients are arbitrary complex numbers, so the
/// represented function may be complex valued; the mean mode is allowed.
class ScalarSpectralField {
 public:
  explicit ScalarSpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.size()) {}

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }

  /// True when the coefficients describe a real-valued function.
  bool is_real() const noexcept {
    for (std::size_t f = 0; f < grid_.size(); ++f)
      if (coeffs_[grid_.partner(f)] != std::conj(coeffs_[f])) return false;
    return true;
  }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

struct Mode {
  Wavevector xi;
  ComplexVec3 c;
};

/// Builds a real field from a list of modes. Conjugate partners are filled in
/// automatically; a nonzero mean mode is dropped with a warning.
inline SpectralVectorField from_modes(const Grid& grid, std::span<const Mode> modes) {
  SpectralVectorField u(grid);
  std::vector<std::uint8_t> assigned(grid.size(), 0);
  auto conj3 = [](const ComplexVec3& c) { return ComplexVec3{std::conj(c[0]), std::conj(c[1]), std::conj(c[2])}; };

  for (const auto& m : modes) {
    const auto f = grid.find(m.xi);
    if (!f) {
      throw InvalidArgument("mode (" + std::to_string(m.xi[0]) + "," + std::to_string(m.xi[1]) + "," +
                            std::to_string(m.xi[2]) + ") is outside the lattice");
    }
    if (m.xi == Wavevector{0, 0, 0}) {
      if (magnitude(m.c) != 0.0) warn("mean mode supplied with nonzero coefficient; forced to zero");
      continue;
    }
    const std::size_t p = grid.partner(*f);
    if (p == *f) {
      for (const auto& z : m.c)
        if (z.imag() != 0.0) throw InvalidArgument("self-conjugate mode requires a real coefficient");
    }
    const ComplexVec3 pc = conj3(m.c);
    if (assigned[*f] && u.at(*f) != m.c) throw InvalidArgument("conflicting assignments for the same mode");
    if (assigned[p] && u.at(p) != pc) throw InvalidArgument("conflicting conjugate assignment");
    u.set(*f, m.c);
    u.set(p, pc);
    assigned[*f] = assigned[p] = 1;
  }
  return u;
}

inline SpectralVectorField from_modes(const Grid& grid, std::initializer_list<Mode> modes) {
  return from_modes(grid, std::span<const Mode>(modes.begin(), modes.size()));
}

/// Largest deviation from exact Hermitian symmetry; zero for valid fields.
inline double hermitian_defect(const SpectralVectorField& u) {
  double worst = 0.0;
  const auto& g = u.grid();
  for (std::size_t f = 0; f < g.size(); ++f) {
    const std::size_t p = g.partner(f);
    for (int d = 0; d < 3; ++d)
      worst = std::max(worst, std::abs(u.component(d)[p] - std::conj(u.component(d)[f])));
  }
  return worst;
}

/// max_xi |xi . c_xi| / max_xi |c_xi| (zero for the zero field).
inline double divergence_residual(const SpectralVectorField& u) {
  const auto& g = u.grid();
  double worst = 0.0, cmax = 0.0;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto xi = g.wavevector(f);
    const auto c = u.at(f);
    worst = std::max(worst, std::abs(double(xi[0]) * c[0] + double(xi[1]) * c[1] + double(xi[2]) * c[2]));
    cmax = std::max(cmax, magnitude(c));
  }
  return cmax > 0.0 ? worst / cmax : 0.0;
}

/// Per-mode orthogonal projection c <- c - (xi.c / |xi|^2) xi.
///
/// Modes on a Nyquist plane have no conjugate-symmetric projector (their
/// partner is not at -xi) and are set to zero.
inline SpectralVectorField leray_project(const SpectralVectorField& u) {
  SpectralVectorField out(u.grid());
  const auto& g = u.grid();
  parallel_for(g.size(), [&](std::size_t f) {
    if (f == 0 || g.on_nyquist(f)) return;
    const auto xi = g.wavevector(f);
    const double kx = xi[0], ky = xi[1], kz = xi[2];
    const auto c = u.at(f);
    const Complex s = (kx * c[0] + ky * c[1] + kz * c[2]) / g.k2(f);
    out.set(f, {c[0] - s * kx, c[1] - s * ky, c[2] - s * kz});
  });
  return out;
}

/// Zeroes every mode outside the per-axis cutoff |xi_i| <= floor(fraction*n/2).
inline SpectralVectorField dealias(const SpectralVectorField& u) {
  SpectralVectorField out = u;
  const auto& g = u.grid();
  for (std::size_t f = 0; f < g.size(); ++f)
    if (!g.in_mask(f)) out.set(f, {});
  return out;
}

struct RandomFieldSpec {
  std::uint64_t seed = 1;
  double slope = 2.0;       ///< |c_xi| = amplitude * |xi|^-slope
  double amplitude = 1.0;
  double k_max = 4.0;       ///< support is k_min < |xi| <= k_max
  double k_min = 0.0;
};

/// Deterministic random divergence-free field. Each active mode gets a random
/// complex direction orthogonal to xi, normalized to magnitude
/// amplitude * |xi|^-slope.
inline SpectralVectorField random_divfree_field(const Grid& grid, const RandomFieldSpec& spec) {
  if (spec.k_max > grid.cutoff())
    throw InvalidArgument("k_max " + std::to_string(spec.k_max) + " exceeds dealiasing cutoff " +
                          std::to_string(grid.cutoff()));
  SpectralVectorField u(grid);
  if (spec.amplitude == 0.0) return u;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double kmax2 = spec.k_max * spec.k_max, kmin2 = spec.k_min * spec.k_min;
  for (std::size_t f = 1; f < grid.size(); ++f) {
    const std::size_t p = grid.partner(f);
    if (p < f) continue;
    const double k2 = grid.k2(f);
    if (k2 > kmax2 || k2 <= kmin2) continue;
    ComplexVec3 z;
    for (auto& zi : z) {
      const double re = normal(rng);
      const double im = normal(rng);
      zi = {re, im};
    }
    const auto xi = grid.wavevector(f);
    const Complex s = (double(xi[0]) * z[0] + double(xi[1]) * z[1] + double(xi[2]) * z[2]) / k2;
    for (int d = 0; d < 3; ++d) z[d] -= s * double(xi[d]);
    const double m = magnitude(z);
    if (m == 0.0) continue;
    const double target = spec.amplitude * std::pow(std::sqrt(k2), -spec.slope);
    for (auto& zi : z) zi *= target / m;
    u.set(f, z);
    u.set(p, {std::conj(z[0]), std::conj(z[1]), std::conj(z[2])});
  }
  return u;
}

/// (0, amplitude*cos x1, 0).
inline SpectralVectorField shear_mode(const Grid& grid, double amplitude = 1.0) {
  return from_modes(grid, {Mode{{1, 0, 0}, {0.0, amplitude / 2, 0.0}}});
}

/// amplitude * (sin x1 cos x2, -cos x1 sin x2, 0); X^-1 norm equals |amplitude|.
inline SpectralVectorField taylor_green(const Grid& grid, double amplitude = 1.0) {
  const Complex q{0.0, amplitude / 4};
  return from_modes(grid, {Mode{{1, 1, 0}, {-q, q, 0.0}}, Mode{{1, -1, 0}, {-q, -q, 0.0}}});
}

}  // namespace critns
