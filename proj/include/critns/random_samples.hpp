#pragma once

#include <cmath>
#include <random>

#include "critns/continuum_oracle.hpp"
#include "critns/field.hpp"

namespace critns {

/// Random scalar field supported in the cube |xi_i| <= radius, with a random
/// fill fraction and coefficient magnitudes spread over four decades. About
/// half of the samples are made real (Hermitian).
template <class Rng>
ScalarSpectralField random_scalar_field(const Grid& grid, int max_radius, Rng& rng) {
  std::uniform_int_distribution<int> radius_dist(0, max_radius);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int radius = radius_dist(rng);
  const double fill = 0.1 + 0.9 * unit(rng);
  const bool real = unit(rng) < 0.5;
  ScalarSpectralField f(grid);
  auto c = f.coeffs();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto xi = grid.wavevector(k);
    if (std::abs(xi[0]) > radius || std::abs(xi[1]) > radius || std::abs(xi[2]) > radius) continue;
    if (unit(rng) > fill) continue;
    const double scale = std::pow(10.0, -3.0 + 4.0 * unit(rng));
    const double re = normal(rng), im = normal(rng);
    c[k] = scale * Complex{re, im};
  }
  if (real) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const std::size_t p = grid.partner(k);
      if (p == k) {
        c[k] = {c[k].real(), 0.0};
      } else if (p > k) {
        const Complex avg = 0.5 * (c[k] + std::conj(c[p]));
        c[k] = avg;
        c[p] = std::conj(avg);
      }
    }
  }
  return f;
}

/// Random divergence-free field with random slope, support, and sparsity:
/// whole shells are dropped at random so that the spectrum is uneven.
template <class Rng>
SpectralVectorField random_test_field(const Grid& grid, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomFieldSpec spec;
  spec.seed = rng();
  spec.slope = -1.0 + 5.0 * unit(rng);
  spec.amplitude = std::pow(10.0, -2.0 + 3.0 * unit(rng));
  spec.k_max = 1.0 + (grid.cutoff() - 1.0) * unit(rng);
  auto u = random_divfree_field(grid, spec);
  const double drop = 0.6 * unit(rng);
  std::vector<double> shell_keep(static_cast<std::size_t>(3 * grid.n() * grid.n() / 4 + 1));
  for (auto& s : shell_keep) s = unit(rng) >= drop ? 1.0 : 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto shell = static_cast<std::size_t>(grid.k2(f));
    if (shell < shell_keep.size() && shell_keep[shell] == 0.0) u.set(f, {});
  }
  return u;
}

/// Random piecewise power-law profile with finite X^-1, L2 and H^s norms.
/// The first segment may start at 0 and the last may extend to infinity; the
/// exponents there are drawn from the convergent ranges.
template <class Rng>
RadialProfile random_power_profile(double s, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count_dist(1, 4);
  const int count = count_dist(rng);
  std::vector<double> breaks{unit(rng) < 0.5 ? 0.0 : std::pow(10.0, -2.0 + 2.0 * unit(rng))};
  for (int i = 0; i < count; ++i) breaks.push_back(breaks.back() + std::pow(10.0, -1.5 + 2.5 * unit(rng)));
  // a single power law cannot converge at both 0 and infinity
  const bool open_end = unit(rng) < 0.5 && !(count == 1 && breaks.front() == 0.0);
  std::vector<PowerSegment> segs;
  for (int i = 0; i < count; ++i) {
    PowerSegment seg;
    seg.lo = breaks[i];
    seg.hi = (open_end && i == count - 1) ? kInf : breaks[i + 1];
    double p_lo = -4.0, p_hi = 3.0;
    if (seg.lo == 0.0) p_lo = -1.5 + 0.02;
    if (std::isinf(seg.hi)) p_hi = std::min(-2.0, -1.5 - s) - 0.02, p_lo = std::min(p_lo, p_hi - 4.0);
    seg.exponent = p_lo + (p_hi - p_lo) * unit(rng);
    seg.amplitude = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    if (unit(rng) < 0.15) seg.amplitude = 0.0;
    segs.push_back(seg);
  }
  return RadialProfile::piecewise_power(std::move(segs));
}

}  // namespace critns
