#pragma once

// Independent reference implementations used by the unit tests. Everything
// here is plain nested loops over lattice pairs with no FFTs.

#include <complex>
#include <map>

#include "critns/field.hpp"

namespace critns::reference {

using Key = std::array<int, 3>;

/// Free convolution of two scalar fields: (f g)^(xi) = sum_{p+q=xi} f_p g_q.
inline std::map<Key, Complex> brute_product(const ScalarSpectralField& f, const ScalarSpectralField& g) {
  std::map<Key, Complex> out;
  const auto& grid = f.grid();
  for (std::size_t a = 0; a < grid.size(); ++a) {
    if (f.coeffs()[a] == Complex{}) continue;
    const auto p = grid.wavevector(a);
    for (std::size_t b = 0; b < grid.size(); ++b) {
      if (g.coeffs()[b] == Complex{}) continue;
      const auto q = grid.wavevector(b);
      out[{p[0] + q[0], p[1] + q[1], p[2] + q[2]}] += f.coeffs()[a] * g.coeffs()[b];
    }
  }
  return out;
}

/// -P(xi) i xi_k sum_{p+q=xi} u_j(p) u_k(q), restricted to the dealiasing mask
/// for both inputs and the output.
inline SpectralVectorField brute_nonlinear(const SpectralVectorField& u) {
  const auto& g = u.grid();
  SpectralVectorField out(g);
  std::vector<std::array<Complex, 9>> prod(g.size());
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (!g.in_mask(a)) continue;
    const auto p = g.wavevector(a);
    const auto up = u.at(a);
    for (std::size_t b = 0; b < g.size(); ++b) {
      if (!g.in_mask(b)) continue;
      const auto q = g.wavevector(b);
      const auto target = g.find({p[0] + q[0], p[1] + q[1], p[2] + q[2]});
      if (!target || !g.in_mask(*target)) continue;
      const auto uq = u.at(b);
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) prod[*target][3 * j + k] += up[j] * uq[k];
    }
  }
  const Complex I(0.0, 1.0);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const double k2 = g.k2(f);
    if (k2 == 0.0 || !g.in_mask(f)) continue;
    const auto xi = g.wavevector(f);
    ComplexVec3 div{};
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) div[j] -= I * static_cast<double>(xi[k]) * prod[f][3 * j + k];
    Complex dot = 0.0;
    for (int j = 0; j < 3; ++j) dot += static_cast<double>(xi[j]) * div[j];
    ComplexVec3 c;
    for (int i = 0; i < 3; ++i) c[i] = div[i] - static_cast<double>(xi[i]) * dot / k2;
    out.set(f, c);
  }
  return out;
}

inline double max_abs_difference(const SpectralVectorField& a, const SpectralVectorField& b) {
  double worst = 0.0;
  for (std::size_t f = 0; f < a.grid().size(); ++f)
    for (int d = 0; d < 3; ++d) worst = std::max(worst, std::abs(a.at(f)[d] - b.at(f)[d]));
  return worst;
}

}  // namespace critns::reference
