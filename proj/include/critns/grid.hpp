#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critns/error.hpp"

namespace critns {

using Wavevector = std::array<int, 3>;

/// Periodic lattice of n^3 Fourier modes on the 2*pi torus.
///
/// Storage index i in [0, n) maps to wavenumber i for i <= n/2 and i - n
/// otherwise, so each axis covers {-n/2+1, ..., n/2}. Flat indices are
/// row-major, (i*n + j)*n + l. The conjugate partner of a mode is the mode at
/// the negated index modulo n; for modes on a Nyquist plane (a component equal
/// to n/2) that partner is not the negated wavevector.
class Grid {
 public:
  explicit Grid(int n, double dealias_fraction = 2.0 / 3.0) {
    if (n < 4 || n % 2 != 0) throw InvalidArgument("grid size must be even and >= 4, got " + std::to_string(n));
    if (n > 512) throw InvalidArgument("grid size " + std::to_string(n) + " exceeds supported maximum 512");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
      throw InvalidArgument("dealias fraction must lie in (0, 1]");
    auto d = std::make_shared<Data>();
    d->n = n;
    d->fraction = dealias_fraction;
    d->cutoff = static_cast<int>(std::floor(dealias_fraction * (n / 2) + 1e-12));
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    d->k2.resize(total);
    d->flags.resize(total);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const std::size_t f = (static_cast<std::size_t>(i) * n + j) * n + l;
          const int a = wavenumber(n, i), b = wavenumber(n, j), c = wavenumber(n, l);
          d->k2[f] = static_cast<double>(a * a + b * b + c * c);
          std::uint8_t flag = 0;
          if (std::abs(a) <= d->cutoff && std::abs(b) <= d->cutoff && std::abs(c) <= d->cutoff) flag |= kMask;
          if (a == n / 2 || b == n / 2 || c == n / 2) flag |= kNyquist;
          d->flags[f] = flag;
        }
    data_ = std::move(d);
  }

  int n() const noexcept { return data_->n; }
  double period() const noexcept { return 2.0 * std::numbers::pi; }
  double dealias_fraction() const noexcept { return data_->fraction; }
  /// Largest |xi_i| kept by the dealiasing mask.
  int cutoff() const noexcept { return data_->cutoff; }
  std::size_t size() const noexcept { return data_->k2.size(); }
  /// Number of complex entries in the r2c half spectrum, n*n*(n/2+1).
  std::size_t half_size() const noexcept {
    return static_cast<std::size_t>(n()) * n() * (n() / 2 + 1);
  }

  int wavenumber(int index) const noexcept { return wavenumber(n(), index); }

  std::size_t flat(int i, int j, int l) const noexcept {
    return (static_cast<std::size_t>(i) * n() + j) * n() + l;
  }

  Wavevector wavevector(std::size_t f) const noexcept {
    const auto nn = static_cast<std::size_t>(n());
    return {wavenumber(static_cast<int>(f / (nn * nn))), wavenumber(static_cast<int>((f / nn) % nn)),
            wavenumber(static_cast<int>(f % nn))};
  }

  double k2(std::size_t f) const noexcept { return data_->k2[f]; }
  std::span<const double> k2() const noexcept { return data_->k2; }
  bool in_mask(std::size_t f) const noexcept { return (data_->flags[f] & kMask) != 0; }
  bool on_nyquist(std::size_t f) const noexcept { return (data_->flags[f] & kNyquist) != 0; }

  std::size_t partner(std::size_t f) const noexcept {
    const auto nn = static_cast<std::size_t>(n());
    const std::size_t i = f / (nn * nn), j = (f / nn) % nn, l = f % nn;
    return flat(static_cast<int>((nn - i) % nn), static_cast<int>((nn - j) % nn), static_cast<int>((nn - l) % nn));
  }

  /// Flat index of a lattice wavevector, or nullopt when outside the lattice.
  std::optional<std::size_t> find(const Wavevector& xi) const noexcept {
    std::array<int, 3> idx{};
    for (int d = 0; d < 3; ++d) {
      if (xi[d] <= -n() / 2 || xi[d] > n() / 2) return std::nullopt;
      idx[d] = xi[d] >= 0 ? xi[d] : xi[d] + n();
    }
    return flat(idx[0], idx[1], idx[2]);
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n() == b.n() && a.dealias_fraction() == b.dealias_fraction();
  }

 private:
  static constexpr std::uint8_t kMask = 1;
  static constexpr std::uint8_t kNyquist = 2;

  static int wavenumber(int n, int index) noexcept { return index <= n / 2 ? index : index - n; }

  struct Data {
    int n = 0;
    double fraction = 2.0 / 3.0;
    int cutoff = 0;
    std::vector<double> k2;
    std::vector<std::uint8_t> flags;
  };
  std::shared_ptr<const Data> data_;
};

inline Grid make_grid(int n) { return Grid(n); }

}  // namespace critns
