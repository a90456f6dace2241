#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "critns/field.hpp"

namespace critns {

namespace detail {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

inline FftwBuffer<double> alloc_real(std::size_t n) { return FftwBuffer<double>(fftw_alloc_real(n)); }
inline FftwBuffer<Complex> alloc_complex(std::size_t n) {
  return FftwBuffer<Complex>(reinterpret_cast<Complex*>(fftw_alloc_complex(n)));
}

inline fftw_complex* as_fftw(Complex* p) noexcept { return reinterpret_cast<fftw_complex*>(p); }

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Real 3-D transforms of size n^3. Plans are made once per size with
/// FFTW_ESTIMATE and executed through the new-array interface, so a single
/// engine can serve concurrent callers that own their buffers.
class RealFft {
 public:
  static const RealFft& get(int n) {
    std::lock_guard lock(planner_mutex());
    static std::map<int, std::unique_ptr<RealFft>> cache;
    auto& slot = cache[n];
    if (!slot) slot.reset(new RealFft(n));
    return *slot;
  }

  ~RealFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  /// half (n*n*(n/2+1), destroyed) -> real samples (n^3), unnormalized.
  void backward(Complex* half, double* real) const { fftw_execute_dft_c2r(backward_, as_fftw(half), real); }
  /// real samples -> half spectrum, unnormalized.
  void forward(double* real, Complex* half) const { fftw_execute_dft_r2c(forward_, real, as_fftw(half)); }

 private:
  explicit RealFft(int n) {
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    const std::size_t half = static_cast<std::size_t>(n) * n * (n / 2 + 1);
    auto r = alloc_real(total);
    auto c = alloc_complex(half);
    forward_ = fftw_plan_dft_r2c_3d(n, n, n, r.get(), as_fftw(c.get()), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_3d(n, n, n, as_fftw(c.get()), r.get(), FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }

  fftw_plan forward_{};
  fftw_plan backward_{};
};

/// Complex 3-D transforms of size m^3 (used for exact scalar convolutions).
class ComplexFft {
 public:
  static const ComplexFft& get(int m) {
    std::lock_guard lock(planner_mutex());
    static std::map<int, std::unique_ptr<ComplexFft>> cache;
    auto& slot = cache[m];
    if (!slot) slot.reset(new ComplexFft(m));
    return *slot;
  }

  ~ComplexFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  void forward(Complex* in, Complex* out) const { fftw_execute_dft(forward_, as_fftw(in), as_fftw(out)); }
  void backward(Complex* in, Complex* out) const { fftw_execute_dft(backward_, as_fftw(in), as_fftw(out)); }

 private:
  explicit ComplexFft(int m) {
    const std::size_t total = static_cast<std::size_t>(m) * m * m;
    auto a = alloc_complex(total);
    auto b = alloc_complex(total);
    forward_ = fftw_plan_dft_3d(m, m, m, as_fftw(a.get()), as_fftw(b.get()), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_3d(m, m, m, as_fftw(a.get()), as_fftw(b.get()), FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  fftw_plan forward_{};
  fftw_plan backward_{};
};

inline void full_to_half(const Grid& g, std::span<const Complex> full, Complex* half) {
  const int n = g.n(), h = n / 2 + 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex* src = full.data() + g.flat(i, j, 0);
      Complex* dst = half + (static_cast<std::size_t>(i) * n + j) * h;
      std::copy(src, src + h, dst);
    }
}

/// Expands an r2c half spectrum into the full lattice. The l = 0 and l = n/2
/// planes are re-symmetrized so the result is exactly Hermitian.
inline void half_to_full(const Grid& g, const Complex* half, std::span<Complex> full) {
  const int n = g.n(), h = n / 2 + 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex* src = half + (static_cast<std::size_t>(i) * n + j) * h;
      std::copy(src, src + h, full.data() + g.flat(i, j, 0));
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int pi = (n - i) % n, pj = (n - j) % n;
      for (int l = h; l < n; ++l) full[g.flat(i, j, l)] = std::conj(full[g.flat(pi, pj, n - l)]);
      for (int l : {0, n / 2}) {
        const std::size_t f = g.flat(i, j, l), p = g.flat(pi, pj, l);
        if (f == p) {
          full[f] = {full[f].real(), 0.0};
        } else if (p < f) {
          full[f] = std::conj(full[p]);
        }
      }
    }
}

}  // namespace detail

/// Velocity samples on the uniform n^3 grid x_j = 2*pi*j/n.
struct PhysicalVectorField {
  Grid grid;
  std::array<std::vector<double>, 3> samples;
};

/// u(x) = sum_xi c_xi exp(i xi.x) evaluated on the grid.
inline PhysicalVectorField transform_to_physical(const SpectralVectorField& u) {
  const auto& g = u.grid();
  const auto& fft = detail::RealFft::get(g.n());
  PhysicalVectorField out{g, {}};
  for (auto& s : out.samples) s.resize(g.size());
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (int d = 0; d < 3; ++d) {
    auto half = detail::alloc_complex(g.half_size());
    auto real = detail::alloc_real(g.size());
    detail::full_to_half(g, u.component(d), half.get());
    fft.backward(half.get(), real.get());
    std::copy(real.get(), real.get() + g.size(), out.samples[d].begin());
  }
  return out;
}

/// Inverse of transform_to_physical. A nonzero mean is removed with a warning
/// because velocity fields carry no mean mode.
inline SpectralVectorField transform_to_spectral(const PhysicalVectorField& x) {
  const auto& g = x.grid;
  for (const auto& s : x.samples)
    if (s.size() != g.size()) throw InvalidArgument("physical sample array does not match grid size");
  const auto& fft = detail::RealFft::get(g.n());
  SpectralVectorField u(g);
  const double scale = 1.0 / static_cast<double>(g.size());
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (int d = 0; d < 3; ++d) {
    auto half = detail::alloc_complex(g.half_size());
    auto real = detail::alloc_real(g.size());
    std::copy(x.samples[d].begin(), x.samples[d].end(), real.get());
    fft.forward(real.get(), half.get());
    for (std::size_t k = 0; k < g.half_size(); ++k) half[k] *= scale;
    detail::half_to_full(g, half.get(), u.component(d));
  }
  const auto c0 = u.at(0);
  if (magnitude(c0) > 1e-14 * std::max(1.0, u.max_magnitude())) warn("physical samples have nonzero mean; removed");
  u.set(0, {});
  return u;
}

}  // namespace critns
