#pragma once

#include <omp.h>

#include <cstddef>
#include <cstdlib>
#include <span>
#include <string>

namespace critns {

namespace detail {
inline int default_workers() {
  if (const char* env = std::getenv("CRITNS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}
inline int& worker_setting() {
  static int workers = default_workers();
  return workers;
}
}  // namespace detail

/// Number of OpenMP workers used by data-parallel loops. Initialized from the
/// CRITNS_THREADS environment variable, falling back to the OpenMP default.
inline int worker_count() { return detail::worker_setting(); }

/// n <= 0 restores the default.
inline void set_worker_count(int n) { detail::worker_setting() = n > 0 ? n : detail::default_workers(); }

class ScopedWorkerCount {
 public:
  explicit ScopedWorkerCount(int n) : previous_(worker_count()) { set_worker_count(n); }
  ~ScopedWorkerCount() { detail::worker_setting() = previous_; }
  ScopedWorkerCount(const ScopedWorkerCount&) = delete;
  ScopedWorkerCount& operator=(const ScopedWorkerCount&) = delete;

 private:
  int previous_;
};

/// Runs body(i) for i in [0, count). Iterations must be independent; the
/// result may not depend on how they are scheduled.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

/// Pairwise (tree) summation in fixed index order. The bracketing depends only
/// on the length of the input, so the result is independent of worker count.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kBlock = 16;
  if (v.size() <= kBlock) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace critns
