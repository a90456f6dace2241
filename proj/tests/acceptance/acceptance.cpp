// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "critns/critns.hpp"

using namespace critns;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("critns_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

SolverConfig solver(int n, double nu, double dt, double t_end, int record_every = 1) {
  SolverConfig c;
  c.grid = Grid(n);
  c.nu = nu;
  c.dt = dt;
  c.t_end = t_end;
  c.record_every = record_every;
  return c;
}

// shared between the small-data criteria
struct SmallDataBase {
  SolverConfig cfg = solver(32, 1.0, 1e-3, 5.0);
  SpectralVectorField u0{Grid(32)};
  TimeSeries series;
};
SmallDataBase small_base;

Verdict ac1_product() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g(16);
  std::mt19937_64 rng(2024);
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto f = random_scalar_field(g, 4, rng), h = random_scalar_field(g, 4, rng);
    const auto r = check_product_inequality(f, h);
    violations += !r.holds;
    if (r.rhs > 0) worst = std::max(worst, r.lhs / r.rhs);
  }
  const double t = seconds_since(t0);
  return {violations == 0 && t < 60.0,
          fmt("%d violations in 10000 pairs, max lhs/rhs %.15f, %.1f s", violations, worst, t)};
}

Verdict ac2_interpolation() {
  const Grid g(16);
  std::mt19937_64 rng(2025);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) violations += !check_interpolation(random_test_field(g, rng)).holds;
  double shell_dev = 0.0;
  int shells = 0;
  for (int r2 = 1; r2 <= 25; ++r2) {
    const double r = std::sqrt(double(r2));
    auto u = random_divfree_field(g, {static_cast<std::uint64_t>(r2), 0.0, 1.0, r, std::sqrt(r2 - 0.5)});
    if (u.is_zero()) continue;
    ++shells;
    const auto rep = check_interpolation(u);
    shell_dev = std::max(shell_dev, std::abs(rep.lhs - rep.rhs) / rep.rhs);
  }
  return {violations == 0 && shell_dev <= 1e-12,
          fmt("%d violations in 10000 fields; %d single shells, max rel deviation %.2e", violations, shells, shell_dev)};
}

Verdict ac3_remark() {
  ExperimentConfig c = parse_config("experiment = oracle\n");
  c.output_dir = scratch("oracle").string();
  const auto o = run(c);
  const auto j = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "run.json"));
  const auto& rem = j["result"]["remark"];
  const double pi = std::numbers::pi;
  const bool f_ok = rem["f"]["x_m1"].is_number() && std::abs(rem["f"]["x_m1"].get<double>() - 8 * pi) <= 1e-8;
  const bool g_ok = rem["g"]["x_m1"] == "DIVERGES";
  const bool fh_ok = rem["f"]["hs_sq"].is_number() && std::abs(rem["f"]["hs_sq"].get<double>() - 4 * pi) <= 1e-8;
  const bool gh_ok = rem["g"]["hs_sq"] == "DIVERGES";
  const bool note = rem.contains("note") && rem["note"].is_string();
  return {o.exit_code == 0 && f_ok && g_ok && fh_ok && gh_ok && note,
          fmt("f X^-1 = %.12f (8pi = %.12f), g X^-1 %s; f H^1/2^2 = %.12f, g H^1/2^2 %s; discrepancy note %s",
              rem["f"]["x_m1"].is_number() ? rem["f"]["x_m1"].get<double>() : -1.0, 8 * pi,
              g_ok ? "DIVERGES" : "finite", rem["f"]["hs_sq"].is_number() ? rem["f"]["hs_sq"].get<double>() : -1.0,
              gh_ok ? "DIVERGES" : "finite", note ? "present" : "missing")};
}

Verdict ac4_embedding() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2026);
  int failures = 0, count = 0;
  double worst = 0.0;
  for (double s : {0.6, 1.0, 2.0})
    for (int i = 0; i < 1000; ++i) {
      const auto r = lemma22_check(random_power_profile(s, rng), s);
      ++count;
      if (!(r.holds && r.low_holds && r.high_holds)) ++failures;
      if (r.rhs > 0) worst = std::max(worst, r.lhs / r.rhs);
    }
  const double t = seconds_since(t0);
  return {failures == 0 && t < 30.0,
          fmt("%d/%d profiles fail (embedding or either display), max lhs/rhs %.4f, %.2f s", failures, count, worst, t)};
}

Verdict ac5_small_data() {
  const auto t0 = std::chrono::steady_clock::now();
  auto& b = small_base;
  b.u0 = scaled_to_x_m1(random_divfree_field(b.cfg.grid, {5, 2.0, 1.0, 4.0}), 0.5);
  b.series = evolve(b.u0, b.cfg);
  double worst = -kInf;
  for (const auto& r : b.series.records) worst = std::max(worst, r.bound_lhs - r.bound_rhs);
  const double ratio = b.series.back().norms.x_m1 / b.series.x_m1_initial;
  const double t = seconds_since(t0);
  return {b.series.bound_active && worst <= 1e-3 && ratio <= 1e-2 && t < 300.0,
          fmt("%zu records, max(lhs - rhs) = %.3e, final/initial X^-1 = %.3e, %.1f s", b.series.records.size(), worst,
              ratio, t)};
}

Verdict ac6_exact_solutions() {
  const auto cfg = solver(32, 1.0, 1e-3, 1.0);
  auto run_to = [&](SpectralVectorField u) {
    const Stepper s(cfg);
    for (long k = 0; k < cfg.steps(); ++k) u = s.advance(u, k * cfg.dt);
    return u;
  };
  auto rel = [](const SpectralVectorField& a, const SpectralVectorField& b) {
    return x_norm(a - b, -1) / x_norm(b, -1);
  };
  const auto shear0 = shear_mode(cfg.grid, 1.0);
  auto shear_exact = shear0;
  shear_exact *= std::exp(-1.0);
  const double e_shear = rel(run_to(shear0), shear_exact);
  const auto tg0 = taylor_green(cfg.grid, 1.0);
  auto tg_exact = tg0;
  tg_exact *= std::exp(-2.0);
  const double e_tg = rel(run_to(tg0), tg_exact);
  // independent check that the projected nonlinearity of Taylor-Green vanishes
  const Grid g8(8);
  const auto tg8 = taylor_green(g8, 1.0);
  const NonlinearOperator op(g8);
  const auto fast = op(tg8);
  double brute = 0.0;
  {
    std::vector<std::array<Complex, 9>> prod(g8.size());
    for (std::size_t a = 0; a < g8.size(); ++a) {
      if (!g8.in_mask(a) || tg8.magnitude(a) == 0.0) continue;
      const auto p = g8.wavevector(a);
      for (std::size_t c = 0; c < g8.size(); ++c) {
        if (!g8.in_mask(c) || tg8.magnitude(c) == 0.0) continue;
        const auto q = g8.wavevector(c);
        const auto t = g8.find({p[0] + q[0], p[1] + q[1], p[2] + q[2]});
        if (!t || !g8.in_mask(*t)) continue;
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) prod[*t][3 * j + k] += tg8.at(a)[j] * tg8.at(c)[k];
      }
    }
    for (std::size_t f = 1; f < g8.size(); ++f) {
      if (!g8.in_mask(f)) continue;
      const auto xi = g8.wavevector(f);
      ComplexVec3 div{};
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) div[j] -= Complex(0, 1) * double(xi[k]) * prod[f][3 * j + k];
      Complex dot = 0.0;
      for (int j = 0; j < 3; ++j) dot += double(xi[j]) * div[j];
      for (int i = 0; i < 3; ++i) brute = std::max(brute, std::abs(div[i] - double(xi[i]) * dot / g8.k2(f)));
    }
  }
  const double fast_max = fast.max_magnitude();
  return {e_shear <= 1e-8 && e_tg <= 1e-8 && brute <= 1e-12 && fast_max <= 1e-12,
          fmt("shear rel err %.2e, Taylor-Green rel err %.2e at t=1; n=8 projected nonlinearity: brute %.1e, fft %.1e",
              e_shear, e_tg, brute, fast_max)};
}

Verdict ac7_picard() {
  const Grid g(16);
  std::mt19937_64 rng(2027);
  std::uniform_real_distribution<double> size(0.1, 0.9), slope(0.5, 2.5), kmax(1.5, 5.0);
  double worst = 0.0;
  int bad_tails = 0, unconverged = 0;
  for (int i = 0; i < 20; ++i) {
    const auto u0 = scaled_to_x_m1(random_divfree_field(g, {rng(), slope(rng), 1.0, kmax(rng)}), size(rng));
    const auto cv = cross_validate(u0, 1.0, {0.1, 100, 60, 1e-12}, 1e-3);
    worst = std::max(worst, cv.max_relative_discrepancy);
    bad_tails += !cv.picard.ratio_tail_below_one();
    unconverged += !cv.picard.converged;
  }
  return {worst <= 1e-4 && bad_tails == 0 && unconverged == 0,
          fmt("20 data, max rel X^-1 discrepancy %.2e, %d ratio tails >= 1, %d unconverged", worst, bad_tails,
              unconverged)};
}

Verdict ac8_splitting() {
  const auto t0 = std::chrono::steady_clock::now();
  const double nu = 0.5;
  const auto cfg = solver(32, nu, 1e-3, 4.0, 10);
  const auto tg = scaled_to_x_m1(taylor_green(cfg.grid, 1.0), 0.9 * 2 * nu);
  const auto tail = scaled_to_x_m1(random_divfree_field(cfg.grid, {17, 1.0, 1.0, 6.0, 3.0}), 0.1 * 2 * nu);
  const auto u0 = tg + tail;
  SplitReport rep;
  try {
    rep = run_splitting_experiment(u0, nu / 2, cfg);
  } catch (const Unresolved& e) {
    return {false, fmt("run became unresolved: %s", e.what())};
  }
  const double t = seconds_since(t0);
  return {rep.all_hold() && t < 600.0,
          fmt("|u0|=%.3f k=%g |w0|=%.4f t0=%.3f; max (lhs-rhs)/rhs: a %.2e b %.2e c %.2e d %.2e; %.0f s",
              rep.x_m1_u0, rep.k, rep.x_m1_w0, rep.t0.value_or(-1.0), rep.a.max_residual, rep.b.max_residual,
              rep.c.max_residual, rep.d.max_residual, t)};
}

Verdict ac9_stability() {
  auto& b = small_base;
  const double nu = b.cfg.nu;
  const auto thr = perturbation_threshold(b.series, nu);
  const auto p = scaled_to_x_m1(random_divfree_field(b.cfg.grid, {99, 2.0, 1.0, 4.0}), 0.9 * thr.threshold);
  const auto rep = run_stability(b.u0, p, b.cfg, b.series);
  return {rep.precondition_met && rep.all_hold(),
          fmt("threshold %.4e, delta %.4e; max (lhs-rhs)/rhs %.2e; wall %s; sup|w| = %.3e vs nu/8 = %.3e",
              thr.threshold, rep.delta, rep.bound.max_residual, rep.wall_T ? "tripped" : "never tripped", rep.sup_w,
              nu / 8)};
}

Verdict ac10_determinism() {
  auto c = parse_config("experiment = simulate\n[solver]\nn = 32\ndt = 0.005\nt_end = 0.25\n[data]\nx_m1 = 1.5\nslope = 1\nk_max = 8\n");
  const int many = std::max(4u, std::thread::hardware_concurrency());
  c.output_dir = scratch("det1").string();
  {
    ScopedWorkerCount one(1);
    run(c);
  }
  const auto a = slurp(fs::path(c.output_dir) / "series.csv");
  c.output_dir = scratch("detN").string();
  {
    ScopedWorkerCount n(many);
    run(c);
  }
  const auto b = slurp(fs::path(c.output_dir) / "series.csv");
  return {!a.empty() && a == b, fmt("series.csv %zu bytes, 1 worker vs %d workers: %s", a.size(), many,
                                    a == b ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  set_warning_handler([](const std::string& m) { std::fprintf(stderr, "warning: %s\n", m.c_str()); });
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1 product inequality", ac1_product},
      {"AC2 interpolation inequality", ac2_interpolation},
      {"AC3 radial remark values", ac3_remark},
      {"AC4 embedding on random profiles", ac4_embedding},
      {"AC5 small-data bound and decay", ac5_small_data},
      {"AC6 exact-solution regressions", ac6_exact_solutions},
      {"AC7 Picard cross-validation", ac7_picard},
      {"AC8 splitting experiment", ac8_splitting},
      {"AC9 perturbation stability", ac9_stability},
      {"AC10 determinism across worker counts", ac10_determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s  %-40s %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
