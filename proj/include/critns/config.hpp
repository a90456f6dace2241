#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "critns/continuum_oracle.hpp"
#include "critns/dynamics.hpp"
#include "critns/error.hpp"
#include "critns/field.hpp"

namespace critns {

// Configuration grammar (one statement per line):
//
//   # comment            ; also after a value
//   [section]
//   key = value
//
// Keys before the first section header belong to [run]. Only the keys listed
// in known_keys() are accepted; `mode` and `segment` may repeat.

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"experiment", "seed", "output_dir"}},
      {"solver", {"nu", "n", "dt", "t_end", "record_every"}},
      {"data",
       {"preset", "amplitude", "seed", "slope", "k_max", "k_min", "x_m1", "tail_fraction", "tail_seed", "tail_slope",
        "tail_k_min", "tail_k_max", "mode"}},
      {"split", {"epsilon", "k"}},
      {"stability", {"delta_fraction", "seed", "slope", "k_max"}},
      {"picard", {"horizon", "n_time", "max_iter", "tol"}},
      {"oracle", {"s", "profile", "segment"}},
      {"inequalities", {"samples", "n"}},
  };
  return keys;
}

inline const std::set<std::string>& experiment_names() {
  static const std::set<std::string> names{"simulate", "decay", "split", "stability", "picard", "oracle", "inequalities"};
  return names;
}

struct DataRecipe {
  std::string preset = "random";  ///< shear | taylor_green | random | modes
  double amplitude = 1.0;
  std::optional<std::uint64_t> seed;  ///< defaults to the run seed
  double slope = 2.0;
  double k_max = 4.0;
  double k_min = 0.0;
  std::optional<double> x_m1;  ///< rescale the datum to this X^-1 norm
  double tail_fraction = 0.0;  ///< share of x_m1 carried by an added random tail
  std::uint64_t tail_seed = 17;
  double tail_slope = 1.0;
  double tail_k_min = 3.0;
  double tail_k_max = 6.0;
  std::vector<Mode> modes;
};

struct ExperimentConfig {
  std::string experiment = "simulate";
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  double nu = 1.0;
  int n = 32;
  double dt = 1e-3;
  double t_end = 5.0;
  int record_every = 1;

  DataRecipe data;

  std::optional<double> epsilon;  ///< defaults to nu/2
  std::optional<double> k;

  double delta_fraction = 0.9;
  std::uint64_t perturbation_seed = 99;
  double perturbation_slope = 2.0;
  double perturbation_k_max = 4.0;

  double picard_horizon = 0.1;
  std::size_t picard_n_time = 100;
  int picard_max_iter = 50;
  double picard_tol = 1e-12;

  double oracle_s = 1.0;
  std::string oracle_profile = "gaussian";  ///< gaussian | segments
  std::vector<PowerSegment> segments;

  std::size_t samples = 10000;
  int inequality_n = 16;

  double resolved_epsilon() const { return epsilon.value_or(nu / 2.0); }
  std::uint64_t data_seed() const { return data.seed.value_or(seed); }

  SolverConfig solver() const {
    SolverConfig s;
    s.nu = nu;
    s.dt = dt;
    s.t_end = t_end;
    s.grid = Grid(n);
    s.record_every = record_every;
    return s;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, const std::string& key, int line) {
  if (v == "inf" || v == "infinity") return kInf;
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (...) {
  }
  throw ConfigError("key '" + key + "': expected a number, got '" + v + "'", line);
}

inline std::int64_t parse_int(const std::string& v, const std::string& key, int line) {
  std::int64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'", line);
  return x;
}

inline std::vector<double> parse_numbers(const std::string& v, const std::string& key, int line) {
  std::istringstream is(v);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_double(tok, key, line));
  return out;
}

}  // namespace detail

/// Parses and validates a configuration. Unknown sections or keys and
/// out-of-range physical parameters are rejected.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw, section = "run";
  int line = 0;
  std::set<std::string> seen;
  std::map<std::string, int> key_line;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = detail::trim(s.substr(1, s.size() - 2));
      if (!known_keys().count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));
    if (!known_keys().at(section).count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    const std::string full = section + "." + key;
    if (key != "mode" && key != "segment" && !seen.insert(full).second)
      throw ConfigError("duplicate key '" + full + "'", line);
    key_line[full] = line;
    auto num = [&] { return detail::parse_double(val, full, line); };
    auto integer = [&] { return detail::parse_int(val, full, line); };
    auto positive_integer = [&] {
      const auto x = integer();
      if (x < 1) throw ConfigError("key '" + full + "' must be positive", line);
      return x;
    };

    if (full == "run.experiment") {
      if (!experiment_names().count(val)) throw ConfigError("unknown experiment '" + val + "'", line);
      c.experiment = val;
    } else if (full == "run.seed") {
      c.seed = static_cast<std::uint64_t>(integer());
    } else if (full == "run.output_dir") {
      c.output_dir = val;
    } else if (full == "solver.nu") {
      c.nu = num();
    } else if (full == "solver.n") {
      c.n = static_cast<int>(integer());
    } else if (full == "solver.dt") {
      c.dt = num();
    } else if (full == "solver.t_end") {
      c.t_end = num();
    } else if (full == "solver.record_every") {
      c.record_every = static_cast<int>(positive_integer());
    } else if (full == "data.preset") {
      if (val != "shear" && val != "taylor_green" && val != "random" && val != "modes")
        throw ConfigError("unknown data preset '" + val + "'", line);
      c.data.preset = val;
    } else if (full == "data.amplitude") {
      c.data.amplitude = num();
    } else if (full == "data.seed") {
      c.data.seed = static_cast<std::uint64_t>(integer());
    } else if (full == "data.slope") {
      c.data.slope = num();
    } else if (full == "data.k_max") {
      c.data.k_max = num();
    } else if (full == "data.k_min") {
      c.data.k_min = num();
    } else if (full == "data.x_m1") {
      c.data.x_m1 = num();
    } else if (full == "data.tail_fraction") {
      c.data.tail_fraction = num();
    } else if (full == "data.tail_seed") {
      c.data.tail_seed = static_cast<std::uint64_t>(integer());
    } else if (full == "data.tail_slope") {
      c.data.tail_slope = num();
    } else if (full == "data.tail_k_min") {
      c.data.tail_k_min = num();
    } else if (full == "data.tail_k_max") {
      c.data.tail_k_max = num();
    } else if (full == "data.mode") {
      // kx ky kz : re0 im0 re1 im1 re2 im2
      const auto colon = val.find(':');
      if (colon == std::string::npos) throw ConfigError("mode must be 'kx ky kz : re0 im0 re1 im1 re2 im2'", line);
      const auto xi = detail::parse_numbers(val.substr(0, colon), full, line);
      const auto cs = detail::parse_numbers(val.substr(colon + 1), full, line);
      if (xi.size() != 3 || cs.size() != 6) throw ConfigError("mode needs 3 integers and 6 numbers", line);
      Mode m;
      for (int d = 0; d < 3; ++d) {
        if (xi[d] != std::round(xi[d])) throw ConfigError("mode wavevector must be integer", line);
        m.xi[d] = static_cast<int>(xi[d]);
        m.c[d] = {cs[2 * d], cs[2 * d + 1]};
      }
      c.data.modes.push_back(m);
    } else if (full == "split.epsilon") {
      c.epsilon = num();
    } else if (full == "split.k") {
      c.k = num();
    } else if (full == "stability.delta_fraction") {
      c.delta_fraction = num();
    } else if (full == "stability.seed") {
      c.perturbation_seed = static_cast<std::uint64_t>(integer());
    } else if (full == "stability.slope") {
      c.perturbation_slope = num();
    } else if (full == "stability.k_max") {
      c.perturbation_k_max = num();
    } else if (full == "picard.horizon") {
      c.picard_horizon = num();
    } else if (full == "picard.n_time") {
      c.picard_n_time = static_cast<std::size_t>(positive_integer());
    } else if (full == "picard.max_iter") {
      c.picard_max_iter = static_cast<int>(positive_integer());
    } else if (full == "picard.tol") {
      c.picard_tol = num();
    } else if (full == "oracle.s") {
      c.oracle_s = num();
    } else if (full == "oracle.profile") {
      if (val != "gaussian" && val != "segments")
        throw ConfigError("unknown oracle profile '" + val + "'", line);
      c.oracle_profile = val;
    } else if (full == "oracle.segment") {
      const auto xs = detail::parse_numbers(val, full, line);
      if (xs.size() != 3 && xs.size() != 4) throw ConfigError("segment is 'lo hi exponent [amplitude]'", line);
      c.segments.push_back({xs[0], xs[1], xs[2], xs.size() == 4 ? xs[3] : 1.0});
    } else if (full == "inequalities.samples") {
      c.samples = static_cast<std::size_t>(positive_integer());
    } else if (full == "inequalities.n") {
      c.inequality_n = static_cast<int>(integer());
    }
  }

  auto line_of = [&](const std::string& k) { return key_line.count(k) ? key_line[k] : 0; };
  auto require = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("key '" + key + "' " + what, line_of(key));
  };
  require(c.nu > 0.0, "solver.nu", "must be positive");
  require(c.dt > 0.0, "solver.dt", "must be positive");
  require(c.t_end >= 0.0, "solver.t_end", "must be nonnegative");
  require(c.n >= 4 && c.n % 2 == 0 && c.n <= 512, "solver.n", "must be an even integer in [4, 512]");
  {
    const double steps = c.t_end / c.dt;
    require(std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps), "solver.t_end",
            "must be an integer multiple of dt");
  }
  require(!c.data.x_m1 || *c.data.x_m1 >= 0.0, "data.x_m1", "must be nonnegative");
  require(c.data.tail_fraction >= 0.0 && c.data.tail_fraction < 1.0, "data.tail_fraction", "must lie in [0, 1)");
  require(c.data.k_max > 0.0, "data.k_max", "must be positive");
  require(!c.epsilon || *c.epsilon > 0.0, "split.epsilon", "must be positive");
  require(!c.k || *c.k > 0.0, "split.k", "must be positive");
  require(c.delta_fraction >= 0.0, "stability.delta_fraction", "must be nonnegative");
  require(c.picard_horizon > 0.0, "picard.horizon", "must be positive");
  require(c.picard_tol > 0.0, "picard.tol", "must be positive");
  require(c.inequality_n >= 4 && c.inequality_n % 2 == 0, "inequalities.n", "must be an even integer >= 4");
  require(c.oracle_profile != "segments" || !c.segments.empty(), "oracle.profile",
          "'segments' requires at least one segment");
  if (c.epsilon && *c.epsilon > c.nu / 2.0)
    warn("split.epsilon=" + std::to_string(*c.epsilon) +
         " exceeds nu/2; the remainder evolution is no longer guaranteed to be small-data");
  return c;
}

/// Fully resolved configuration in the same grammar; parsing it reproduces c.
inline std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  auto num = [](double v) { return format_number(v); };
  os << "[run]\nexperiment = " << c.experiment << "\nseed = " << c.seed << "\noutput_dir = " << c.output_dir << "\n\n";
  os << "[solver]\nnu = " << num(c.nu) << "\nn = " << c.n << "\ndt = " << num(c.dt) << "\nt_end = " << num(c.t_end)
     << "\nrecord_every = " << c.record_every << "\n\n";
  os << "[data]\npreset = " << c.data.preset << "\namplitude = " << num(c.data.amplitude)
     << "\nseed = " << c.data_seed() << "\nslope = " << num(c.data.slope) << "\nk_max = " << num(c.data.k_max)
     << "\nk_min = " << num(c.data.k_min) << '\n';
  if (c.data.x_m1) os << "x_m1 = " << num(*c.data.x_m1) << '\n';
  os << "tail_fraction = " << num(c.data.tail_fraction) << "\ntail_seed = " << c.data.tail_seed
     << "\ntail_slope = " << num(c.data.tail_slope) << "\ntail_k_min = " << num(c.data.tail_k_min)
     << "\ntail_k_max = " << num(c.data.tail_k_max) << '\n';
  for (const auto& m : c.data.modes) {
    os << "mode = " << m.xi[0] << ' ' << m.xi[1] << ' ' << m.xi[2] << " :";
    for (const auto& z : m.c) os << ' ' << num(z.real()) << ' ' << num(z.imag());
    os << '\n';
  }
  os << "\n[split]\nepsilon = " << num(c.resolved_epsilon()) << '\n';
  if (c.k) os << "k = " << num(*c.k) << '\n';
  os << "\n[stability]\ndelta_fraction = " << num(c.delta_fraction) << "\nseed = " << c.perturbation_seed
     << "\nslope = " << num(c.perturbation_slope) << "\nk_max = " << num(c.perturbation_k_max) << "\n\n";
  os << "[picard]\nhorizon = " << num(c.picard_horizon) << "\nn_time = " << c.picard_n_time
     << "\nmax_iter = " << c.picard_max_iter << "\ntol = " << num(c.picard_tol) << "\n\n";
  os << "[oracle]\ns = " << num(c.oracle_s) << "\nprofile = " << c.oracle_profile << '\n';
  for (const auto& s : c.segments)
    os << "segment = " << num(s.lo) << ' ' << num(s.hi) << ' ' << num(s.exponent) << ' ' << num(s.amplitude) << '\n';
  os << "\n[inequalities]\nsamples = " << c.samples << "\nn = " << c.inequality_n << '\n';
  return os.str();
}

}  // namespace critns
