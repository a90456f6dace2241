#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "critns/field.hpp"

namespace critns {

// Checkpoint layout (host byte order, little-endian on all supported targets):
//
//   char[8]  magic "CRITNSF1"
//   int32    n
//   float64  dealias_fraction
//   uint64   count
//   count x { int32 xi[3]; float64 re0, im0, re1, im1, re2, im2 }
//
// Only nonzero modes of the non-redundant half lattice (flat index <= partner
// index) are stored; the conjugate half is restored on load.

inline constexpr char kCheckpointMagic[8] = {'C', 'R', 'I', 'T', 'N', 'S', 'F', '1'};

namespace detail {
template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidArgument("truncated checkpoint");
  return v;
}
}  // namespace detail

inline void write_checkpoint(std::ostream& os, const SpectralVectorField& u) {
  const auto& g = u.grid();
  std::vector<std::size_t> keep;
  for (std::size_t f = 0; f < g.size(); ++f)
    if (f <= g.partner(f) && u.magnitude(f) != 0.0) keep.push_back(f);
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  detail::put<std::int32_t>(os, g.n());
  detail::put<double>(os, g.dealias_fraction());
  detail::put<std::uint64_t>(os, keep.size());
  for (const std::size_t f : keep) {
    const auto xi = g.wavevector(f);
    for (int d = 0; d < 3; ++d) detail::put<std::int32_t>(os, xi[d]);
    for (int d = 0; d < 3; ++d) {
      detail::put<double>(os, u.component(d)[f].real());
      detail::put<double>(os, u.component(d)[f].imag());
    }
  }
  if (!os) throw Error("failed to write checkpoint");
}

inline SpectralVectorField read_checkpoint(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw InvalidArgument("not a checkpoint file");
  const auto n = detail::get<std::int32_t>(is);
  const auto fraction = detail::get<double>(is);
  const auto count = detail::get<std::uint64_t>(is);
  const Grid g(n, fraction);
  if (count > g.size()) throw InvalidArgument("checkpoint mode count exceeds lattice size");
  std::vector<Mode> modes(count);
  for (auto& m : modes) {
    for (int d = 0; d < 3; ++d) m.xi[d] = detail::get<std::int32_t>(is);
    for (int d = 0; d < 3; ++d) {
      const double re = detail::get<double>(is);
      const double im = detail::get<double>(is);
      m.c[d] = {re, im};
    }
  }
  return from_modes(g, modes);
}

}  // namespace critns
