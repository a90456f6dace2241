#include <gtest/gtest.h>

#include <random>

#include "critns/fft.hpp"
#include "critns/field.hpp"
#include "critns/random_samples.hpp"

using namespace critns;

namespace {

double max_rel_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  double worst = 0.0;
  for (std::size_t f = 0; f < a.grid().size(); ++f)
    for (int d = 0; d < 3; ++d) worst = std::max(worst, std::abs(a.at(f)[d] - b.at(f)[d]));
  return worst / std::max(a.max_magnitude(), 1e-300);
}

}  // namespace

TEST(Grid, LatticeAndMaskForN8) {
  const Grid g = make_grid(8);
  EXPECT_EQ(g.size(), 512u);
  EXPECT_EQ(g.cutoff(), 2);
  int lo = 100, hi = -100;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto xi = g.wavevector(f);
    for (int d = 0; d < 3; ++d) lo = std::min(lo, xi[d]), hi = std::max(hi, xi[d]);
    const bool inside = std::abs(xi[0]) <= 2 && std::abs(xi[1]) <= 2 && std::abs(xi[2]) <= 2;
    EXPECT_EQ(g.in_mask(f), inside);
    EXPECT_EQ(g.k2(f), xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  }
  EXPECT_EQ(lo, -3);
  EXPECT_EQ(hi, 4);
}

TEST(Grid, SmallestGrid) {
  const Grid g = make_grid(4);
  EXPECT_EQ(g.size(), 64u);
  EXPECT_TRUE(g.find({-1, 2, 0}).has_value());
  EXPECT_FALSE(g.find({-2, 0, 0}).has_value());
}

TEST(Grid, RejectsOddAndTinySizes) {
  EXPECT_THROW(make_grid(7), InvalidArgument);
  EXPECT_THROW(make_grid(2), InvalidArgument);
  EXPECT_THROW(make_grid(0), InvalidArgument);
}

TEST(Grid, PartnerIsNegation) {
  const Grid g(6);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto xi = g.wavevector(f), mx = g.wavevector(g.partner(f));
    for (int d = 0; d < 3; ++d) {
      if (xi[d] == 3) EXPECT_EQ(mx[d], 3);
      else EXPECT_EQ(mx[d], -xi[d]);
    }
    EXPECT_EQ(g.partner(g.partner(f)), f);
  }
}

TEST(FromModes, HermitianFillOfRealCoefficient) {
  const Grid g(8);
  const auto u = from_modes(g, {{{1, 0, 0}, {0, 0.5, 0}}});
  EXPECT_EQ(u.at(*g.find({1, 0, 0})), (ComplexVec3{0, 0.5, 0}));
  EXPECT_EQ(u.at(*g.find({-1, 0, 0})), (ComplexVec3{0, 0.5, 0}));
  EXPECT_EQ(hermitian_defect(u), 0.0);
}

TEST(FromModes, ConjugatesComplexCoefficient) {
  const Grid g(8);
  const Complex a(0.3, -0.7);
  const auto u = from_modes(g, {{{1, 2, -1}, {a, 0, 0}}});
  EXPECT_EQ(u.at(*g.find({-1, -2, 1}))[0], std::conj(a));
}

TEST(FromModes, EmptyListGivesZeroField) {
  EXPECT_TRUE(from_modes(Grid(8), std::initializer_list<Mode>{}).is_zero());
}

TEST(FromModes, Errors) {
  const Grid g(8);
  EXPECT_THROW(from_modes(g, {{{8, 0, 0}, {0, 1, 0}}}), InvalidArgument);
  EXPECT_THROW(from_modes(g, {{{1, 0, 0}, {0, 1, 0}}, {{1, 0, 0}, {0, 2, 0}}}), InvalidArgument);
  EXPECT_THROW(from_modes(g, {{{1, 0, 0}, {0, 1, 0}}, {{-1, 0, 0}, {0, 2, 0}}}), InvalidArgument);
}

TEST(FromModes, MeanModeDroppedWithWarning) {
  WarningCapture cap;
  const auto u = from_modes(Grid(8), {{{0, 0, 0}, {1, 0, 0}}});
  EXPECT_TRUE(u.is_zero());
  EXPECT_EQ(cap.messages().size(), 1u);
}

TEST(Leray, ClosedFormProjections) {
  const Grid g(8);
  auto project_one = [&](Wavevector xi, ComplexVec3 c) {
    SpectralVectorField u(g);
    u.set(*g.find(xi), c);
    return leray_project(u).at(*g.find(xi));
  };
  EXPECT_EQ(project_one({0, 0, 1}, {1, 0, 0}), (ComplexVec3{1, 0, 0}));
  EXPECT_EQ(project_one({0, 0, 1}, {0, 0, 1}), (ComplexVec3{0, 0, 0}));
  const auto c = project_one({1, 1, 0}, {1, 0, 0});
  EXPECT_NEAR(c[0].real(), 0.5, 1e-15);
  EXPECT_NEAR(c[1].real(), -0.5, 1e-15);
  EXPECT_EQ(c[2], Complex{});
}

TEST(Leray, IdempotentAndDivergenceFree) {
  std::mt19937_64 rng(3);
  const Grid g(12);
  SpectralVectorField u(g);
  std::normal_distribution<double> z;
  for (std::size_t f = 1; f < g.size(); ++f) u.set(f, {Complex(z(rng), z(rng)), Complex(z(rng), z(rng)), Complex(z(rng), z(rng))});
  const auto p = leray_project(u);
  EXPECT_LE(divergence_residual(p), 1e-14);
  EXPECT_LE(max_rel_diff(p, leray_project(p)), 1e-15);
}

TEST(RandomField, DeterministicAndDivergenceFree) {
  const Grid g(16);
  const RandomFieldSpec spec{42, 2.0, 1.0, 5.0};
  const auto a = random_divfree_field(g, spec), b = random_divfree_field(g, spec);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == random_divfree_field(g, {43, 2.0, 1.0, 5.0}));
  EXPECT_LE(divergence_residual(a), 1e-12);
  EXPECT_EQ(hermitian_defect(a), 0.0);
  EXPECT_EQ(a.at(0), (ComplexVec3{}));
}

TEST(RandomField, ZeroAmplitudeAndSupport) {
  const Grid g(16);
  EXPECT_TRUE(random_divfree_field(g, {1, 2.0, 0.0, 4.0}).is_zero());
  const auto u = random_divfree_field(g, {1, 1.0, 1.0, 4.0, 2.0});
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (u.magnitude(f) == 0.0) continue;
    EXPECT_GT(g.k2(f), 4.0);
    EXPECT_LE(g.k2(f), 16.0);
  }
  EXPECT_THROW(random_divfree_field(g, {1, 1.0, 1.0, 6.0}), InvalidArgument);
}

TEST(RandomField, ModeMagnitudesFollowSlope) {
  const Grid g(16);
  const auto u = random_divfree_field(g, {7, 1.5, 0.3, 5.0});
  for (std::size_t f = 1; f < g.size(); ++f)
    if (u.magnitude(f) > 0.0) {
      EXPECT_NEAR(u.magnitude(f), 0.3 * std::pow(g.k2(f), -0.75), 1e-14);
    }
}

TEST(Transform, SingleModeIsCosine) {
  const Grid g(8);
  const auto u = shear_mode(g, 1.0);  // c = (0, 1/2, 0) at +-(1,0,0)
  const auto x = transform_to_physical(u);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int l = 0; l < 8; ++l) {
        const std::size_t f = g.flat(i, j, l);
        EXPECT_NEAR(x.samples[1][f], std::cos(2 * std::numbers::pi * i / 8), 1e-15);
        EXPECT_EQ(x.samples[0][f], 0.0);
      }
}

TEST(Transform, ZeroFieldGivesZeroSamples) {
  const auto x = transform_to_physical(SpectralVectorField(Grid(8)));
  for (const auto& s : x.samples)
    for (double v : s) EXPECT_EQ(v, 0.0);
}

TEST(Transform, RoundTripRandomField) {
  for (int n : {8, 16, 24}) {
    const Grid g(n, 1.0);
    const auto u = random_divfree_field(g, {static_cast<std::uint64_t>(n), 0.5, 1.0, n / 2.0 - 1});
    EXPECT_LE(max_rel_diff(u, transform_to_spectral(transform_to_physical(u))), 1e-12) << "n=" << n;
  }
}

TEST(Transform, MeanRemovedWithWarning) {
  const Grid g(8);
  PhysicalVectorField x{g, {}};
  for (auto& s : x.samples) s.assign(g.size(), 1.0);
  WarningCapture cap;
  EXPECT_TRUE(transform_to_spectral(x).is_zero());
  EXPECT_FALSE(cap.messages().empty());
}

TEST(Dealias, KeepsMaskAndZeroesNyquist) {
  const Grid g(8);
  const auto inside = random_divfree_field(g, {5, 0.0, 1.0, 2.0});
  EXPECT_TRUE(dealias(inside) == inside);
  SpectralVectorField u(g);
  u.set(*g.find({4, 0, 0}), {0, 1, 0});
  EXPECT_TRUE(dealias(u).is_zero());
  const auto full = random_divfree_field(Grid(8, 1.0), {5, 0.0, 1.0, 3.0});
  SpectralVectorField v(g);
  for (std::size_t f = 0; f < g.size(); ++f) v.set(f, full.at(f));
  EXPECT_TRUE(dealias(dealias(v)) == dealias(v));
}

TEST(Presets, TaylorGreenPhysicalForm) {
  const Grid g(8);
  const auto x = transform_to_physical(taylor_green(g, 1.0));
  const double h = 2 * std::numbers::pi / 8;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const std::size_t f = g.flat(i, j, 3);
      EXPECT_NEAR(x.samples[0][f], std::sin(i * h) * std::cos(j * h), 1e-15);
      EXPECT_NEAR(x.samples[1][f], -std::cos(i * h) * std::sin(j * h), 1e-15);
    }
}

TEST(Property, RandomTestFieldsAreRealAndSolenoidal) {
  std::mt19937_64 rng(11);
  const Grid g(16);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_test_field(g, rng);
    EXPECT_EQ(hermitian_defect(u), 0.0);
    EXPECT_LE(divergence_residual(u), 1e-12);
    EXPECT_EQ(u.magnitude(0), 0.0);
  }
}
