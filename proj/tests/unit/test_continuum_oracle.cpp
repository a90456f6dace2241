#include <gtest/gtest.h>

#include <random>

#include "critns/continuum_oracle.hpp"
#include "critns/random_samples.hpp"

using namespace critns;

namespace {

const double pi = std::numbers::pi;

RadialProfile gaussian() {
  return RadialProfile::general([](double r) { return std::exp(-r * r); }, 0.0, kInf);
}

}  // namespace

TEST(Radial, RemarkXNormValues) {
  const auto f = radial_x_norm(remark_profile_f(), -1);
  ASSERT_TRUE(f.has_value());
  EXPECT_NEAR(*f, 8 * pi, 1e-12);
  EXPECT_FALSE(radial_x_norm(remark_profile_g(), -1).has_value());
}

TEST(Radial, RemarkHalfDerivativeValues) {
  const auto f = radial_hs_sq(remark_profile_f(), 0.5);
  ASSERT_TRUE(f.has_value());
  EXPECT_NEAR(*f, 4 * pi, 1e-12);
  EXPECT_FALSE(radial_hs_sq(remark_profile_g(), 0.5).has_value());
  // same verdicts from the quadrature route
  EXPECT_NEAR(*quadrature_hs_sq(remark_profile_f(), 0.5), 4 * pi, 1e-8);
  EXPECT_NEAR(*quadrature_x_norm(remark_profile_f(), -1), 8 * pi, 1e-8);
}

TEST(Radial, ZeroProfile) {
  const auto z = RadialProfile::piecewise_power({{0.0, 1.0, 0.0, 0.0}});
  EXPECT_EQ(*radial_x_norm(z, -1), 0.0);
  EXPECT_EQ(*radial_hs_sq(z, 1), 0.0);
}

TEST(Radial, GaussianAgainstLatticeRiemannSum) {
  // int e^{-2|xi|^2} dxi = (pi/2)^{3/2}
  const auto q = radial_hs_sq(gaussian(), 0.0);
  ASSERT_TRUE(q.has_value());
  const double h = 0.05;
  const int m = 100;
  double riemann = 0.0;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int l = -m; l <= m; ++l) riemann += std::exp(-2 * h * h * (i * i + j * j + l * l));
  riemann *= h * h * h;
  EXPECT_NEAR(*q, riemann, 1e-4);
  EXPECT_NEAR(*q, std::pow(pi / 2, 1.5), 1e-10);
  EXPECT_NEAR(*radial_x_norm(gaussian(), -1), 2 * pi, 1e-10);
}

TEST(Radial, DilationScaling) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_power_profile(1.0, rng);
    const double lambda = 0.3 + 3.0 * std::uniform_real_distribution<double>()(rng);
    const auto q = p.scaled(lambda);
    for (int s : {-1, 0, 1}) {
      const auto a = radial_x_norm(p, s), b = radial_x_norm(q, s);
      ASSERT_EQ(a.has_value(), b.has_value());
      if (a) {
        EXPECT_NEAR(*b, std::pow(lambda, -(s + 3.0)) * *a, 1e-11 * std::max(1.0, *b));
      }
    }
    const auto a = radial_hs_sq(p, 1.0), b = radial_hs_sq(q, 1.0);
    if (a && b) {
      EXPECT_NEAR(*b, std::pow(lambda, -5.0) * *a, 1e-11 * std::max(1.0, *b));
    }
  }
}

TEST(Radial, ClosedFormMatchesQuadrature) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = std::vector<double>{0.6, 1.0, 2.0}[trial % 3];
    const auto p = random_power_profile(s, rng);
    const auto pairs = {std::pair{radial_x_norm(p, -1), quadrature_x_norm(p, -1)},
                        std::pair{radial_hs_sq(p, 0.0), quadrature_hs_sq(p, 0.0)},
                        std::pair{radial_hs_sq(p, s), quadrature_hs_sq(p, s)}};
    for (const auto& [closed, quad] : pairs) {
      ASSERT_TRUE(closed.has_value());
      ASSERT_TRUE(quad.has_value());
      EXPECT_NEAR(*quad, *closed, 1e-8 * std::max(1.0, *closed));
    }
  }
}

TEST(Radial, DivergenceDetection) {
  // r^-2 on (0,1): X^-1 integrand r^-1 is log divergent at 0
  EXPECT_FALSE(radial_x_norm(RadialProfile::piecewise_power({{0.0, 1.0, -2.0, 1.0}}), -1).has_value());
  // r^-2 on (1,inf): X^-1 integrand r^-1 is log divergent at infinity
  EXPECT_FALSE(radial_x_norm(RadialProfile::piecewise_power({{1.0, kInf, -2.0, 1.0}}), -1).has_value());
  EXPECT_TRUE(radial_x_norm(RadialProfile::piecewise_power({{1.0, kInf, -2.5, 1.0}}), -1).has_value());
}

TEST(Embedding, ConstantAndGaussian) {
  EXPECT_NEAR(embedding_constant(1.0), 2 * std::sqrt(4 * pi), 1e-15);
  const auto r = lemma22_check(gaussian(), 1.0);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.low_holds);
  EXPECT_TRUE(r.high_holds);
  EXPECT_NEAR(r.low + r.high, r.lhs, 1e-9 * r.lhs);
}

TEST(Embedding, ThinShellNearSharpness) {
  const auto shell = RadialProfile::piecewise_power({{1.0, 1.01, 0.0, 1.0}});
  const auto r = lemma22_check(shell, 1.0);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.lhs / r.rhs, 0.0);
  EXPECT_LT(r.lhs / r.rhs, 1.0);
}

TEST(Embedding, Preconditions) {
  EXPECT_THROW(lemma22_check(gaussian(), 0.5), InvalidArgument);
  EXPECT_THROW(lemma22_check(remark_profile_f(), 1.0), InvalidArgument);
}

TEST(Property, EmbeddingOnRandomProfiles) {
  std::mt19937_64 rng(4);
  for (double s : {0.6, 1.0, 2.0})
    for (int trial = 0; trial < 100; ++trial) {
      const auto r = lemma22_check(random_power_profile(s, rng), s);
      EXPECT_TRUE(r.holds && r.low_holds && r.high_holds) << "s=" << s << " trial " << trial;
    }
}
