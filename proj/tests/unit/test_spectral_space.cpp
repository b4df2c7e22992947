#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nsesync/spectral_space.hpp"
#include "unit/oracles.hpp"

using namespace nsesync;

TEST(SpectralGrid, RejectsOddOrNonpositiveResolution) {
  EXPECT_THROW(SpectralGrid(0), std::invalid_argument);
  EXPECT_THROW(SpectralGrid(-4), std::invalid_argument);
  EXPECT_THROW(SpectralGrid(15), std::invalid_argument);
  EXPECT_NO_THROW(SpectralGrid(16));
}

TEST(SpectralGrid, WavenumberIndexBijection) {
  const SpectralGrid grid(16);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(grid.index_of(grid.wavenumber(i)), i);
  for (std::size_t f = 0; f < grid.size(); ++f) EXPECT_EQ(grid.flat_of(grid.wave_vector(f)), f);
  EXPECT_THROW(grid.flat_of({9, 0}), std::out_of_range);
}

TEST(SpectralGrid, DealiasCutoffAt512) {
  const SpectralGrid grid(512);
  EXPECT_DOUBLE_EQ(grid.dealias_cutoff(), 512.0 / 3.0);
  EXPECT_TRUE(grid.resolved({170, 0}));
  EXPECT_FALSE(grid.resolved({171, 0}));
  EXPECT_FALSE(grid.resolved({0, -171}));
}

TEST(Dealias, ZeroesOutsideSquareMaskAndIsIdempotent) {
  const SpectralGrid grid(512);
  const auto hi = SpectralField::single_mode(grid, {171, 0}, 1.0);
  EXPECT_TRUE(dealias(hi).is_zero());
  const auto lo = SpectralField::single_mode(grid, {170, 0}, 1.0);
  EXPECT_EQ(dealias(lo), lo);

  const SpectralGrid g64(64);
  SpectralField x = SpectralField::from_physical(g64, SpectralField::single_mode(g64, {30, 2}, {0.5, 0.25}).to_physical());
  x += oracle::random_dealiased(g64, 7);
  const auto once = dealias(x);
  EXPECT_EQ(dealias(once), once);
}

TEST(Projection, InclusiveBoundary) {
  const SpectralGrid grid(64);
  const auto m = SpectralField::single_mode(grid, {3, 4}, 1.0);
  EXPECT_EQ(project_low(m, 5.0), m);
  EXPECT_TRUE(project_low(m, 4.9).is_zero());
}

TEST(Projection, HighModes) {
  const SpectralGrid grid(256);
  EXPECT_TRUE(project_high(SpectralField::single_mode(grid, {1, 0}, 1.0), 50.0).is_zero());
  const auto m = SpectralField::single_mode(grid, {51, 0}, 1.0);
  EXPECT_EQ(project_high(m, 50.0), m);
}

TEST(Projection, PartitionIdempotenceOrthogonality) {
  const SpectralGrid grid(160);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = oracle::random_dealiased(grid, seed);
    const auto y = oracle::random_dealiased(grid, seed + 100);
    for (double c : {1.0, 7.5, 20.0, 50.0}) {
      const auto p = project_low(x, c);
      const auto q = project_high(x, c);
      EXPECT_EQ(p + q, x);
      EXPECT_EQ(project_low(p, c), p);
      EXPECT_EQ(inner_product(p, project_high(y, c)), 0.0);
    }
  }
  EXPECT_THROW(project_low(oracle::random_dealiased(grid, 1), 0.0), std::invalid_argument);
  EXPECT_THROW(project_high(oracle::random_dealiased(grid, 1), -1.0), std::invalid_argument);
}

TEST(Projection, Bernstein) {
  const SpectralGrid grid(64);
  const auto x = oracle::random_dealiased(grid, 3, 0.0);
  for (double c : {3.0, 10.0, 21.0}) {
    const auto p = project_low(x, c);
    for (int m = 0; m <= 2; ++m) {
      for (int n = m; n <= 3; ++n) {
        EXPECT_LE(norm_hn(p, n), std::pow(c, n - m) * norm_hn(p, m) * (1.0 + 1e-12));
      }
    }
  }
}

TEST(Norm, ParsevalConstantFromQuadrature) {
  // cos x has |u|^2 = int cos^2 = 2 pi^2 over the box; coefficients 1/2 at k = +-(1,0)
  const SpectralGrid grid(16);
  const auto c = SpectralField::single_mode(grid, {1, 0}, 0.5);
  const double pi = std::numbers::pi;
  EXPECT_NEAR(norm_hn(c, 0) * norm_hn(c, 0), 2.0 * pi * pi, 1e-12);
  EXPECT_DOUBLE_EQ(norm_hn(c, 1), norm_hn(c, 0));
}

TEST(Norm, MatchesPhysicalQuadrature) {
  const SpectralGrid grid(16);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto psi = oracle::random_dealiased(grid, seed);
    // velocity energy |grad_perp psi|^2 is norm_hn(psi, 1)^2
    const double spectral = norm_hn_squared(psi, 1);
    EXPECT_NEAR(spectral, oracle::quadrature_energy(psi), 1e-10 * spectral);
  }
}

TEST(Norm, PoincareAndNegativeOrder) {
  const SpectralGrid grid(32);
  const auto x = oracle::random_dealiased(grid, 11);
  EXPECT_GE(norm_hn(x, 1), norm_hn(x, 0));
  EXPECT_GE(norm_hn(x, 0), norm_hn(x, -1));
  SpectralField with_mean = x;
  with_mean.coeffs()[0] = 1.0;
  EXPECT_THROW(norm_hn(with_mean, -1), std::domain_error);
  EXPECT_NO_THROW(norm_hn(with_mean, 0));
}

TEST(Transform, RoundTripAndDirectSamples) {
  const SpectralGrid grid(16);
  const auto x = oracle::random_dealiased(grid, 5);
  const auto phys = x.to_physical();
  for (int i = 0; i < 16; i += 3) {
    for (int j = 0; j < 16; j += 5) {
      EXPECT_NEAR(phys[grid.flat(i, j)], oracle::direct_sample(x, i, j), 1e-13);
    }
  }
  const auto back = SpectralField::from_physical(grid, phys);
  EXPECT_EQ(back.hermitian_defect(), 0.0);
  double worst = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) worst = std::max(worst, std::abs(back.coeffs()[f] - x.coeffs()[f]));
  EXPECT_LE(worst, 1e-12 * norm_hn(x, 0));
}

TEST(Field, SetModeKeepsHermitian) {
  const SpectralGrid grid(8);
  SpectralField f(grid);
  f.set_mode({2, -1}, {1.0, 2.0});
  EXPECT_EQ((f[WaveVector{-2, 1}]), Complex(1.0, -2.0));
  f.set_mode({-4, 0}, {3.0, 5.0});  // self-conjugate Nyquist point
  EXPECT_EQ((f[WaveVector{-4, 0}]), Complex(3.0, 0.0));
  EXPECT_EQ(f.hermitian_defect(), 0.0);
  EXPECT_THROW(SpectralField(grid, std::vector<Complex>(10)), std::invalid_argument);
  EXPECT_THROW(SpectralField(grid) + SpectralField(SpectralGrid(16)), std::invalid_argument);
}

TEST(Spectrum, SingleShellAndZero) {
  const SpectralGrid grid(32);
  const auto m = SpectralField::single_mode(grid, {3, 4}, 0.7);
  const auto s = energy_spectrum(m);
  const double total = norm_hn_squared(m, 0);
  for (const auto& e : s) EXPECT_DOUBLE_EQ(e.energy, e.shell == 5 ? total : 0.0);
  for (const auto& e : energy_spectrum(SpectralField(grid))) EXPECT_EQ(e.energy, 0.0);
}

TEST(Spectrum, SumsToNorm) {
  const SpectralGrid grid(64);
  const auto x = oracle::random_dealiased(grid, 9);
  double sum = 0.0;
  for (const auto& e : energy_spectrum(x)) sum += e.energy;
  EXPECT_NEAR(sum, norm_hn_squared(x, 0), 1e-12 * sum);
}
