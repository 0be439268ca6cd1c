#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bimult/littlewood_paley.hpp"
#include "bimult/rng.hpp"
#include "bimult/symbols.hpp"

using namespace bimult;

namespace {

struct Mode {
  int a, b;
  cplx c;
};

// m(ih, jh) = sum c e^{2 pi i (a i + b j) / N}: frequencies (a, b) / period.
SymbolGrid trig_symbol(int F, double h, const std::vector<Mode>& modes) {
  const int N = 2 * F + 1;
  std::vector<cplx> dense;
  for (int i = -F; i <= F; ++i)
    for (int j = -F; j <= F; ++j) {
      cplx v = 0.0;
      for (const auto& m : modes) v += m.c * std::polar(1.0, 2.0 * std::numbers::pi * (m.a * i + m.b * j) / N);
      dense.push_back(v);
    }
  return SymbolGrid::from_dense(1, F, h, dense);
}

SymbolGrid random_dense(int F, double h, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> dense(static_cast<std::size_t>((2 * F + 1) * (2 * F + 1)));
  for (auto& v : dense) v = {rng.normal(), rng.normal()};
  return SymbolGrid::from_dense(1, F, h, dense);
}

double max_diff(const SymbolGrid& a, const SymbolGrid& b) {
  const auto x = a.dense(), y = b.dense();
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

double l2sq(const SymbolGrid& m) {
  double s = 0.0;
  for (const auto& e : m.entries()) s += std::norm(e.value);
  return s * m.cell_measure();
}

double weak(const SymbolGrid& m) { return weak_quasinorm(m.measured_values(), 4.0); }

// Period 4.1: frequencies with a^2 + b^2 <= 16 lie in the unit ball.
SymbolGrid low_band() { return trig_symbol(20, 0.1, {{0, 0, 1.0}, {2, -1, cplx(0.5, 0.5)}, {-3, 2, -0.7}, {0, 4, 0.2}}); }

}  // namespace

TEST(LPFamily, Cutoffs) {
  const LPFamily lp;
  EXPECT_EQ(lp.phi0(0.0), 1.0);
  EXPECT_EQ(lp.phi0(1.0), 1.0);
  EXPECT_EQ(lp.phi0(1.5), 0.0);
  EXPECT_GT(lp.phi0(1.25), 0.0);
  EXPECT_LT(lp.phi0(1.25), 1.0);
  for (double r : {0.3, 1.2, 2.7, 9.0, 40.0}) {
    double s = 0.0;
    for (int k = 0; k <= 6; ++k) s += lp.piece(k, r);
    EXPECT_NEAR(s, lp.phi0(std::ldexp(r, -6)), 1e-15);
  }
}

TEST(LittlewoodPaley, UnitBallSymbolIsLowPass) {
  const auto m = low_band();
  EXPECT_LT(max_diff(littlewood_paley_piece(m, 0), m), 1e-8);
  for (int k = 1; k <= 4; ++k) EXPECT_LT(littlewood_paley_piece(m, k).sup_norm(), 1e-8) << k;
}

TEST(LittlewoodPaley, PiecesTelescope) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto m = random_dense(12, 0.15, seed);
    const int K = default_kmax(m);
    EXPECT_EQ(K, static_cast<int>(std::ceil(std::log2(1.0 / (2 * 0.15)))) + 2);
    const auto pieces = littlewood_paley_pieces(m, K);
    ASSERT_EQ(pieces.size(), static_cast<std::size_t>(K + 1));
    std::vector<cplx> sum(static_cast<std::size_t>(m.lattice_size()));
    double energy = 0.0;
    for (const auto& p : pieces) {
      const auto d = p.dense();
      for (std::size_t i = 0; i < d.size(); ++i) sum[i] += d[i];
      energy += l2sq(p);
    }
    EXPECT_LT(max_diff(SymbolGrid::from_dense(1, 12, 0.15, sum), m), 1e-8);
    const double q = l2sq(m) / energy;
    EXPECT_GE(q, 1.0 - 1e-12);
    EXPECT_LE(q, 2.0);
    EXPECT_LT(max_diff(pieces[2], littlewood_paley_piece(m, 2)), 1e-12);
  }
}

TEST(Besov, Examples) {
  const auto m = low_band();
  EXPECT_NEAR(besov_norm(m), weak(m), 1e-8 * weak(m));
  EXPECT_EQ(besov_norm(SymbolGrid(1, 6, 0.2, {})), 0.0);
  const auto r = random_dense(8, 0.2, 4);
  EXPECT_NEAR(besov_norm(r.scaled(2.0)), 2.0 * besov_norm(r), 1e-12 * besov_norm(r));
  EXPECT_GE(besov_norm(r), weak(littlewood_paley_piece(r, 0)));
}

TEST(Sobolev, IdentityAndSingleMode) {
  const auto r = random_dense(8, 0.2, 5);
  EXPECT_NEAR(sobolev_weak_norm(r, 0.0), weak(r), 1e-12 * weak(r));
  // Period 25 * 0.2 = 5: mode a = 5 has frequency exactly 1.
  const auto e = trig_symbol(12, 0.2, {{5, 0, 1.0}});
  for (double s : {1.0, 2.0, 3.5})
    EXPECT_NEAR(sobolev_weak_norm(e, s) / weak(e), std::pow(1 + 4 * std::numbers::pi * std::numbers::pi, s / 2),
                1e-9);
}

TEST(Sobolev, StableUnderRefinement) {
  const CoeffMatrix c({{{0, 0}, 1.0}, {{1, -1}, -0.5}});
  auto at = [&](int res) {
    const auto m = lattice_symbol(c, BumpSpec{}, res, 0.0, lattice_symbol_radius(c, BumpSpec{}, res) + res);
    return sobolev_weak_norm(m, 2.0);
  };
  const double coarse = at(80), fine = at(160);
  EXPECT_LT(std::abs(fine - coarse) / fine, 0.05);
}

TEST(RadialMultiplier, IdentityAndZero) {
  const auto r = random_dense(6, 0.3, 6);
  EXPECT_LT(max_diff(apply_radial_multiplier(r, [](double) { return 1.0; }), r), 1e-12);
  EXPECT_LT(apply_radial_multiplier(r, [](double) { return 0.0; }).sup_norm(), 1e-300);
}
