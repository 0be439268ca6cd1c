#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bimult/error.hpp"
#include "bimult/rng.hpp"
#include "bimult/symbols.hpp"
#include "bimult/wavelets.hpp"

using namespace bimult;

namespace {

constexpr int kRes = 25;
constexpr int kF = 62;  // period 125 / 25 = 5
constexpr double kH = 1.0 / kRes;

double spectral_norm_sq(const std::function<cplx(double)>& hat) {
  double s = 0.0;
  const int steps = 400000;
  const double W = 2.0, dw = 2 * W / steps;
  for (int i = 0; i < steps; ++i) s += std::norm(hat(-W + (i + 0.5) * dw)) * dw;
  return s;
}

// Real trigonometric polynomial with axis frequencies up to `amax` / period.
SymbolGrid band_limited(std::uint64_t seed, int amax) {
  Rng rng(seed);
  const int N = 2 * kF + 1;
  std::vector<std::pair<std::array<int, 2>, cplx>> modes;
  for (int i = 0; i < 30; ++i) {
    const std::array<int, 2> a{static_cast<int>(rng.integer(-amax, amax)), static_cast<int>(rng.integer(-amax, amax))};
    modes.push_back({a, {rng.normal(), rng.normal()}});
  }
  std::vector<cplx> dense;
  for (int i = -kF; i <= kF; ++i)
    for (int j = -kF; j <= kF; ++j) {
      double v = 0.0;
      for (const auto& [a, c] : modes)
        v += 2.0 * (c * std::polar(1.0, 2.0 * std::numbers::pi * (a[0] * i + a[1] * j) / N)).real();
      dense.push_back(v);
    }
  return SymbolGrid::from_dense(1, kF, kH, dense);
}

double l2sq(const SymbolGrid& m) {
  double s = 0.0;
  for (const auto& e : m.entries()) s += std::norm(e.value);
  return s * m.cell_measure();
}

}  // namespace

TEST(Meyer, Profiles) {
  EXPECT_EQ(meyer_nu(0.0), 0.0);
  EXPECT_EQ(meyer_nu(1.0), 1.0);
  EXPECT_NEAR(meyer_nu(0.3) + meyer_nu(0.7), 1.0, 1e-14);
  EXPECT_EQ(meyer_father_hat(0.0), 1.0);
  EXPECT_EQ(meyer_father_hat(0.7), 0.0);
  for (double w : {0.0, 0.1, -0.2, 0.33}) EXPECT_EQ(std::abs(meyer_mother_hat(w)), 0.0);
  EXPECT_EQ(std::abs(meyer_mother_hat(1.4)), 0.0);
  EXPECT_NEAR(spectral_norm_sq([](double w) { return cplx(meyer_father_hat(w)); }), 1.0, 1e-8);
  EXPECT_NEAR(spectral_norm_sq(meyer_mother_hat), 1.0, 1e-8);
  const auto p = meyer_profiles();
  EXPECT_EQ(p.father(0.2), cplx(meyer_father_hat(0.2)));
  EXPECT_EQ(p.mother(0.9), meyer_mother_hat(0.9));
}

TEST(Wavelets, Labels) {
  const auto labels = wavelet_labels(2, 2);
  ASSERT_EQ(labels.size(), 7u);
  EXPECT_EQ(labels[0], (std::pair<int, unsigned>{0, 0}));
  for (std::size_t i = 1; i < labels.size(); ++i) EXPECT_NE(labels[i].second, 0u);
  EXPECT_THROW(synthesize_wavelet(WaveletIndex{0, 1, {0, 0}}, 1, kF, kH), InvalidArgument);
  EXPECT_THROW(synthesize_wavelet(WaveletIndex{1, 0, {0, 0}}, 1, kF, kH), InvalidArgument);
}

TEST(Wavelets, Orthonormal) {
  const std::vector<WaveletIndex> idx{{0, 0, {0, 0}}, {0, 0, {1, 0}}, {1, 1, {0, 0}}, {1, 2, {2, 1}},
                                      {2, 3, {3, -1}}, {3, 1, {0, 5}}, {4, 2, {7, 3}},  {4, 3, {7, 3}}};
  double worst = 0.0;
  for (const auto& a : idx) {
    const auto w = synthesize_wavelet(a, 1, kF, kH);
    for (const auto& b : idx) {
      const auto band = wavelet_band(w, b.j, b.mask);
      const double expected = &a == &b ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(band.at(b.beta) - expected));
    }
    // Coefficient 1 at its own index and nothing else in its band.
    const auto own = wavelet_band(w, a.j, a.mask);
    double off = 0.0;
    for (const cplx& v : own.coefficients) off = std::max(off, std::abs(v));
    EXPECT_NEAR(off, 1.0, 1e-5);
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(Wavelets, ParsevalForBandLimited) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto m = band_limited(seed, 24);
    double total = 0.0;
    for (const auto& band : wavelet_coefficients(m, 4))
      for (const cplx& v : band.coefficients) total += std::norm(v);
    EXPECT_NEAR(total / l2sq(m), 1.0, 0.01);
  }
}

TEST(Wavelets, RealSymbolRealCoefficientsAndZero) {
  const auto m = band_limited(9, 30);
  for (const auto& band : wavelet_coefficients(m, 3))
    for (const cplx& v : band.coefficients) EXPECT_LT(std::abs(v.imag()), 1e-10);
  for (const auto& band : wavelet_coefficients(SymbolGrid(1, kF, kH, {}), 2))
    for (const cplx& v : band.coefficients) EXPECT_EQ(v, cplx(0.0));
}

TEST(Wavelets, IntegerPeriodRequired) {
  const auto m = lattice_symbol(CoeffMatrix({{{0, 0}, 1.0}}), BumpSpec{}, kRes);
  const auto p = with_integer_period(m);
  EXPECT_NEAR(p.period(), std::round(p.period()), 1e-9);
  EXPECT_EQ(p.at({0, 0}), m.at({0, 0}));
  EXPECT_THROW(wavelet_band(SymbolGrid(1, 3, 0.3, {}), 0, 0), InvalidArgument);
}

TEST(LemmaDiscrete, SingleBumpAndScaling) {
  const auto m = with_integer_period(lattice_symbol(CoeffMatrix({{{0, 0}, 1.0}}), BumpSpec{}, kRes));
  for (const auto& [j, mask] : wavelet_labels(4, 2)) {
    const double r = lemma_discrete_ratio(m, j, mask);
    EXPECT_TRUE(std::isfinite(r));
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 1.0);
    EXPECT_NEAR(lemma_discrete_ratio(m.scaled(7.0), j, mask), r, 1e-12 * r);
  }
  EXPECT_THROW(lemma_discrete_ratio(SymbolGrid(1, kF, kH, {}), 0, 0), InvalidArgument);
}

TEST(Wavelets, JsonDump) {
  const auto w = synthesize_wavelet(WaveletIndex{1, 2, {2, -1}}, 1, kF, kH);
  const auto j = band_to_json(wavelet_band(w, 1, 2), 1e-6);
  EXPECT_EQ(j.at("j"), 1);
  EXPECT_EQ(j.at("G"), "FM");
  ASSERT_EQ(j.at("beta").size(), 1u);
  EXPECT_EQ(j.at("beta")[0], (std::vector<int>{2, -1}));
}
