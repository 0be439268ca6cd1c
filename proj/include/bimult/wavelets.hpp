#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "bimult/bilinear.hpp"
#include "bimult/lorentz.hpp"

namespace bimult {

/// t^4 (35 - 84 t + 70 t^2 - 20 t^3) clamped to [0, 1].
double meyer_nu(double t);

/// Meyer father spectrum (ordinary frequency): 1 on |w| <= 1/3,
/// cos(pi/2 nu(3|w| - 1)) on [1/3, 2/3], 0 beyond.
double meyer_father_hat(double w);

/// Meyer mother spectrum, supported on 1/3 <= |w| <= 4/3; the phase e^{i pi w}
/// makes the wavelet real and symmetric about 1/2.
cplx meyer_mother_hat(double w);

struct MeyerProfiles {
  std::function<cplx(double)> father;
  std::function<cplx(double)> mother;
};

MeyerProfiles meyer_profiles();

/// (j, G, beta). Bit r of `mask` selects the mother profile on axis r; j = 0
/// requires mask 0 and j >= 1 requires mask != 0. beta_r is a translation
/// index on the torus, 0 <= beta_r < period * 2^{max(j-1, 0)}.
struct WaveletIndex {
  int j = 0;
  unsigned mask = 0;
  std::vector<std::int64_t> beta;
};

/// Inner products <m, Psi^{j,G}_beta> for one (j, G) and every translation
/// on the torus.
struct WaveletBand {
  int j = 0;
  unsigned mask = 0;
  int dim = 2;
  std::int64_t translations = 0;  // per axis
  std::vector<cplx> coefficients;  // row-major over beta, last axis fastest

  cplx at(std::span<const std::int64_t> beta) const;
  MeasuredValues measured() const;
};

/// (j, mask) pairs of the index set for scales 0..jMax in `dim` dimensions.
std::vector<std::pair<int, unsigned>> wavelet_labels(int jMax, int dim);

/// Smallest enlargement of the grid whose torus period (2F+1)h is an integer.
/// Throws InvalidArgument when no such radius exists nearby.
SymbolGrid with_integer_period(const SymbolGrid& m);

/// Coefficients of the periodized product wavelets, computed from the grid's
/// DFT. Requires an integer period and a Nyquist frequency of at least
/// (4/3) 2^{jMax-1}.
std::vector<WaveletBand> wavelet_coefficients(const SymbolGrid& m, int jMax);
WaveletBand wavelet_band(const SymbolGrid& m, int j, unsigned mask);

/// Periodized Psi^{j,G}_beta sampled on the grid of (n, radius, spacing).
SymbolGrid synthesize_wavelet(const WaveletIndex& idx, int n, int radius, double spacing);

/// 2^{jn/2} ||a^{j,G}||_{l^{4,inf}} / ||m||_{L^{4,inf}}.
double lemma_discrete_ratio(const SymbolGrid& m, int j, unsigned mask);
double lemma_discrete_ratio(const WaveletBand& band, const SymbolGrid& m);

/// One JSON Lines record: {"j", "G", "translations", "beta": [[b..], ...],
/// "values": [[re, im], ...]} keeping |a| > threshold; beta is centered.
nlohmann::json band_to_json(const WaveletBand& band, double threshold = 1e-12);

}  // namespace bimult
