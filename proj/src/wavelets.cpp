#include "bimult/wavelets.hpp"

#include <cmath>
#include <numbers>

#include "bimult/error.hpp"
#include "bimult/fft.hpp"

namespace bimult {
namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t integer_period(const SymbolGrid& m) {
  const double p = m.period();
  const double r = std::round(p);
  if (r < 1.0 || std::abs(p - r) > 1e-9 * std::max(1.0, p))
    throw InvalidArgument("wavelets: grid period (2F+1)h must be an integer");
  return static_cast<std::int64_t>(r);
}

std::int64_t translations(std::int64_t period, int j) { return j == 0 ? period : period << (j - 1); }

void check_label(int j, unsigned mask, int dim) {
  if (j < 0) throw InvalidArgument("wavelets: scale must be >= 0");
  if (dim >= 32 || mask >= (1u << dim)) throw InvalidArgument("wavelets: mask has bits beyond the dimension");
  if ((j == 0) != (mask == 0)) throw InvalidArgument("wavelets: j = 0 pairs with all-father labels only");
}

// Per-axis weight 2^{-(j-1)/2} Psi^_G(k / (P 2^{j-1})), the DFT-bin value of
// the translation-free periodized wavelet up to the factor 1/P.
cplx axis_hat(int j, bool mother, std::int64_t k, std::int64_t period) {
  const double dil = j == 0 ? 1.0 : std::ldexp(1.0, j - 1);
  const double w = static_cast<double>(k) / (static_cast<double>(period) * dil);
  const cplx v = mother ? meyer_mother_hat(w) : cplx(meyer_father_hat(w), 0.0);
  return v / std::sqrt(dil);
}

void check_band(const SymbolGrid& m, std::int64_t period, int j, unsigned mask) {
  const double dil = j == 0 ? 1.0 : std::ldexp(1.0, j - 1);
  const double reach = (mask ? 4.0 / 3.0 : 2.0 / 3.0) * dil * static_cast<double>(period);
  if (reach > m.radius() + 1e-9) throw InvalidArgument("wavelets: grid band too small for scale " + std::to_string(j));
}

std::int64_t wrap(std::int64_t k, std::int64_t n) { return ((k % n) + n) % n; }

}  // namespace

double meyer_nu(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}

double meyer_father_hat(double w) {
  const double a = std::abs(w);
  if (a <= 1.0 / 3.0) return 1.0;
  if (a >= 2.0 / 3.0) return 0.0;
  return std::cos(0.5 * kPi * meyer_nu(3.0 * a - 1.0));
}

cplx meyer_mother_hat(double w) {
  const double a = std::abs(w);
  double amp = 0.0;
  if (a > 1.0 / 3.0 && a <= 2.0 / 3.0)
    amp = std::sin(0.5 * kPi * meyer_nu(3.0 * a - 1.0));
  else if (a > 2.0 / 3.0 && a < 4.0 / 3.0)
    amp = std::cos(0.5 * kPi * meyer_nu(1.5 * a - 1.0));
  if (amp == 0.0) return {};
  return std::polar(amp, kPi * w);
}

MeyerProfiles meyer_profiles() {
  return {[](double w) { return cplx(meyer_father_hat(w), 0.0); }, [](double w) { return meyer_mother_hat(w); }};
}

cplx WaveletBand::at(std::span<const std::int64_t> beta) const {
  if (static_cast<int>(beta.size()) != dim) throw DimensionMismatch("WaveletBand: beta has wrong dimension");
  std::int64_t idx = 0;
  for (std::int64_t b : beta) idx = idx * translations + wrap(b, translations);
  return coefficients[static_cast<std::size_t>(idx)];
}

MeasuredValues WaveletBand::measured() const { return bimult::measured(coefficients, 1.0); }

std::vector<std::pair<int, unsigned>> wavelet_labels(int jMax, int dim) {
  std::vector<std::pair<int, unsigned>> out{{0, 0u}};
  for (int j = 1; j <= jMax; ++j)
    for (unsigned mask = 1; mask < (1u << dim); ++mask) out.emplace_back(j, mask);
  return out;
}

SymbolGrid with_integer_period(const SymbolGrid& m) {
  const int limit = m.radius() + static_cast<int>(std::ceil(2.0 / m.spacing())) + 2;
  for (int r = m.radius(); r <= limit; ++r) {
    const double p = static_cast<double>(2 * r + 1) * m.spacing();
    if (std::abs(p - std::round(p)) <= 1e-9 * std::max(1.0, p)) return m.embedded(r);
  }
  throw InvalidArgument("with_integer_period: spacing admits no integer period near the grid");
}

WaveletBand wavelet_band(const SymbolGrid& m, int j, unsigned mask) {
  const int dim = m.dim();
  check_label(j, mask, dim);
  const std::int64_t P = integer_period(m);
  check_band(m, P, j, mask);
  const std::int64_t N = m.side(), Q = translations(P, j);

  // M_k = N^{-dim} sum_p m_p e^{-2 pi i k.p / N}, bins wrapped mod N.
  std::vector<cplx> spectrum(static_cast<std::size_t>(m.lattice_size()));
  for (const auto& e : m.entries()) {
    std::int64_t rem = e.index, target = 0, stride = 1;
    for (int d = dim - 1; d >= 0; --d) {
      target += wrap(rem % N - m.radius(), N) * stride;
      rem /= N;
      stride *= N;
    }
    spectrum[static_cast<std::size_t>(target)] = e.value;
  }
  const std::vector<int> shape(static_cast<std::size_t>(dim), static_cast<int>(N));
  fft(spectrum, shape, FftDirection::Forward);
  const double norm = std::pow(static_cast<double>(N), -dim);

  // Per-axis conjugated weights and their folding targets mod Q.
  std::vector<std::vector<cplx>> weight(static_cast<std::size_t>(dim), std::vector<cplx>(static_cast<std::size_t>(N)));
  for (int d = 0; d < dim; ++d) {
    const bool mother = (mask >> d) & 1u;
    for (std::int64_t bin = 0; bin < N; ++bin) {
      const std::int64_t k = bin > m.radius() ? bin - N : bin;
      weight[static_cast<std::size_t>(d)][static_cast<std::size_t>(bin)] = std::conj(axis_hat(j, mother, k, P));
    }
  }

  std::vector<cplx> folded(static_cast<std::size_t>(std::pow(Q, dim)));
  std::vector<std::int64_t> bins(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (spectrum[i] == cplx{}) continue;
    std::int64_t rem = static_cast<std::int64_t>(i);
    for (int d = dim - 1; d >= 0; --d) {
      bins[static_cast<std::size_t>(d)] = rem % N;
      rem /= N;
    }
    cplx w = spectrum[i] * norm;
    std::int64_t target = 0;
    for (int d = 0; d < dim && w != cplx{}; ++d) {
      const std::int64_t bin = bins[static_cast<std::size_t>(d)];
      w *= weight[static_cast<std::size_t>(d)][static_cast<std::size_t>(bin)];
      const std::int64_t k = bin > m.radius() ? bin - N : bin;
      target = target * Q + wrap(k, Q);
    }
    if (w != cplx{}) folded[static_cast<std::size_t>(target)] += w;
  }
  const std::vector<int> qshape(static_cast<std::size_t>(dim), static_cast<int>(Q));
  fft(folded, qshape, FftDirection::Backward);

  WaveletBand band;
  band.j = j;
  band.mask = mask;
  band.dim = dim;
  band.translations = Q;
  band.coefficients = std::move(folded);
  return band;
}

std::vector<WaveletBand> wavelet_coefficients(const SymbolGrid& m, int jMax) {
  if (jMax < 0) throw InvalidArgument("wavelet_coefficients: jMax must be >= 0");
  std::vector<WaveletBand> out;
  for (const auto& [j, mask] : wavelet_labels(jMax, m.dim())) out.push_back(wavelet_band(m, j, mask));
  return out;
}

SymbolGrid synthesize_wavelet(const WaveletIndex& idx, int n, int radius, double spacing) {
  const SymbolGrid shape_only(n, radius, spacing, {});
  const int dim = shape_only.dim();
  check_label(idx.j, idx.mask, dim);
  if (static_cast<int>(idx.beta.size()) != dim) throw DimensionMismatch("synthesize_wavelet: beta has wrong dimension");
  const std::int64_t P = integer_period(shape_only);
  check_band(shape_only, P, idx.j, idx.mask);
  const std::int64_t N = shape_only.side(), Q = translations(P, idx.j);

  // Fourier coefficients (1/P) w^(k/P) per axis, w^ carrying e^{-2 pi i k beta / Q}.
  std::vector<std::vector<cplx>> axis(static_cast<std::size_t>(dim), std::vector<cplx>(static_cast<std::size_t>(N)));
  for (int d = 0; d < dim; ++d) {
    const bool mother = (idx.mask >> d) & 1u;
    const std::int64_t beta = idx.beta[static_cast<std::size_t>(d)];
    for (std::int64_t bin = 0; bin < N; ++bin) {
      const std::int64_t k = bin > radius ? bin - N : bin;
      const double phase = -2.0 * kPi * static_cast<double>(wrap(k * beta, Q)) / static_cast<double>(Q);
      axis[static_cast<std::size_t>(d)][static_cast<std::size_t>(bin)] =
          axis_hat(idx.j, mother, k, P) * std::polar(1.0 / static_cast<double>(P), phase);
    }
  }
  std::vector<cplx> grid(static_cast<std::size_t>(shape_only.lattice_size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::int64_t rem = static_cast<std::int64_t>(i);
    cplx v = 1.0;
    for (int d = dim - 1; d >= 0 && v != cplx{}; --d) {
      v *= axis[static_cast<std::size_t>(d)][static_cast<std::size_t>(rem % N)];
      rem /= N;
    }
    grid[i] = v;
  }
  const std::vector<int> shape(static_cast<std::size_t>(dim), static_cast<int>(N));
  fft(grid, shape, FftDirection::Backward);

  // Bin order back to lattice order (coordinate p stored at p mod N).
  std::vector<cplx> dense(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::int64_t rem = static_cast<std::int64_t>(i), linear = 0, stride = 1;
    for (int d = dim - 1; d >= 0; --d) {
      std::int64_t p = rem % N;
      rem /= N;
      if (p > radius) p -= N;
      linear += (p + radius) * stride;
      stride *= N;
    }
    dense[static_cast<std::size_t>(linear)] = grid[i];
  }
  return SymbolGrid::from_dense(n, radius, spacing, dense,
                                {{"generator", "meyer_wavelet"}, {"j", idx.j}, {"mask", idx.mask}, {"beta", idx.beta}});
}

double lemma_discrete_ratio(const WaveletBand& band, const SymbolGrid& m) {
  const double denom = weak_quasinorm(m.measured_values(), 4.0);
  if (denom == 0.0) throw InvalidArgument("lemma_discrete_ratio: zero symbol");
  return std::exp2(band.j * m.n() / 2.0) * weak_quasinorm(band.measured(), 4.0) / denom;
}

double lemma_discrete_ratio(const SymbolGrid& m, int j, unsigned mask) {
  return lemma_discrete_ratio(wavelet_band(m, j, mask), m);
}

nlohmann::json band_to_json(const WaveletBand& band, double threshold) {
  std::string label;
  for (int d = 0; d < band.dim; ++d) label += ((band.mask >> d) & 1u) ? 'M' : 'F';
  nlohmann::json betas = nlohmann::json::array(), values = nlohmann::json::array();
  const std::int64_t Q = band.translations;
  for (std::size_t i = 0; i < band.coefficients.size(); ++i) {
    const cplx v = band.coefficients[i];
    if (std::abs(v) <= threshold) continue;
    std::vector<std::int64_t> beta(static_cast<std::size_t>(band.dim));
    std::int64_t rem = static_cast<std::int64_t>(i);
    for (int d = band.dim - 1; d >= 0; --d) {
      std::int64_t b = rem % Q;
      rem /= Q;
      if (2 * b >= Q) b -= Q;
      beta[static_cast<std::size_t>(d)] = b;
    }
    betas.push_back(beta);
    values.push_back({v.real(), v.imag()});
  }
  return {{"j", band.j}, {"G", label}, {"translations", Q}, {"beta", std::move(betas)}, {"values", std::move(values)}};
}

}  // namespace bimult
