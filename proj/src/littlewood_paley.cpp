#include "bimult/littlewood_paley.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "bimult/bumps.hpp"
#include "bimult/error.hpp"
#include "bimult/fft.hpp"

namespace bimult {
namespace {

// Dense samples with lattice coordinate p stored at p mod side on every axis.
std::vector<cplx> wrapped_dense(const SymbolGrid& m) {
  const std::int64_t side = m.side();
  const int dim = m.dim();
  std::vector<cplx> out(static_cast<std::size_t>(m.lattice_size()));
  for (const auto& e : m.entries()) {
    std::int64_t rem = e.index, target = 0, stride = 1;
    for (int d = dim - 1; d >= 0; --d) {
      const std::int64_t c = rem % side - m.radius();
      rem /= side;
      target += ((c % side + side) % side) * stride;
      stride *= side;
    }
    out[static_cast<std::size_t>(target)] = e.value;
  }
  return out;
}

// |w| for every wrapped DFT bin, with w = k / period.
std::vector<double> radial_frequencies(const SymbolGrid& m) {
  const std::int64_t side = m.side();
  const int dim = m.dim();
  const double period = m.period();
  std::vector<double> out(static_cast<std::size_t>(m.lattice_size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::int64_t rem = static_cast<std::int64_t>(i);
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      std::int64_t k = rem % side;
      rem /= side;
      if (k > m.radius()) k -= side;
      const double w = static_cast<double>(k) / period;
      r2 += w * w;
    }
    out[i] = std::sqrt(r2);
  }
  return out;
}

SymbolGrid unwrap(const SymbolGrid& like, const std::vector<cplx>& wrapped, double scale) {
  const std::int64_t side = like.side();
  const int dim = like.dim();
  std::vector<SymbolEntry> entries;
  for (std::size_t i = 0; i < wrapped.size(); ++i) {
    const cplx v = wrapped[i] * scale;
    if (v == cplx{}) continue;
    std::int64_t rem = static_cast<std::int64_t>(i), linear = 0, stride = 1;
    for (int d = dim - 1; d >= 0; --d) {
      std::int64_t k = rem % side;
      rem /= side;
      if (k > like.radius()) k -= side;
      linear += (k + like.radius()) * stride;
      stride *= side;
    }
    entries.push_back({linear, v});
  }
  return SymbolGrid(like.n(), like.radius(), like.spacing(), std::move(entries), like.provenance());
}

std::vector<int> grid_shape(const SymbolGrid& m) {
  return std::vector<int>(static_cast<std::size_t>(m.dim()), static_cast<int>(m.side()));
}

}  // namespace

double LPFamily::phi0(double r) const { return 1.0 - smooth_step((r - 1.0) / 0.5); }

double LPFamily::piece(int k, double r) const {
  if (k < 0) throw InvalidArgument("Littlewood-Paley index must be >= 0");
  if (k == 0) return phi0(r);
  return phi0(std::ldexp(r, -k)) - phi0(std::ldexp(r, 1 - k));
}

std::vector<SymbolGrid> littlewood_paley_pieces(const SymbolGrid& m, int kMax) {
  if (kMax < 0) throw InvalidArgument("littlewood_paley_pieces: kMax must be >= 0");
  auto spectrum = wrapped_dense(m);
  const auto shape = grid_shape(m);
  fft(spectrum, shape, FftDirection::Forward);
  const auto radii = radial_frequencies(m);
  const double norm = 1.0 / static_cast<double>(m.lattice_size());
  const LPFamily lp;
  std::vector<SymbolGrid> out;
  out.reserve(static_cast<std::size_t>(kMax) + 1);
  for (int k = 0; k <= kMax; ++k) {
    std::vector<cplx> piece(spectrum.size());
    for (std::size_t i = 0; i < piece.size(); ++i) {
      const double w = lp.piece(k, radii[i]);
      if (w != 0.0) piece[i] = spectrum[i] * w;
    }
    fft(piece, shape, FftDirection::Backward);
    out.push_back(unwrap(m, piece, norm));
  }
  return out;
}

SymbolGrid littlewood_paley_piece(const SymbolGrid& m, int k) {
  if (k < 0) throw InvalidArgument("littlewood_paley_piece: k must be >= 0");
  return littlewood_paley_pieces(m, k).back();
}

int default_kmax(const SymbolGrid& m) {
  const double band = 0.5 / m.spacing();
  return static_cast<int>(std::ceil(std::log2(band))) + 2;
}

double besov_norm(const SymbolGrid& m, int kMax) {
  if (kMax < 0) kMax = default_kmax(m);
  if (m.entries().empty()) return 0.0;
  double total = 0.0;
  const auto pieces = littlewood_paley_pieces(m, kMax);
  for (int k = 0; k <= kMax; ++k)
    total += std::exp2(m.n() * k / 2.0) * weak_quasinorm(pieces[static_cast<std::size_t>(k)].measured_values(), 4.0);
  return total;
}

SymbolGrid apply_radial_multiplier(const SymbolGrid& m, const std::function<double(double)>& mult) {
  auto spectrum = wrapped_dense(m);
  const auto shape = grid_shape(m);
  fft(spectrum, shape, FftDirection::Forward);
  const auto radii = radial_frequencies(m);
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= mult(radii[i]);
  fft(spectrum, shape, FftDirection::Backward);
  return unwrap(m, spectrum, 1.0 / static_cast<double>(m.lattice_size()));
}

double sobolev_weak_norm(const SymbolGrid& m, double s) {
  if (s < 0.0) throw InvalidArgument("sobolev_weak_norm: s must be >= 0");
  if (s == 0.0) return weak_quasinorm(m.measured_values(), 4.0);
  const auto out = apply_radial_multiplier(m, [s](double r) {
    return std::pow(1.0 + 4.0 * std::numbers::pi * std::numbers::pi * r * r, s / 2.0);
  });
  return weak_quasinorm(out.measured_values(), 4.0);
}

}  // namespace bimult
