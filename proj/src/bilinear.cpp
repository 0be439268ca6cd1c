#include "bimult/bilinear.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "bimult/error.hpp"

namespace bimult {
namespace {

void check_function_box(const SymbolGrid& m, const SpectralVector& f, const char* what) {
  const FrequencyBox& box = f.box();
  if (box.dim != m.n()) throw DimensionMismatch(std::string(what) + ": dimension differs from symbol half-dimension");
  if (box.radius > m.radius()) throw BandLimitExceeded(std::string(what) + ": band exceeds symbol box");
  if (std::abs(box.period * m.spacing() - 1.0) > 1e-9)
    throw DimensionMismatch(std::string(what) + ": period must equal 1/spacing of the symbol");
}

// Coordinates of entry `linear` in the symbol box, split as (xi, eta).
void decode(std::int64_t linear, std::int64_t side, int radius, int dim, int* out) {
  for (int d = dim - 1; d >= 0; --d) {
    out[d] = static_cast<int>(linear % side) - radius;
    linear /= side;
  }
}

template <class T>
void put(std::ofstream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw SchemaError("symbol binary: truncated file");
  return v;
}

}  // namespace

SymbolGrid::SymbolGrid(int n, int radius, double spacing, std::vector<SymbolEntry> entries,
                       nlohmann::json provenance)
    : n_(n), radius_(radius), spacing_(spacing), entries_(std::move(entries)), provenance_(std::move(provenance)) {
  if (n < 1) throw InvalidArgument("SymbolGrid: n must be >= 1");
  if (radius < 0) throw InvalidArgument("SymbolGrid: radius must be >= 0");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidArgument("SymbolGrid: spacing must be positive");
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  const std::int64_t size = lattice_size();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].index < 0 || entries_[i].index >= size) throw BandLimitExceeded("SymbolGrid: entry outside box");
    if (i > 0 && entries_[i].index == entries_[i - 1].index) throw InvalidArgument("SymbolGrid: duplicate entry");
    if (!std::isfinite(entries_[i].value.real()) || !std::isfinite(entries_[i].value.imag()))
      throw InvalidArgument("SymbolGrid: non-finite value");
  }
}

SymbolGrid SymbolGrid::from_dense(int n, int radius, double spacing, std::span<const cplx> dense,
                                  nlohmann::json provenance) {
  SymbolGrid probe(n, radius, spacing, {});
  if (static_cast<std::int64_t>(dense.size()) != probe.lattice_size())
    throw DimensionMismatch("SymbolGrid::from_dense: size does not match box");
  std::vector<SymbolEntry> entries;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != cplx{}) entries.push_back({static_cast<std::int64_t>(i), dense[i]});
  return SymbolGrid(n, radius, spacing, std::move(entries), std::move(provenance));
}

std::int64_t SymbolGrid::lattice_size() const {
  std::int64_t s = 1;
  for (int d = 0; d < dim(); ++d) s *= side();
  return s;
}

double SymbolGrid::cell_measure() const { return std::pow(spacing_, dim()); }

std::int64_t SymbolGrid::linear_index(std::span<const int> point) const {
  if (static_cast<int>(point.size()) != dim()) throw DimensionMismatch("SymbolGrid: point has wrong dimension");
  std::int64_t idx = 0;
  for (int c : point) {
    if (c < -radius_ || c > radius_) throw BandLimitExceeded("SymbolGrid: point outside box");
    idx = idx * side() + (c + radius_);
  }
  return idx;
}

std::vector<int> SymbolGrid::lattice_point(std::int64_t linear) const {
  std::vector<int> p(static_cast<std::size_t>(dim()));
  decode(linear, side(), radius_, dim(), p.data());
  return p;
}

cplx SymbolGrid::at(std::span<const int> point) const {
  const std::int64_t idx = linear_index(point);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), idx,
                             [](const SymbolEntry& e, std::int64_t key) { return e.index < key; });
  return (it != entries_.end() && it->index == idx) ? it->value : cplx{};
}

std::vector<cplx> SymbolGrid::dense() const {
  std::vector<cplx> out(static_cast<std::size_t>(lattice_size()));
  for (const auto& e : entries_) out[static_cast<std::size_t>(e.index)] = e.value;
  return out;
}

double SymbolGrid::sup_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s = std::max(s, std::abs(e.value));
  return s;
}

MeasuredValues SymbolGrid::measured_values() const {
  MeasuredValues out{{}, cell_measure()};
  out.magnitudes.reserve(entries_.size());
  for (const auto& e : entries_) out.magnitudes.push_back(std::abs(e.value));
  return out;
}

FrequencyBox SymbolGrid::function_box(int oversample) const {
  FrequencyBox box{n_, radius_, oversample, 1.0 / spacing_};
  box.validate();
  return box;
}

SymbolGrid SymbolGrid::scaled(cplx s) const {
  auto out = entries_;
  for (auto& e : out) e.value *= s;
  return SymbolGrid(n_, radius_, spacing_, std::move(out), provenance_);
}

SymbolGrid SymbolGrid::transposed() const {
  std::vector<SymbolEntry> out;
  out.reserve(entries_.size());
  std::vector<int> p(static_cast<std::size_t>(dim()));
  for (const auto& e : entries_) {
    decode(e.index, side(), radius_, dim(), p.data());
    std::rotate(p.begin(), p.begin() + n_, p.end());
    out.push_back({linear_index(p), e.value});
  }
  return SymbolGrid(n_, radius_, spacing_, std::move(out), provenance_);
}

SymbolGrid SymbolGrid::embedded(int radius) const {
  if (radius < radius_) throw BandLimitExceeded("SymbolGrid::embedded: target radius smaller than source");
  SymbolGrid big(n_, radius, spacing_, {}, provenance_);
  std::vector<SymbolEntry> out;
  out.reserve(entries_.size());
  std::vector<int> p(static_cast<std::size_t>(dim()));
  for (const auto& e : entries_) {
    decode(e.index, side(), radius_, dim(), p.data());
    out.push_back({big.linear_index(p), e.value});
  }
  return SymbolGrid(n_, radius, spacing_, std::move(out), provenance_);
}

PhysicalField apply_bilinear(const SymbolGrid& m, const SpectralVector& f, const SpectralVector& g,
                             BilinearMode mode) {
  check_function_box(m, f, "apply_bilinear(f)");
  check_function_box(m, g, "apply_bilinear(g)");
  if (f.box().oversample != g.box().oversample) throw DimensionMismatch("apply_bilinear: f and g oversample differ");

  const int n = m.n();
  const int F = m.radius();
  FrequencyBox out_box{n, 2 * F, f.box().oversample, f.box().period};
  out_box.validate();

  const int fr = f.box().radius, gr = g.box().radius;
  const std::int64_t fs = f.box().side(), gs = g.box().side(), us = out_box.side();
  const auto fv = f.values();
  const auto gv = g.values();
  std::vector<int> p(static_cast<std::size_t>(2 * n));

  // (index into u, product) for every entry with nonzero f and g factors
  auto for_each_term = [&](auto&& sink) {
    for (const auto& e : m.entries()) {
      decode(e.index, m.side(), F, 2 * n, p.data());
      std::int64_t fi = 0, gi = 0, ui = 0;
      bool inside = true;
      for (int d = 0; d < n && inside; ++d) {
        const int xi = p[static_cast<std::size_t>(d)], eta = p[static_cast<std::size_t>(d + n)];
        if (std::abs(xi) > fr || std::abs(eta) > gr) inside = false;
        fi = fi * fs + (xi + fr);
        gi = gi * gs + (eta + gr);
        ui = ui * us + (xi + eta + 2 * F);
      }
      if (!inside) continue;
      const cplx a = fv[static_cast<std::size_t>(fi)], b = gv[static_cast<std::size_t>(gi)];
      if (a == cplx{} || b == cplx{}) continue;
      sink(ui, e.value * a * b);
    }
  };

  if (mode == BilinearMode::Antidiagonal) {
    SpectralVector u(out_box);
    auto uv = u.values();
    for_each_term([&](std::int64_t ui, cplx term) { uv[static_cast<std::size_t>(ui)] += term; });
    return synthesize(u);
  }

  // Direct summation; phases are exact multiples of 2 pi / N.
  const std::int64_t N = out_box.physical_side();
  std::vector<cplx> twiddle(static_cast<std::size_t>(N));
  for (std::int64_t t = 0; t < N; ++t)
    twiddle[static_cast<std::size_t>(t)] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(N));
  std::vector<std::pair<std::vector<std::int64_t>, cplx>> terms;
  for_each_term([&](std::int64_t ui, cplx term) {
    std::vector<std::int64_t> zeta(static_cast<std::size_t>(n));
    for (int d = n - 1; d >= 0; --d) {
      zeta[static_cast<std::size_t>(d)] = ui % us - 2 * F;
      ui /= us;
    }
    terms.emplace_back(std::move(zeta), term);
  });
  std::vector<cplx> samples(static_cast<std::size_t>(out_box.physical_size()));
  std::vector<std::int64_t> x(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    std::int64_t rem = static_cast<std::int64_t>(s);
    for (int d = n - 1; d >= 0; --d) {
      x[static_cast<std::size_t>(d)] = rem % N;
      rem /= N;
    }
    cplx acc{};
    for (const auto& [zeta, term] : terms) {
      std::int64_t phase = 0;
      for (int d = 0; d < n; ++d) phase += x[static_cast<std::size_t>(d)] * zeta[static_cast<std::size_t>(d)];
      phase = ((phase % N) + N) % N;
      acc += term * twiddle[static_cast<std::size_t>(phase)];
    }
    samples[s] = acc;
  }
  return PhysicalField(out_box, std::move(samples));
}

double operator_ratio(const SymbolGrid& m, const SpectralVector& f, const SpectralVector& g) {
  const double nf = l2_norm(f), ng = l2_norm(g);
  if (nf == 0.0 || ng == 0.0) throw InvalidArgument("operator_ratio: input with zero L2 norm");
  return l1_norm(apply_bilinear(m, f, g)) / (nf * ng);
}

double trivial_ratio_bound(const SymbolGrid& m, const SpectralVector& f, const SpectralVector& g) {
  const double nf = l2_norm(f), ng = l2_norm(g);
  if (nf == 0.0 || ng == 0.0) throw InvalidArgument("trivial_ratio_bound: input with zero L2 norm");
  double sf = 0.0, sg = 0.0;
  for (const cplx& v : f.values()) sf += std::abs(v);
  for (const cplx& v : g.values()) sg += std::abs(v);
  return std::pow(f.box().period, m.n()) * m.sup_norm() * sf * sg / (nf * ng);
}

void write_symbol_binary(const SymbolGrid& m, const std::string& path, int resolution) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidArgument("cannot open " + path + " for writing");
  os.write("BMSG", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.n()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.radius()));
  put<double>(os, m.spacing());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(resolution));
  put<std::uint64_t>(os, m.entries().size());
  for (const auto& e : m.entries()) {
    put<std::int64_t>(os, e.index);
    put<float>(os, static_cast<float>(e.value.real()));
    put<float>(os, static_cast<float>(e.value.imag()));
  }
  if (!os) throw InvalidArgument("write failed: " + path);
}

SymbolGrid read_symbol_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "BMSG", 4) != 0) throw SchemaError("symbol binary: bad magic");
  if (get<std::uint32_t>(is) != 1) throw SchemaError("symbol binary: unsupported version");
  const auto n = static_cast<int>(get<std::uint32_t>(is));
  const auto radius = static_cast<int>(get<std::uint32_t>(is));
  const double spacing = get<double>(is);
  (void)get<std::uint32_t>(is);
  const auto count = get<std::uint64_t>(is);
  std::vector<SymbolEntry> entries;
  entries.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto idx = get<std::int64_t>(is);
    const float re = get<float>(is), im = get<float>(is);
    entries.push_back({idx, {re, im}});
  }
  return SymbolGrid(n, radius, spacing, std::move(entries));
}

nlohmann::json symbol_sidecar(const SymbolGrid& m, int resolution) {
  return {{"format", "BMSG v1, little-endian, entries (i64 index, f32 re, f32 im)"},
          {"n", m.n()},
          {"dims", m.dim()},
          {"radius", m.radius()},
          {"spacing", m.spacing()},
          {"resolution", resolution},
          {"entries", m.entries().size()},
          {"index_order", "row-major over (xi_1..xi_n, eta_1..eta_n), coordinate -radius first"},
          {"provenance", m.provenance()}};
}

}  // namespace bimult
