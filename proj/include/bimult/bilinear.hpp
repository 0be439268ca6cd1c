#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "bimult/grid.hpp"
#include "bimult/lorentz.hpp"

namespace bimult {

struct SymbolEntry {
  std::int64_t index;  // row-major linear index in {-F..F}^{2n}
  cplx value;
};

/// Symbol m(xi, eta) sampled at lattice points (i h, j h), i, j in {-F..F}^n.
/// Storage is sparse: entries sorted by linear index, unstored samples are 0.
/// Test functions paired with a symbol of spacing h live on a FrequencyBox of
/// period 1/h, so that lattice sums approximate the continuum integrals.
class SymbolGrid {
 public:
  SymbolGrid() = default;
  /// Entries may come unsorted; duplicates and non-finite values are rejected.
  SymbolGrid(int n, int radius, double spacing, std::vector<SymbolEntry> entries,
             nlohmann::json provenance = nlohmann::json::object());
  static SymbolGrid from_dense(int n, int radius, double spacing, std::span<const cplx> dense,
                               nlohmann::json provenance = nlohmann::json::object());

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  int radius() const { return radius_; }
  std::int64_t side() const { return 2 * static_cast<std::int64_t>(radius_) + 1; }
  std::int64_t lattice_size() const;
  double spacing() const { return spacing_; }
  /// Torus period of the sampled region, (2F+1) h.
  double period() const { return static_cast<double>(side()) * spacing_; }
  double cell_measure() const;

  std::span<const SymbolEntry> entries() const { return entries_; }
  const nlohmann::json& provenance() const { return provenance_; }
  void set_provenance(nlohmann::json p) { provenance_ = std::move(p); }

  std::int64_t linear_index(std::span<const int> point) const;
  std::vector<int> lattice_point(std::int64_t linear) const;
  cplx at(std::span<const int> point) const;
  cplx at(std::initializer_list<int> point) const { return at(std::span<const int>(point.begin(), point.size())); }

  std::vector<cplx> dense() const;
  double sup_norm() const;
  /// Magnitudes of stored samples with the grid's cell measure.
  MeasuredValues measured_values() const;

  /// Box for test functions compatible with this symbol.
  FrequencyBox function_box(int oversample = 4) const;

  SymbolGrid scaled(cplx s) const;
  /// m(eta, xi).
  SymbolGrid transposed() const;
  /// Same samples on a larger box.
  SymbolGrid embedded(int radius) const;

 private:
  int n_ = 1;
  int radius_ = 0;
  double spacing_ = 1.0;
  std::vector<SymbolEntry> entries_;
  nlohmann::json provenance_ = nlohmann::json::object();
};

enum class BilinearMode { Direct, Antidiagonal };

/// field(x) = sum_{xi, eta} m(xi, eta) f(xi) g(eta) e^{2 pi i x.(xi+eta)/L} on
/// the grid of the doubled band [-2F, 2F] with the oversample of f.
/// Direct evaluates the double sum at every sample; Antidiagonal accumulates
/// u(zeta) = sum_{xi+eta=zeta} m f g in entry order and synthesizes u.
PhysicalField apply_bilinear(const SymbolGrid& m, const SpectralVector& f, const SpectralVector& g,
                             BilinearMode mode = BilinearMode::Antidiagonal);

/// ||T_m(f, g)||_1 / (||f||_2 ||g||_2).
double operator_ratio(const SymbolGrid& m, const SpectralVector& f, const SpectralVector& g);

/// Per-instance upper bound L^n ||m||_inf sum|f| sum|g| / (||f||_2 ||g||_2).
double trivial_ratio_bound(const SymbolGrid& m, const SpectralVector& f, const SpectralVector& g);

/// Header: magic "BMSG", u32 version, u32 n, u32 radius, f64 spacing,
/// u32 resolution, u64 entry count; then per entry i64 index and two f32
/// (re, im), all little-endian.
void write_symbol_binary(const SymbolGrid& m, const std::string& path, int resolution);
SymbolGrid read_symbol_binary(const std::string& path);
nlohmann::json symbol_sidecar(const SymbolGrid& m, int resolution);

}  // namespace bimult
