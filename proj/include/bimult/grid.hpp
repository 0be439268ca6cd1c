#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <json.hpp>

namespace bimult {

using cplx = std::complex<double>;

/// Discretization of R^dim used for band-limited functions: the frequency
/// lattice {-F..F}^dim and a physical grid of oversample*(2F+1) points per axis
/// on the torus [0, period)^dim.
struct FrequencyBox {
  int dim = 1;
  int radius = 0;
  int oversample = 4;
  double period = 1.0;

  std::int64_t side() const { return 2 * static_cast<std::int64_t>(radius) + 1; }
  std::int64_t lattice_size() const;
  std::int64_t physical_side() const { return oversample * side(); }
  std::int64_t physical_size() const;
  /// Measure of one physical sample cell, (period / physical_side)^dim.
  double cell_measure() const;

  /// Throws InvalidArgument unless dim >= 1, radius >= 0, oversample >= 2 and
  /// period > 0.
  void validate() const;

  friend bool operator==(const FrequencyBox&, const FrequencyBox&) = default;
};

/// Frequency-side samples f^(xi) on the lattice of a FrequencyBox. Storage is
/// row-major with the last axis fastest; coordinate -F maps to offset 0.
class SpectralVector {
 public:
  SpectralVector() = default;
  explicit SpectralVector(const FrequencyBox& box);
  SpectralVector(const FrequencyBox& box, std::vector<cplx> values);

  const FrequencyBox& box() const { return box_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }

  std::int64_t linear_index(std::span<const int> xi) const;
  std::vector<int> lattice_point(std::int64_t linear) const;
  bool contains(std::span<const int> xi) const;

  cplx& at(std::initializer_list<int> xi) { return values_[linear_index({xi.begin(), xi.size()})]; }
  cplx at(std::initializer_list<int> xi) const { return values_[linear_index({xi.begin(), xi.size()})]; }

  /// Copy zero-padded (or exactly copied) onto a box of larger radius.
  SpectralVector embedded(int radius) const;

  friend SpectralVector operator+(const SpectralVector& a, const SpectralVector& b);
  friend SpectralVector operator*(cplx s, const SpectralVector& a);

 private:
  FrequencyBox box_{};
  std::vector<cplx> values_;
};

/// Physical-side samples on the oversampled torus grid of a FrequencyBox.
/// Sample idx sits at x = period * idx / physical_side.
class PhysicalField {
 public:
  PhysicalField() = default;
  PhysicalField(const FrequencyBox& box, std::vector<cplx> samples);

  const FrequencyBox& box() const { return box_; }
  std::span<const cplx> samples() const { return samples_; }
  std::span<cplx> samples() { return samples_; }

 private:
  FrequencyBox box_{};
  std::vector<cplx> samples_;
};

/// samples(x) = sum_xi values(xi) e^{2 pi i x.xi / period}, by zero-padded
/// inverse FFT onto the oversampled grid.
PhysicalField synthesize(const SpectralVector& spec);

/// Plancherel norm: period^{dim/2} times the Euclidean norm of the values.
double l2_norm(const SpectralVector& spec);

/// Rectangle-rule L1 norm on the torus.
double l1_norm(const PhysicalField& field);

/// Rectangle-rule integral of the field over the torus.
cplx integral(const PhysicalField& field);

/// Pointwise product sigma(xi) f^(xi). Boxes must match.
SpectralVector apply_linear_multiplier(const SpectralVector& sigma, const SpectralVector& f);

/// Pointwise product of two fields on the same grid.
PhysicalField multiply(const PhysicalField& a, const PhysicalField& b);

nlohmann::json box_to_json(const FrequencyBox& box);
FrequencyBox box_from_json(const nlohmann::json& j);

/// {"box": {...}, "index_order": ..., "values": [re0, im0, re1, im1, ...]}
nlohmann::json to_json(const SpectralVector& spec);
SpectralVector spectral_from_json(const nlohmann::json& j);

}  // namespace bimult
