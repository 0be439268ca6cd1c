#include "bimult/grid.hpp"

#include <cmath>

#include "bimult/error.hpp"
#include "bimult/fft.hpp"

namespace bimult {
namespace {

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

std::int64_t FrequencyBox::lattice_size() const { return ipow(side(), dim); }

std::int64_t FrequencyBox::physical_size() const { return ipow(physical_side(), dim); }

double FrequencyBox::cell_measure() const {
  return std::pow(period / static_cast<double>(physical_side()), dim);
}

void FrequencyBox::validate() const {
  if (dim < 1) throw InvalidArgument("FrequencyBox: dim must be >= 1");
  if (radius < 0) throw InvalidArgument("FrequencyBox: radius must be >= 0");
  if (oversample < 2) throw InvalidArgument("FrequencyBox: oversample must be >= 2");
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidArgument("FrequencyBox: period must be positive");
}

SpectralVector::SpectralVector(const FrequencyBox& box) : box_(box) {
  box_.validate();
  values_.assign(static_cast<std::size_t>(box_.lattice_size()), cplx{});
}

SpectralVector::SpectralVector(const FrequencyBox& box, std::vector<cplx> values)
    : box_(box), values_(std::move(values)) {
  box_.validate();
  if (static_cast<std::int64_t>(values_.size()) != box_.lattice_size())
    throw DimensionMismatch("SpectralVector: value count does not match box");
}

bool SpectralVector::contains(std::span<const int> xi) const {
  if (static_cast<int>(xi.size()) != box_.dim) return false;
  for (int c : xi)
    if (c < -box_.radius || c > box_.radius) return false;
  return true;
}

std::int64_t SpectralVector::linear_index(std::span<const int> xi) const {
  if (static_cast<int>(xi.size()) != box_.dim) throw DimensionMismatch("lattice point has wrong dimension");
  std::int64_t idx = 0;
  for (int c : xi) {
    if (c < -box_.radius || c > box_.radius) throw BandLimitExceeded("lattice point outside box");
    idx = idx * box_.side() + (c + box_.radius);
  }
  return idx;
}

std::vector<int> SpectralVector::lattice_point(std::int64_t linear) const {
  std::vector<int> xi(static_cast<std::size_t>(box_.dim));
  for (int d = box_.dim - 1; d >= 0; --d) {
    xi[static_cast<std::size_t>(d)] = static_cast<int>(linear % box_.side()) - box_.radius;
    linear /= box_.side();
  }
  return xi;
}

SpectralVector SpectralVector::embedded(int radius) const {
  if (radius < box_.radius) throw BandLimitExceeded("embedded: target radius smaller than source");
  FrequencyBox big = box_;
  big.radius = radius;
  SpectralVector out(big);
  for (std::int64_t i = 0; i < box_.lattice_size(); ++i) {
    if (values_[static_cast<std::size_t>(i)] == cplx{}) continue;
    const auto xi = lattice_point(i);
    out.values_[static_cast<std::size_t>(out.linear_index(xi))] = values_[static_cast<std::size_t>(i)];
  }
  return out;
}

SpectralVector operator+(const SpectralVector& a, const SpectralVector& b) {
  if (!(a.box_ == b.box_)) throw DimensionMismatch("SpectralVector sum: box mismatch");
  SpectralVector out = a;
  for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] += b.values_[i];
  return out;
}

SpectralVector operator*(cplx s, const SpectralVector& a) {
  SpectralVector out = a;
  for (auto& v : out.values_) v *= s;
  return out;
}

PhysicalField::PhysicalField(const FrequencyBox& box, std::vector<cplx> samples)
    : box_(box), samples_(std::move(samples)) {
  box_.validate();
  if (static_cast<std::int64_t>(samples_.size()) != box_.physical_size())
    throw DimensionMismatch("PhysicalField: sample count does not match box");
}

PhysicalField synthesize(const SpectralVector& spec) {
  const FrequencyBox& box = spec.box();
  const std::int64_t n = box.physical_side();
  std::vector<cplx> grid(static_cast<std::size_t>(box.physical_size()));
  const auto values = spec.values();
  for (std::int64_t i = 0; i < box.lattice_size(); ++i) {
    const cplx v = values[static_cast<std::size_t>(i)];
    if (v == cplx{}) continue;
    // wrap each coordinate onto [0, n)
    std::int64_t rem = i, target = 0, stride = 1;
    for (int d = box.dim - 1; d >= 0; --d) {
      const std::int64_t c = rem % box.side() - box.radius;
      rem /= box.side();
      target += ((c % n + n) % n) * stride;
      stride *= n;
    }
    grid[static_cast<std::size_t>(target)] = v;
  }
  std::vector<int> shape(static_cast<std::size_t>(box.dim), static_cast<int>(n));
  fft(grid, shape, FftDirection::Backward);
  return PhysicalField(box, std::move(grid));
}

double l2_norm(const SpectralVector& spec) {
  double sum = 0.0;
  for (const cplx& v : spec.values()) sum += std::norm(v);
  return std::pow(spec.box().period, 0.5 * spec.box().dim) * std::sqrt(sum);
}

double l1_norm(const PhysicalField& field) {
  double sum = 0.0;
  for (const cplx& v : field.samples()) sum += std::abs(v);
  return sum * field.box().cell_measure();
}

cplx integral(const PhysicalField& field) {
  cplx sum{};
  for (const cplx& v : field.samples()) sum += v;
  return sum * field.box().cell_measure();
}

SpectralVector apply_linear_multiplier(const SpectralVector& sigma, const SpectralVector& f) {
  if (!(sigma.box() == f.box())) throw DimensionMismatch("apply_linear_multiplier: box mismatch");
  SpectralVector out = f;
  auto ov = out.values();
  const auto sv = sigma.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] *= sv[i];
  return out;
}

PhysicalField multiply(const PhysicalField& a, const PhysicalField& b) {
  if (!(a.box() == b.box())) throw DimensionMismatch("multiply: field grids differ");
  std::vector<cplx> out(a.samples().begin(), a.samples().end());
  const auto bs = b.samples();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bs[i];
  return PhysicalField(a.box(), std::move(out));
}

nlohmann::json box_to_json(const FrequencyBox& box) {
  return {{"dim", box.dim}, {"radius", box.radius}, {"oversample", box.oversample}, {"period", box.period}};
}

FrequencyBox box_from_json(const nlohmann::json& j) {
  try {
    FrequencyBox box;
    box.dim = j.at("dim").get<int>();
    box.radius = j.at("radius").get<int>();
    box.oversample = j.value("oversample", 4);
    box.period = j.value("period", 1.0);
    box.validate();
    return box;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("FrequencyBox: ") + e.what());
  }
}

nlohmann::json to_json(const SpectralVector& spec) {
  nlohmann::json flat = nlohmann::json::array();
  for (const cplx& v : spec.values()) {
    flat.push_back(v.real());
    flat.push_back(v.imag());
  }
  return {{"box", box_to_json(spec.box())},
          {"index_order", "row-major, last axis fastest, coordinate -radius first"},
          {"values", std::move(flat)}};
}

SpectralVector spectral_from_json(const nlohmann::json& j) {
  try {
    const FrequencyBox box = box_from_json(j.at("box"));
    const auto& flat = j.at("values");
    if (!flat.is_array() || static_cast<std::int64_t>(flat.size()) != 2 * box.lattice_size())
      throw SchemaError("SpectralVector: values must hold 2*(2F+1)^dim numbers");
    std::vector<cplx> values(static_cast<std::size_t>(box.lattice_size()));
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = {flat[2 * i].get<double>(), flat[2 * i + 1].get<double>()};
    return SpectralVector(box, std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("SpectralVector: ") + e.what());
  }
}

}  // namespace bimult
