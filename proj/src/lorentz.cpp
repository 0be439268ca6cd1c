#include "bimult/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bimult/error.hpp"

namespace bimult {

void MeasuredValues::validate() const {
  if (!(cell_measure > 0.0) || !std::isfinite(cell_measure))
    throw InvalidArgument("MeasuredValues: cell measure must be positive");
  for (double m : magnitudes)
    if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidArgument("MeasuredValues: magnitudes must be finite and >= 0");
}

MeasuredValues measured(std::span<const std::complex<double>> values, double cell_measure) {
  MeasuredValues out{{}, cell_measure};
  out.magnitudes.reserve(values.size());
  for (const auto& v : values) out.magnitudes.push_back(std::abs(v));
  return out;
}

MeasuredValues measured(std::span<const double> values, double cell_measure) {
  MeasuredValues out{{}, cell_measure};
  out.magnitudes.reserve(values.size());
  for (double v : values) out.magnitudes.push_back(std::abs(v));
  return out;
}

double RearrangementProfile::at(double t) const {
  if (!(t > 0.0)) throw InvalidArgument("rearrangement is defined for t > 0");
  const double j = std::ceil(t / cell_measure);
  if (j > static_cast<double>(sorted.size())) return 0.0;
  return sorted[static_cast<std::size_t>(j) - 1];
}

RearrangementProfile rearrangement(const MeasuredValues& v) {
  v.validate();
  RearrangementProfile p{v.magnitudes, v.cell_measure};
  std::sort(p.sorted.begin(), p.sorted.end(), std::greater<>());
  return p;
}

double weak_quasinorm(const MeasuredValues& v, double q) {
  if (!(q > 0.0)) throw InvalidArgument("weak_quasinorm: q must be positive");
  const RearrangementProfile p = rearrangement(v);
  double best = 0.0;
  for (std::size_t j = 0; j < p.sorted.size(); ++j) {
    if (p.sorted[j] == 0.0) break;
    best = std::max(best, std::pow(p.breakpoint(j + 1), 1.0 / q) * p.sorted[j]);
  }
  return best;
}

double level_measure(const MeasuredValues& v, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("level_measure: lambda must be positive");
  v.validate();
  const auto count = std::count_if(v.magnitudes.begin(), v.magnitudes.end(), [&](double m) { return m > lambda; });
  return static_cast<double>(count) * v.cell_measure;
}

double lp_norm(const MeasuredValues& v, double p) {
  if (!(p > 0.0)) throw InvalidArgument("lp_norm: p must be positive");
  v.validate();
  double sum = 0.0;
  for (double m : v.magnitudes) sum += std::pow(m, p);
  return std::pow(sum * v.cell_measure, 1.0 / p);
}

}  // namespace bimult
