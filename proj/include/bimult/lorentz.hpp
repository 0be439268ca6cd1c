#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bimult {

/// Magnitudes of a step function over cells of equal measure. Counting
/// measure is cell_measure == 1.
struct MeasuredValues {
  std::vector<double> magnitudes;
  double cell_measure = 1.0;

  /// Throws InvalidArgument on negative/non-finite magnitudes or a
  /// non-positive cell measure.
  void validate() const;
};

MeasuredValues measured(std::span<const std::complex<double>> values, double cell_measure = 1.0);
MeasuredValues measured(std::span<const double> values, double cell_measure = 1.0);

/// Non-increasing rearrangement f*: equals sorted[j-1] on ((j-1)c, jc].
struct RearrangementProfile {
  std::vector<double> sorted;
  double cell_measure = 1.0;

  double breakpoint(std::size_t j) const { return static_cast<double>(j) * cell_measure; }
  /// f*(t) for t > 0; zero beyond the last breakpoint.
  double at(double t) const;
};

RearrangementProfile rearrangement(const MeasuredValues& v);

/// sup_t t^{1/q} f*(t), evaluated at the breakpoints where it is attained.
double weak_quasinorm(const MeasuredValues& v, double q);

/// Measure of the strict level set {|f| > lambda}.
double level_measure(const MeasuredValues& v, double lambda);

/// (sum |f|^p c)^{1/p}.
double lp_norm(const MeasuredValues& v, double p);

}  // namespace bimult
