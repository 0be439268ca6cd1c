#pragma once

#include <span>
#include <vector>

#include <json.hpp>

namespace bimult {

enum class Normalization { None, UnitL2, UnitSup };

/// Smooth even bump supported in |x_r| < radius on every axis, built as a
/// tensor product of one-dimensional profiles. With plateau == 0 the axis
/// profile is the mollifier exp(1 - 1/(1 - (t/radius)^2)); with plateau > 0 it
/// equals 1 on |t| <= plateau and falls smoothly to 0 at |t| = radius.
struct BumpSpec {
  double radius = 0.1;
  double plateau = 0.0;
  Normalization normalization = Normalization::None;

  void validate() const;
  friend bool operator==(const BumpSpec&, const BumpSpec&) = default;
};

/// exp(1 - 1/(1 - t^2)) on |t| < 1, else 0.
double mollifier(double t);

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

/// Unnormalized axis profile.
double bump_profile_1d(const BumpSpec& spec, double t);

/// Unnormalized tensor-product profile.
double bump_profile(const BumpSpec& spec, std::span<const double> x);

/// Factor that realizes spec.normalization for the tensor profile on `dim`
/// axes sampled with the given spacing (unit L2 is measured on that lattice).
double bump_scale(const BumpSpec& spec, int dim, double spacing);

/// Axis profile sampled at t = i * spacing for i = -half..half, where half is
/// the largest index with nonzero value. Unnormalized.
std::vector<double> bump_samples_1d(const BumpSpec& spec, double spacing);

/// int |profile_1d|^p dt by composite Simpson on a fine grid.
double bump_axis_lp_power(const BumpSpec& spec, double p);

nlohmann::json to_json(const BumpSpec& spec);
BumpSpec bump_from_json(const nlohmann::json& j);

}  // namespace bimult
