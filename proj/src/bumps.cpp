#include "bimult/bumps.hpp"

#include <cmath>

#include "bimult/error.hpp"

namespace bimult {

void BumpSpec::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("BumpSpec: radius must be positive");
  if (!(plateau >= 0.0) || !(plateau < radius)) throw InvalidArgument("BumpSpec: plateau must lie in [0, radius)");
}

double mollifier(double t) {
  const double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / s);
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double bump_profile_1d(const BumpSpec& spec, double t) {
  const double a = std::abs(t);
  if (a >= spec.radius) return 0.0;
  if (spec.plateau <= 0.0) return mollifier(a / spec.radius);
  if (a <= spec.plateau) return 1.0;
  return smooth_step((spec.radius - a) / (spec.radius - spec.plateau));
}

double bump_profile(const BumpSpec& spec, std::span<const double> x) {
  double v = 1.0;
  for (double t : x) {
    v *= bump_profile_1d(spec, t);
    if (v == 0.0) break;
  }
  return v;
}

std::vector<double> bump_samples_1d(const BumpSpec& spec, double spacing) {
  spec.validate();
  if (!(spacing > 0.0)) throw InvalidArgument("bump_samples_1d: spacing must be positive");
  auto half = static_cast<long>(std::floor(spec.radius / spacing));
  while (half > 0 && bump_profile_1d(spec, static_cast<double>(half) * spacing) == 0.0) --half;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * half + 1));
  for (long i = -half; i <= half; ++i) out.push_back(bump_profile_1d(spec, static_cast<double>(i) * spacing));
  return out;
}

double bump_scale(const BumpSpec& spec, int dim, double spacing) {
  spec.validate();
  switch (spec.normalization) {
    case Normalization::None:
    case Normalization::UnitSup:  // the profile peaks at 1 already
      return 1.0;
    case Normalization::UnitL2: {
      double sum = 0.0;
      for (double v : bump_samples_1d(spec, spacing)) sum += v * v;
      const double axis = std::sqrt(sum * spacing);
      return std::pow(axis, -dim);
    }
  }
  return 1.0;
}

double bump_axis_lp_power(const BumpSpec& spec, double p) {
  spec.validate();
  const int intervals = 20000;
  const double a = -spec.radius, h = 2.0 * spec.radius / intervals;
  double sum = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::pow(bump_profile_1d(spec, a + i * h), p);
  }
  return sum * h / 3.0;
}

nlohmann::json to_json(const BumpSpec& spec) {
  const char* norm = spec.normalization == Normalization::UnitL2    ? "unitL2"
                     : spec.normalization == Normalization::UnitSup ? "unitSup"
                                                                    : "none";
  return {{"radius", spec.radius}, {"plateau", spec.plateau}, {"normalization", norm}};
}

BumpSpec bump_from_json(const nlohmann::json& j) {
  try {
    BumpSpec spec;
    spec.radius = j.at("radius").get<double>();
    spec.plateau = j.value("plateau", 0.0);
    const auto norm = j.value("normalization", std::string("none"));
    if (norm == "none")
      spec.normalization = Normalization::None;
    else if (norm == "unitL2")
      spec.normalization = Normalization::UnitL2;
    else if (norm == "unitSup")
      spec.normalization = Normalization::UnitSup;
    else
      throw SchemaError("BumpSpec: unknown normalization '" + norm + "'");
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("BumpSpec: ") + e.what());
  }
}

}  // namespace bimult
