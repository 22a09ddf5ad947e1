#pragma once

#include <optional>

namespace pimetro {

/// Radius (mm) at which the explicit circumference-stdev override applies.
inline constexpr double kHeadlineRadius = 450.0;

/**
 * Error sources of the wire measurement, in millimetres.
 *
 * Fixed errors are the systematic terms the historical measurer cannot see
 * (bend elongation, cut-bevel elongation). Random errors are the
 * trial-to-trial terms (circumference placement, cut-to-match,
 * juxtaposition). The two toggles switch each class off independently.
 *
 * The accessor functions below apply the toggles; read the raw fields only
 * for serialization.
 */
struct ErrorModel {
  double wire_diameter = 0.5;
  /// Straightened-length excess per mm of wire diameter for a full circle.
  double bend_elongation_per_mm = 0.057;
  /// Long-side bevel protrusion added by each knife cut.
  double cut_elongation = 0.095;
  /// Short-side bevel recession. Carried for completeness; never simulated.
  double cut_shortening_short_side = 0.085;
  double cut_match_stdev = 0.09;
  /// Width of the uniform juxtaposition error between two cut ends.
  double juxtaposition_span = 0.18;
  double circumference_stdev_base = 0.05;
  double circumference_stdev_slope = 8.68e-4;
  /// Used in place of the linear fit when radius == kHeadlineRadius.
  std::optional<double> circumference_stdev_override = 0.3538;

  bool fixed_errors_enabled = true;
  bool random_errors_enabled = true;

  // Sources assessed and found negligible. They must stay zero.
  double cross_section_distortion = 0.0;
  double groove_systematic_error = 0.0;
  double six_r_marking_error = 0.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const ErrorModel&) const = default;
};

/// Model with both error classes switched off.
ErrorModel zero_error_model();

double bend_elongation(const ErrorModel& model);
double cut_elongation(const ErrorModel& model);
double cut_match_stdev(const ErrorModel& model);
double juxtaposition_span(const ErrorModel& model);

/// 0.05 + 8.68e-4 * radius with default constants, or the override at the
/// headline radius. Throws std::invalid_argument for radius <= 0.
double circumference_stdev(const ErrorModel& model, double radius);

/// Circumference error (mm) of 0.003 % that flips the second quotient 5 -> 4.
double flip_threshold(double radius);

}  // namespace pimetro
