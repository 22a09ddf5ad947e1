#include "pimetro/error_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pimetro {

namespace {

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
  }
}

void require_zero(double v, const char* name) {
  if (v != 0.0) {
    throw std::invalid_argument(std::string(name) +
                                " is a discounted error source and must be 0");
  }
}

}  // namespace

void ErrorModel::validate() const {
  if (!(wire_diameter > 0.0) || !std::isfinite(wire_diameter)) {
    throw std::invalid_argument("wire_diameter must be finite and > 0");
  }
  require_non_negative(bend_elongation_per_mm, "bend_elongation_per_mm");
  require_non_negative(cut_elongation, "cut_elongation");
  require_non_negative(cut_shortening_short_side, "cut_shortening_short_side");
  require_non_negative(cut_match_stdev, "cut_match_stdev");
  require_non_negative(juxtaposition_span, "juxtaposition_span");
  require_non_negative(circumference_stdev_base, "circumference_stdev_base");
  require_non_negative(circumference_stdev_slope, "circumference_stdev_slope");
  if (circumference_stdev_override) {
    require_non_negative(*circumference_stdev_override, "circumference_stdev_override");
  }
  require_zero(cross_section_distortion, "cross_section_distortion");
  require_zero(groove_systematic_error, "groove_systematic_error");
  require_zero(six_r_marking_error, "six_r_marking_error");
}

ErrorModel zero_error_model() {
  ErrorModel m;
  m.fixed_errors_enabled = false;
  m.random_errors_enabled = false;
  return m;
}

double bend_elongation(const ErrorModel& model) {
  return model.fixed_errors_enabled ? model.bend_elongation_per_mm * model.wire_diameter : 0.0;
}

double cut_elongation(const ErrorModel& model) {
  return model.fixed_errors_enabled ? model.cut_elongation : 0.0;
}

double cut_match_stdev(const ErrorModel& model) {
  return model.random_errors_enabled ? model.cut_match_stdev : 0.0;
}

double juxtaposition_span(const ErrorModel& model) {
  return model.random_errors_enabled ? model.juxtaposition_span : 0.0;
}

double circumference_stdev(const ErrorModel& model, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  if (!model.random_errors_enabled) return 0.0;
  if (model.circumference_stdev_override && radius == kHeadlineRadius) {
    return *model.circumference_stdev_override;
  }
  return model.circumference_stdev_base + model.circumference_stdev_slope * radius;
}

double flip_threshold(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  return 0.00003 * 2.0 * std::numbers::pi * radius;
}

}  // namespace pimetro
