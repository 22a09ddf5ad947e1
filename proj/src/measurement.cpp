#include "pimetro/measurement.hpp"

#include <cmath>
#include <numbers>

namespace pimetro {

const char* to_string(RoundingRule rule) {
  switch (rule) {
    case RoundingRule::nearest:
      return "nearest";
    case RoundingRule::literal_text:
      return "literal";
  }
  return "nearest";
}

RoundingRule rounding_rule_from_string(const std::string& text) {
  if (text == "nearest") return RoundingRule::nearest;
  if (text == "literal") return RoundingRule::literal_text;
  throw std::invalid_argument("rounding_rule must be 'nearest' or 'literal', got '" + text + "'");
}

double TrialConfig::circumference() const { return 2.0 * std::numbers::pi * radius; }

void TrialConfig::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("radius must be finite and > 0");
  }
  errors.validate();
}

double sample_circumference_piece(Rng& rng, const TrialConfig& cfg) {
  const ErrorModel& e = cfg.errors;
  double piece = cfg.circumference() - cfg.six_r();
  piece += bend_elongation(e);
  piece += sample_normal(rng, 0.0, circumference_stdev(e, cfg.radius));
  // Two cuts close the circumference wire, a third separates it at 6R.
  piece += 3.0 * cut_elongation(e);
  piece += sample_normal(rng, 0.0, cut_match_stdev(e));
  return piece;
}

Accumulation accumulate_until_exceeds(Rng& rng, const TrialConfig& cfg, double piece_ref,
                                      double target) {
  if (!(piece_ref > 0.0)) throw std::invalid_argument("accumulate: piece_ref must be > 0");
  if (!(target > piece_ref)) throw std::invalid_argument("accumulate: target must exceed piece_ref");
  const double match_sd = cut_match_stdev(cfg.errors);
  const double span = juxtaposition_span(cfg.errors);

  Accumulation acc;
  acc.pieces_used = 1;
  acc.total = piece_ref;
  acc.last_piece = piece_ref;
  while (acc.total <= target) {
    if (acc.pieces_used >= kMaxPieces) {
      throw DegenerateConfigError("accumulation exceeded " + std::to_string(kMaxPieces) +
                                  " pieces (piece " + std::to_string(piece_ref) + " mm, target " +
                                  std::to_string(target) + " mm)");
    }
    double piece = piece_ref;
    piece += sample_normal(rng, 0.0, match_sd);
    piece += sample_uniform(rng, -span, 0.0);
    acc.total_before_last = acc.total;
    acc.total += piece;
    acc.last_piece = piece;
    ++acc.pieces_used;
  }
  return acc;
}

FirstIteration first_iteration(Rng& rng, const TrialConfig& cfg, double c_minus_six_r) {
  if (!(c_minus_six_r > 0.0)) throw std::invalid_argument("first_iteration: piece must be > 0");
  const ErrorModel& e = cfg.errors;
  const Accumulation acc = accumulate_until_exceeds(rng, cfg, c_minus_six_r, cfg.six_r());

  FirstIteration out;
  out.quotient = static_cast<int>(acc.pieces_used - 1);
  // The piece that passed 6R is cut at the mark; only the earlier ones count.
  double rem = cfg.six_r() - acc.total_before_last;
  rem += sample_uniform(rng, 0.0, juxtaposition_span(e));
  rem += sample_normal(rng, 0.0, cut_match_stdev(e));
  rem += cut_elongation(e);
  out.remainder_piece = rem;
  return out;
}

std::int64_t round_count(std::int64_t pieces_to_pass, double overshoot, double last_piece_len,
                         RoundingRule rule) {
  if (!(overshoot >= 0.0)) throw std::invalid_argument("round_count: overshoot must be >= 0");
  if (!(last_piece_len > 0.0)) throw std::invalid_argument("round_count: last piece must be > 0");
  const double half = 0.5 * last_piece_len;
  switch (rule) {
    case RoundingRule::nearest:
      return overshoot > half ? pieces_to_pass - 1 : pieces_to_pass;
    case RoundingRule::literal_text:
      return overshoot < half ? pieces_to_pass - 1 : pieces_to_pass;
  }
  return pieces_to_pass;
}

int second_iteration(Rng& rng, const TrialConfig& cfg, double c_minus_six_r,
                     double remainder_piece) {
  if (!(c_minus_six_r > 0.0) || !(remainder_piece > 0.0)) {
    throw std::invalid_argument("second_iteration: both lengths must be > 0");
  }
  if (remainder_piece >= c_minus_six_r) {
    // A single piece already reaches the mark.
    return static_cast<int>(
        round_count(1, remainder_piece - c_minus_six_r, remainder_piece, cfg.rounding));
  }
  const Accumulation acc = accumulate_until_exceeds(rng, cfg, remainder_piece, c_minus_six_r);
  return static_cast<int>(
      round_count(acc.pieces_used, acc.total - c_minus_six_r, acc.last_piece, cfg.rounding));
}

TrialResult simulate_trial(Rng& rng, const TrialConfig& cfg) {
  TrialResult r;
  r.c_minus_six_r = sample_circumference_piece(rng, cfg);
  if (!(r.c_minus_six_r > 0.0)) {
    throw DegenerateConfigError("circumference piece is non-positive; radius " +
                                std::to_string(cfg.radius) + " mm is too small for the errors");
  }
  const FirstIteration first = first_iteration(rng, cfg, r.c_minus_six_r);
  r.first_quotient = first.quotient;
  r.remainder_piece = first.remainder_piece;
  r.discarded = first.quotient != kExpectedFirstQuotient;

  if (!(r.remainder_piece > 0.0)) {
    r.degenerate = true;
  } else {
    try {
      r.second_quotient = second_iteration(rng, cfg, r.c_minus_six_r, r.remainder_piece);
    } catch (const DegenerateConfigError&) {
      r.degenerate = true;
    }
  }
  if (r.degenerate) {
    r.second_quotient = 0;
    r.discarded = true;
  }
  return r;
}

}  // namespace pimetro
