#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "pimetro/error_model.hpp"
#include "pimetro/stochastics.hpp"

namespace pimetro {

/// How the second-iteration piece count is turned into an integer answer.
enum class RoundingRule {
  /// Nearest integer of the implied ratio, ties up. Subtract one when more
  /// than half of the last piece extends past the target.
  nearest,
  /// The inverted branch as written in the simulation steps: subtract one
  /// when *less* than half of the last piece extends past the target.
  literal_text,
};

const char* to_string(RoundingRule rule);
RoundingRule rounding_rule_from_string(const std::string& text);

/// Thrown when an accumulation cannot terminate in a sane number of pieces.
class DegenerateConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Upper bound on pieces laid in a single accumulation.
inline constexpr std::int64_t kMaxPieces = 1'000'000;

/// First quotient of an error-free measurement.
inline constexpr int kExpectedFirstQuotient = 21;
/// Second quotient of an error-free measurement.
inline constexpr int kExpectedSecondQuotient = 5;

struct TrialConfig {
  double radius = kHeadlineRadius;
  ErrorModel errors;
  RoundingRule rounding = RoundingRule::nearest;

  double six_r() const { return 6.0 * radius; }
  double circumference() const;

  void validate() const;

  bool operator==(const TrialConfig&) const = default;
};

struct TrialResult {
  int first_quotient = 0;
  int second_quotient = 0;
  /// Realized (C - 6R) reference piece.
  double c_minus_six_r = 0.0;
  /// Realized 6R - 21(C - 6R) reference piece.
  double remainder_piece = 0.0;
  /// first_quotient != 21, or the second iteration could not be carried out.
  bool discarded = false;
  /// The remainder was too short to lay out; second_quotient is 0.
  bool degenerate = false;

  bool operator==(const TrialResult&) const = default;
};

struct Accumulation {
  std::int64_t pieces_used = 0;
  /// Total length before the piece that passed the target.
  double total_before_last = 0.0;
  /// Total length including that piece.
  double total = 0.0;
  double last_piece = 0.0;
};

/// (2*pi*R - 6R) plus bend elongation, circumference noise, three cut
/// elongations and one cut-to-match error, toggles applied.
double sample_circumference_piece(Rng& rng, const TrialConfig& cfg);

/**
 * Lays copies of a reference piece end to end until the total exceeds the
 * target. The first piece is the reference itself; every further piece is
 * the reference plus a cut-to-match normal error plus a juxtaposition
 * shrinkage drawn from U(-span, 0).
 *
 * Requires 0 < piece_ref < target. Throws DegenerateConfigError after
 * kMaxPieces pieces.
 */
Accumulation accumulate_until_exceeds(Rng& rng, const TrialConfig& cfg, double piece_ref,
                                      double target);

struct FirstIteration {
  int quotient = 0;
  double remainder_piece = 0.0;
};

/// How many (C - 6R) pieces fit into 6R, and the cut remainder piece.
FirstIteration first_iteration(Rng& rng, const TrialConfig& cfg, double c_minus_six_r);

/// pieces_to_pass, or one less when the count should round down under
/// `rule`. Requires overshoot >= 0 and last_piece_len > 0.
std::int64_t round_count(std::int64_t pieces_to_pass, double overshoot, double last_piece_len,
                         RoundingRule rule = RoundingRule::nearest);

/// How many remainder pieces fit into (C - 6R), rounded per cfg.rounding.
int second_iteration(Rng& rng, const TrialConfig& cfg, double c_minus_six_r,
                     double remainder_piece);

/// One full measurement: reference piece, first iteration, second iteration.
TrialResult simulate_trial(Rng& rng, const TrialConfig& cfg);

}  // namespace pimetro
