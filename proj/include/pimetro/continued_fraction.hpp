#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace pimetro {

/// Exact rational in lowest terms with a positive denominator.
class Rational {
 public:
  Rational(std::int64_t numerator, std::int64_t denominator = 1);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  bool operator==(const Rational&) const = default;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

struct CFExpansion {
  /// a0, a1, a2, ...; a0 >= 0, the rest >= 1.
  std::vector<std::int64_t> quotients;
  /// The expansion ended on a zero (or sub-tolerance) remainder.
  bool exact = false;

  bool operator==(const CFExpansion&) const = default;
};

/// Expansion of a positive real: a0 = floor(x), recurse on 1/frac(x).
/// Stops after max_terms or when frac(x) is zero or below tolerance; an
/// expansion that ends this way is canonicalized. Throws
/// std::invalid_argument for x <= 0 or max_terms < 1.
CFExpansion cf_expand(double x, int max_terms, double tolerance);

/// Exact expansion of p/q > 0 by integer Euclid (at most max_terms terms).
CFExpansion cf_expand(const Rational& x, int max_terms = 1 << 30);

/// Folds ..., n, 1 into ..., n+1 (except for the lone [1]).
CFExpansion canonical(CFExpansion cf);

/// Value of [a0; a1, ..., an] in lowest terms. Throws std::invalid_argument
/// on an empty list and std::overflow_error if the terms overflow 64 bits.
Rational convergent(std::span<const std::int64_t> quotients);

/// Every prefix convergent p_k/q_k of the quotient list.
std::vector<Rational> convergents(std::span<const std::int64_t> quotients);

/**
 * Quotients of repeated division with remainder of length a by length b:
 * a = q0*b + r0, b = q1*r0 + r1, ... Stops after max_terms or once the
 * remainder is zero or within tolerance of 0 or of b (absolute, in the
 * units of a and b; the latter counts as one more piece).
 * For integer inputs with tolerance 0 this is Euclid's algorithm.
 */
std::vector<std::int64_t> euclid_quotients(double a, double b, int max_terms, double tolerance);

/// 3 * r, for r an estimate of pi/3. Throws for r <= 0.
double pi_estimate(const Rational& r);

}  // namespace pimetro
