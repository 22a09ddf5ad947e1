#include "pimetro/continued_fraction.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pimetro {

namespace {

std::int64_t checked_mul_add(std::int64_t a, std::int64_t b, std::int64_t c) {
  std::int64_t prod = 0;
  std::int64_t sum = 0;
  if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(prod, c, &sum)) {
    throw std::overflow_error("continued fraction terms overflow 64-bit integers");
  }
  return sum;
}

void check_quotients(std::span<const std::int64_t> q) {
  if (q.empty()) throw std::invalid_argument("quotient list is empty");
  if (q[0] < 0) throw std::invalid_argument("leading quotient must be >= 0");
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] < 1) throw std::invalid_argument("quotients after the first must be >= 1");
  }
}

// Above this 1/frac is indistinguishable from a terminating expansion.
constexpr double kMaxQuotient = 0x1.0p62;

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::invalid_argument("Rational: zero denominator");
  if (denominator < 0) {
    if (numerator == INT64_MIN || denominator == INT64_MIN) {
      throw std::overflow_error("Rational: cannot negate INT64_MIN");
    }
    numerator = -numerator;
    denominator = -denominator;
  }
  const std::int64_t g = std::gcd(numerator, denominator);
  num_ = numerator / g;
  den_ = denominator / g;
}

std::string Rational::to_string() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

CFExpansion canonical(CFExpansion cf) {
  if (cf.quotients.size() > 1 && cf.quotients.back() == 1) {
    cf.quotients.pop_back();
    ++cf.quotients.back();
  }
  return cf;
}

CFExpansion cf_expand(double x, int max_terms, double tolerance) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("cf_expand: x must be > 0");
  if (max_terms < 1) throw std::invalid_argument("cf_expand: max_terms must be >= 1");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("cf_expand: tolerance must be >= 0");

  CFExpansion cf;
  for (int term = 0; term < max_terms; ++term) {
    const double a = std::floor(x);
    cf.quotients.push_back(static_cast<std::int64_t>(a));
    const double frac = x - a;
    if (frac == 0.0 || frac < tolerance || 1.0 / frac >= kMaxQuotient) {
      cf.exact = true;
      break;
    }
    x = 1.0 / frac;
  }
  return cf.exact ? canonical(std::move(cf)) : cf;
}

CFExpansion cf_expand(const Rational& x, int max_terms) {
  if (x.numerator() <= 0) throw std::invalid_argument("cf_expand: x must be > 0");
  if (max_terms < 1) throw std::invalid_argument("cf_expand: max_terms must be >= 1");
  CFExpansion cf;
  std::int64_t a = x.numerator();
  std::int64_t b = x.denominator();
  for (int term = 0; term < max_terms; ++term) {
    cf.quotients.push_back(a / b);
    const std::int64_t r = a % b;
    if (r == 0) {
      cf.exact = true;
      break;
    }
    a = b;
    b = r;
  }
  return cf.exact ? canonical(std::move(cf)) : cf;
}

Rational convergent(std::span<const std::int64_t> quotients) {
  check_quotients(quotients);
  // Fold from the tail: value = p/q.
  std::int64_t p = quotients.back();
  std::int64_t q = 1;
  for (std::size_t i = quotients.size() - 1; i-- > 0;) {
    const std::int64_t next_p = checked_mul_add(quotients[i], p, q);
    q = p;
    p = next_p;
  }
  return Rational(p, q);
}

std::vector<Rational> convergents(std::span<const std::int64_t> quotients) {
  check_quotients(quotients);
  std::vector<Rational> out;
  out.reserve(quotients.size());
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p = quotients[0], q = 1;
  out.emplace_back(p, q);
  for (std::size_t i = 1; i < quotients.size(); ++i) {
    const std::int64_t p_next = checked_mul_add(quotients[i], p, p_prev);
    const std::int64_t q_next = checked_mul_add(quotients[i], q, q_prev);
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    out.emplace_back(p, q);
  }
  return out;
}

std::vector<std::int64_t> euclid_quotients(double a, double b, int max_terms, double tolerance) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("euclid_quotients: lengths must be finite and > 0");
  }
  if (max_terms < 1) throw std::invalid_argument("euclid_quotients: max_terms must be >= 1");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("euclid_quotients: tolerance must be >= 0");

  std::vector<std::int64_t> out;
  for (int term = 0; term < max_terms; ++term) {
    // fmod is exact, so integer-valued inputs follow Euclid exactly.
    const double r = std::fmod(a, b);
    double q = std::round((a - r) / b);
    if (q >= kMaxQuotient) throw std::overflow_error("euclid_quotients: quotient overflow");
    if (tolerance > 0.0 && b - r < tolerance) {
      // Within tolerance of one more whole piece.
      out.push_back(static_cast<std::int64_t>(q) + 1);
      break;
    }
    out.push_back(static_cast<std::int64_t>(q));
    if (r == 0.0 || r < tolerance) break;
    a = b;
    b = r;
  }
  return out;
}

double pi_estimate(const Rational& r) {
  if (r.numerator() <= 0) throw std::invalid_argument("pi_estimate: ratio must be > 0");
  return 3.0 * static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace pimetro
