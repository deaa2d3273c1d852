#pragma once

// Exact rationals, tracked-precision magnitudes and complex parameters.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xeig {

using Rational = mpq_class;

/// Raised for malformed textual input. `position()` is the byte offset of
/// the offending character in the original string.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Semantic };

  ParseError(Kind kind, const std::string& message, std::size_t position)
      : std::runtime_error((kind == Kind::Syntax ? "syntax error: " : "semantic error: ") + message +
                           " (at position " + std::to_string(position) + ")"),
        kind_(kind),
        position_(position) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

inline double log_abs(const mpz_class& z) {
  if (z == 0) return -std::numeric_limits<double>::infinity();
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
  return std::log(std::fabs(mantissa)) + static_cast<double>(exponent) * std::log(2.0);
}

/// log|q| without overflow or underflow, for any size of numerator/denominator.
inline double log_abs(const Rational& q) { return log_abs(q.get_num()) - log_abs(q.get_den()); }

inline double to_double(const Rational& q) {
  const double direct = q.get_d();
  if (direct != 0.0 || q == 0) return direct;
  return (sgn(q) < 0 ? -1.0 : 1.0) * std::exp(log_abs(q));
}

inline Rational pow(const Rational& base, unsigned long exponent) {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational result(num, den);
  result.canonicalize();
  return result;
}

/// base^exponent for a signed exponent; base must be non-zero when exponent < 0.
inline Rational pow(const Rational& base, std::int64_t exponent) {
  if (exponent >= 0) return pow(base, static_cast<unsigned long>(exponent));
  if (base == 0) throw std::domain_error("zero raised to a negative power");
  return pow(Rational(1) / base, static_cast<unsigned long>(-exponent));
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses `[+-]int`, `[+-]int/int` or a decimal `[+-]d[.d][e[+-]d]` into an
/// exact rational. Decimal literals are read exactly (0.1 is 1/10).
/// `offset` shifts reported error positions when parsing a substring.
inline Rational parse_rational(std::string_view text, std::size_t offset = 0) {
  std::size_t i = 0;
  const auto fail = [&](const std::string& what) -> Rational {
    throw ParseError(ParseError::Kind::Syntax, what + " in number '" + std::string(text) + "'", offset + i);
  };
  if (text.empty()) return fail("empty number");

  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) digits += text[i++];
  std::string fraction;
  bool has_point = false;
  if (i < text.size() && text[i] == '.') {
    has_point = true;
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) fraction += text[i++];
  }
  if (digits.empty() && fraction.empty()) return fail("expected digits");

  Rational value;
  if (i < text.size() && text[i] == '/') {
    if (has_point) return fail("decimal point in fraction");
    ++i;
    std::string den;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) den += text[i++];
    if (den.empty()) return fail("expected denominator digits");
    if (i != text.size()) return fail("unexpected character");
    mpz_class d(den, 10);
    if (d == 0) return fail("zero denominator");
    value = Rational(mpz_class(digits, 10), d);
    value.canonicalize();
  } else {
    long exponent = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
      ++i;
      bool exp_negative = false;
      if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        exp_negative = text[i] == '-';
        ++i;
      }
      std::string exp_digits;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) exp_digits += text[i++];
      if (exp_digits.empty() || exp_digits.size() > 6) return fail("bad exponent");
      exponent = std::stol(exp_digits) * (exp_negative ? -1 : 1);
    }
    if (i != text.size()) return fail("unexpected character");
    const mpz_class mantissa((digits.empty() ? std::string("0") : digits) + fraction, 10);
    exponent -= static_cast<long>(fraction.size());
    value = Rational(mantissa);
    value *= pow(Rational(10), static_cast<std::int64_t>(exponent));
  }
  return negative ? Rational(-value) : value;
}

inline std::int64_t parse_integer(std::string_view text, std::size_t offset = 0) {
  const Rational q = parse_rational(text, offset);
  if (!is_integer(q) || !q.get_num().fits_slong_p())
    throw ParseError(ParseError::Kind::Syntax, "expected an integer, got '" + std::string(text) + "'", offset);
  return q.get_num().get_si();
}

/// A non-negative magnitude that is either an exact rational or a rational
/// image of a floating-point value carrying a relative error bound.
class ExactScalar {
 public:
  ExactScalar() = default;
  explicit ExactScalar(Rational value) : value_(std::move(value)) {}

  static ExactScalar approximate(double value, double relative_error) {
    if (!std::isfinite(value)) throw std::domain_error("non-finite scalar");
    ExactScalar s{Rational(value)};
    s.exact_ = false;
    s.relative_error_ = relative_error;
    return s;
  }

  const Rational& value() const noexcept { return value_; }
  bool exact() const noexcept { return exact_; }
  double relative_error() const noexcept { return relative_error_; }
  double to_double() const { return xeig::to_double(value_); }
  double log() const { return log_abs(value_); }

  /// "p/q" when exact, a decimal rendering otherwise.
  std::string str() const {
    if (exact_) return to_string(value_);
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", to_double());
    return buffer;
  }

  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    ExactScalar r{Rational(a.value_ * b.value_)};
    r.exact_ = a.exact_ && b.exact_;
    r.relative_error_ = a.relative_error_ + b.relative_error_ + a.relative_error_ * b.relative_error_;
    return r;
  }
  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) {
    if (b.value_ == 0) throw std::domain_error("division by zero");
    ExactScalar r{Rational(a.value_ / b.value_)};
    r.exact_ = a.exact_ && b.exact_;
    // first order bound, |1/(1+e)-1| <= e/(1-e)
    const double eb = b.relative_error_ < 1 ? b.relative_error_ / (1 - b.relative_error_) : INFINITY;
    r.relative_error_ = a.relative_error_ + eb + a.relative_error_ * eb;
    return r;
  }
  ExactScalar& operator*=(const ExactScalar& other) { return *this = *this * other; }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.value_ == b.value_; }
  friend bool operator<(const ExactScalar& a, const ExactScalar& b) { return a.value_ < b.value_; }
  friend bool operator<=(const ExactScalar& a, const ExactScalar& b) { return a.value_ <= b.value_; }
  friend bool operator>(const ExactScalar& a, const ExactScalar& b) { return a.value_ > b.value_; }

 private:
  Rational value_{0};
  bool exact_ = true;
  double relative_error_ = 0.0;
};

/// A complex parameter (lambda, gamma). Either exact with rational real and
/// imaginary parts, or a double-precision value.
class ComplexScalar {
 public:
  ComplexScalar() = default;

  static ComplexScalar exact(Rational re, Rational im = 0) {
    ComplexScalar z;
    z.re_ = std::move(re);
    z.im_ = std::move(im);
    z.exact_ = true;
    z.value_ = {xeig::to_double(z.re_), xeig::to_double(z.im_)};
    return z;
  }

  static ComplexScalar approximate(std::complex<double> value) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      throw std::invalid_argument("lambda must be finite");
    ComplexScalar z;
    z.exact_ = false;
    z.value_ = value;
    return z;
  }

  static ComplexScalar polar(double modulus, double phase) {
    if (phase == 0.0) return approximate({modulus, 0.0});
    return approximate(std::polar(modulus, phase));
  }

  bool exact() const noexcept { return exact_; }
  bool exact_real() const noexcept { return exact_ && im_ == 0; }
  const Rational& re() const { return require_exact(), re_; }
  const Rational& im() const { return require_exact(), im_; }
  std::complex<double> value() const noexcept { return value_; }
  double abs() const { return std::abs(value_); }
  double log_abs() const {
    if (exact_) return 0.5 * xeig::log_abs(Rational(re_ * re_ + im_ * im_));
    return std::log(std::abs(value_));
  }
  bool is_zero() const { return exact_ ? (re_ == 0 && im_ == 0) : value_ == std::complex<double>{}; }

  /// Sign of |z| - r. Exact comparison of squared moduli on the exact path;
  /// otherwise values within `relative_tolerance` of r compare equal.
  int compare_modulus(const Rational& r, double relative_tolerance = 1e-12) const {
    if (exact_) {
      const Rational lhs = re_ * re_ + im_ * im_;
      const Rational rhs = r * r;
      return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    }
    const double lhs = log_abs();
    const double rhs = xeig::log_abs(r);
    if (std::fabs(lhs - rhs) <= relative_tolerance) return 0;
    return lhs < rhs ? -1 : 1;
  }

  std::string str() const {
    if (!exact_) {
      char buffer[96];
      std::snprintf(buffer, sizeof buffer, "%.17g%+.17gi", value_.real(), value_.imag());
      return buffer;
    }
    if (im_ == 0) return to_string(re_);
    std::string im = to_string(im_);
    if (im_ > 0) im = "+" + im;
    return (re_ == 0 ? std::string() : to_string(re_)) + im + "i";
  }

 private:
  void require_exact() const {
    if (!exact_) throw std::logic_error("complex scalar is not exact");
  }

  Rational re_{0};
  Rational im_{0};
  bool exact_ = true;
  std::complex<double> value_{0.0, 0.0};
};

/// Parses `a+bi` style literals whose parts are rationals or decimals:
/// "1+0i", "3/2-1/2i", "-i", "2.5", "1e-3+2i". Always exact.
inline ComplexScalar parse_complex(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.empty()) throw ParseError(ParseError::Kind::Syntax, "empty complex literal", 0);
  if (s.back() != 'i') return ComplexScalar::exact(parse_rational(s));

  const std::string_view body(s.data(), s.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string_view re_part = split == std::string_view::npos ? std::string_view() : body.substr(0, split);
  const std::string_view im_part = split == std::string_view::npos ? body : body.substr(split);
  const std::size_t im_offset = split == std::string_view::npos ? 0 : split;

  Rational re = re_part.empty() ? Rational(0) : parse_rational(re_part);
  Rational im;
  if (im_part.empty() || im_part == "+")
    im = 1;
  else if (im_part == "-")
    im = -1;
  else
    im = parse_rational(im_part, im_offset);
  return ComplexScalar::exact(std::move(re), std::move(im));
}

}  // namespace xeig
