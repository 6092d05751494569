#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

namespace opbench {

/// Arithmetic mode shared by every value of a scenario.
enum class ScalarKind { Rational, Float };

/// Default relative tolerance of float mode (2^-40).
inline constexpr double kDefaultTolerance = 9.094947017729282e-13;

struct ScalarMode {
  ScalarKind kind = ScalarKind::Rational;
  double tolerance = kDefaultTolerance;

  static ScalarMode rational() { return {}; }
  static ScalarMode floating(double tau = kDefaultTolerance) { return {ScalarKind::Float, tau}; }
};

/// A real scalar that is either an exact rational (GMP, always canonical) or
/// a binary double. Mixing the two kinds in one expression throws.
class Scalar {
 public:
  Scalar() : value_(mpq_class(0)) {}
  Scalar(int v) : value_(mpq_class(v)) {}             // NOLINT(google-explicit-constructor)
  Scalar(long v) : value_(mpq_class(v)) {}            // NOLINT(google-explicit-constructor)
  Scalar(long long v);                                // NOLINT(google-explicit-constructor)
  Scalar(mpq_class v);                                // NOLINT(google-explicit-constructor)
  explicit Scalar(double v) : value_(v) {}

  static Scalar ratio(long long num, long long den);
  static Scalar zero(ScalarKind kind);
  static Scalar one(ScalarKind kind);
  /// Value `v` expressed in the given mode (exact conversion for rationals).
  static Scalar from_double(double v, ScalarKind kind);
  static Scalar from_int(long long v, ScalarKind kind);
  /// 2^e, exact in rational mode.
  static Scalar pow2(int e, ScalarKind kind);

  ScalarKind kind() const { return std::holds_alternative<mpq_class>(value_) ? ScalarKind::Rational : ScalarKind::Float; }
  bool is_rational() const { return kind() == ScalarKind::Rational; }

  const mpq_class& rational() const;
  double to_double() const;

  /// Exact zero test in rational mode; |x| <= tau in float mode.
  bool is_zero(double tau = kDefaultTolerance) const;
  int sign() const;

  Scalar abs() const;
  Scalar operator-() const;

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  /// Throws std::domain_error on division by an exact zero.
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b);
  friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b);

  /// Canonical text: "p/q" (q > 0, lowest terms) or shortest round-trip decimal.
  std::string str() const;
  static Scalar parse(std::string_view text, ScalarKind kind);

 private:
  std::variant<mpq_class, double> value_;
};

Scalar max(const Scalar& a, const Scalar& b);
Scalar min(const Scalar& a, const Scalar& b);
std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace opbench
