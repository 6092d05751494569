#include "opbench/scalar.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include "opbench/error.hpp"

namespace opbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPBounded: return "NOT_P_BOUNDED";
    case ErrorCode::NotInSpan: return "NOT_IN_SPAN";
    case ErrorCode::NoSeparation: return "NO_SEPARATION";
    case ErrorCode::BudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::Singular: return "SINGULAR";
    case ErrorCode::Exhausted: return "EXHAUSTED";
    case ErrorCode::NotANet: return "NOT_A_NET";
    case ErrorCode::KernelCollision: return "KERNEL_COLLISION";
    case ErrorCode::NoApproximant: return "NO_APPROXIMANT";
    case ErrorCode::NotNested: return "NOT_NESTED";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::ModeMismatch: return "MODE_MISMATCH";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::Schema: return "SCHEMA";
  }
  return "UNKNOWN";
}

namespace {

[[noreturn]] void mismatch() { throw Error(ErrorCode::ModeMismatch, "rational and float scalars mixed"); }

mpq_class canonical(mpq_class q) {
  q.canonicalize();
  return q;
}

}  // namespace

// long is 64-bit on every supported target, so the narrowing below is lossless.
static_assert(sizeof(long) == sizeof(long long));
Scalar::Scalar(long long v) : value_(mpq_class(static_cast<long>(v))) {}

Scalar::Scalar(mpq_class v) : value_(canonical(std::move(v))) {}

Scalar Scalar::ratio(long long num, long long den) {
  if (den == 0) throw std::domain_error("zero denominator");
  mpq_class q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
  return Scalar(std::move(q));
}

Scalar Scalar::zero(ScalarKind kind) { return kind == ScalarKind::Rational ? Scalar(0) : Scalar(0.0); }
Scalar Scalar::one(ScalarKind kind) { return kind == ScalarKind::Rational ? Scalar(1) : Scalar(1.0); }

Scalar Scalar::from_double(double v, ScalarKind kind) {
  if (kind == ScalarKind::Float) return Scalar(v);
  if (!std::isfinite(v)) throw std::domain_error("non-finite value has no rational form");
  return Scalar(mpq_class(v));
}

Scalar Scalar::from_int(long long v, ScalarKind kind) {
  return kind == ScalarKind::Rational ? Scalar(v) : Scalar(static_cast<double>(v));
}

Scalar Scalar::pow2(int e, ScalarKind kind) {
  if (kind == ScalarKind::Float) return Scalar(std::ldexp(1.0, e));
  mpz_class p = 1;
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
  return e >= 0 ? Scalar(mpq_class(p)) : Scalar(mpq_class(mpz_class(1), p));
}

const mpq_class& Scalar::rational() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return *q;
  throw Error(ErrorCode::ModeMismatch, "float scalar has no exact rational value");
}

double Scalar::to_double() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return q->get_d();
  return std::get<double>(value_);
}

bool Scalar::is_zero(double tau) const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return sgn(*q) == 0;
  return std::fabs(std::get<double>(value_)) <= tau;
}

int Scalar::sign() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return sgn(*q);
  const double d = std::get<double>(value_);
  return (d > 0) - (d < 0);
}

Scalar Scalar::abs() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return Scalar(mpq_class(::abs(*q)));
  return Scalar(std::fabs(std::get<double>(value_)));
}

Scalar Scalar::operator-() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) return Scalar(mpq_class(-*q));
  return Scalar(-std::get<double>(value_));
}

Scalar& Scalar::operator+=(const Scalar& o) {
  if (value_.index() != o.value_.index()) mismatch();
  if (auto* q = std::get_if<mpq_class>(&value_)) {
    *q += std::get<mpq_class>(o.value_);
  } else {
    std::get<double>(value_) += std::get<double>(o.value_);
  }
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  if (value_.index() != o.value_.index()) mismatch();
  if (auto* q = std::get_if<mpq_class>(&value_)) {
    *q -= std::get<mpq_class>(o.value_);
  } else {
    std::get<double>(value_) -= std::get<double>(o.value_);
  }
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (value_.index() != o.value_.index()) mismatch();
  if (auto* q = std::get_if<mpq_class>(&value_)) {
    *q *= std::get<mpq_class>(o.value_);
  } else {
    std::get<double>(value_) *= std::get<double>(o.value_);
  }
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (value_.index() != o.value_.index()) mismatch();
  if (auto* q = std::get_if<mpq_class>(&value_)) {
    const auto& d = std::get<mpq_class>(o.value_);
    if (sgn(d) == 0) throw std::domain_error("division by zero");
    *q /= d;
  } else {
    std::get<double>(value_) /= std::get<double>(o.value_);
  }
  return *this;
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.value_.index() != b.value_.index()) mismatch();
  if (const auto* q = std::get_if<mpq_class>(&a.value_)) return *q == std::get<mpq_class>(b.value_);
  return std::get<double>(a.value_) == std::get<double>(b.value_);
}

std::partial_ordering operator<=>(const Scalar& a, const Scalar& b) {
  if (a.value_.index() != b.value_.index()) mismatch();
  if (const auto* q = std::get_if<mpq_class>(&a.value_)) {
    const int c = cmp(*q, std::get<mpq_class>(b.value_));
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  return std::get<double>(a.value_) <=> std::get<double>(b.value_);
}

std::string Scalar::str() const {
  if (const auto* q = std::get_if<mpq_class>(&value_)) {
    return q->get_num().get_str() + "/" + q->get_den().get_str();
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), std::get<double>(value_));
  return std::string(buf, res.ptr);
}

namespace {

// Accepts "p/q", "p", and plain decimals ("-0.125", "3e-2") exactly.
mpq_class parse_rational(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw Error(ErrorCode::Schema, "empty scalar");
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    mpz_class num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0 || den == 0) {
      throw Error(ErrorCode::Schema, "malformed rational '" + s + "'");
    }
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
  std::string mant = s;
  long exp10 = 0;
  if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
    mant = s.substr(0, e);
    try {
      exp10 = std::stol(s.substr(e + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Schema, "malformed exponent in '" + s + "'");
    }
  }
  if (const auto dot = mant.find('.'); dot != std::string::npos) {
    exp10 -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (!mant.empty() && mant[0] == '+') mant.erase(0, 1);
  mpz_class num;
  if (mant.empty() || mant == "-" || num.set_str(mant, 10) != 0) {
    throw Error(ErrorCode::Schema, "malformed scalar '" + s + "'");
  }
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  mpq_class q = exp10 >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
  q.canonicalize();
  return q;
}

}  // namespace

Scalar Scalar::parse(std::string_view text, ScalarKind kind) {
  if (kind == ScalarKind::Rational) return Scalar(parse_rational(text));
  if (text.find('/') != std::string_view::npos) return Scalar(parse_rational(text).get_d());
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::Schema, "malformed float '" + std::string(text) + "'");
  }
  return Scalar(v);
}

Scalar max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }
Scalar min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

}  // namespace opbench
