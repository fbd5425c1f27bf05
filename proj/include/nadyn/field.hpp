#pragma once

// Exact arithmetic in K = Q(sqrt p), viewed inside C_p, with its p-adic
// valuation. The value group of K is p^(Z/2); sqrt p is a uniformizer.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "nadyn/error.hpp"

namespace nadyn {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parse "num/den" or "num" into a canonical rational.
inline Rational parse_rational(const std::string& text) {
  Rational q;
  if (text.empty() || q.set_str(text, 10) != 0) {
    throw ParseError("not a rational number: '" + text + "'");
  }
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

/// Always "num/den", also for integers, so files are uniform.
inline std::string rational_to_string(Rational q) {
  q.canonicalize();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Integer floor_rational(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

inline Integer ceil_rational(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

/// v_p(n) for n != 0.
inline long integer_valuation(const Integer& n, unsigned long p) {
  if (n == 0) throw DomainError("valuation of zero integer");
  Integer rest = n;
  Integer prime = p;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), prime.get_mpz_t()));
}

/// v_p(q) for q != 0.
inline long rational_valuation(const Rational& q, unsigned long p) {
  return integer_valuation(q.get_num(), p) - integer_valuation(q.get_den(), p);
}

/// A valuation exponent: an element of (1/2)Z, or +infinity (the valuation
/// of zero). |x| = p^(-v(x)), so a larger exponent means a smaller size.
class ValExp {
 public:
  ValExp() = default;
  ValExp(const Rational& e) : value_(e) { value_.canonicalize(); }  // NOLINT(google-explicit-constructor)
  ValExp(long e) : value_(e) {}  // NOLINT(google-explicit-constructor)

  static ValExp infinity() {
    ValExp out;
    out.infinite_ = true;
    return out;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  const Rational& value() const {
    if (infinite_) throw DomainError("infinite valuation has no finite value");
    return value_;
  }

  bool is_integral() const { return !infinite_ && value_.get_den() == 1; }
  bool is_half_integral() const {
    return !infinite_ && (value_.get_den() == 1 || value_.get_den() == 2);
  }

  friend ValExp operator+(const ValExp& x, const ValExp& y) {
    if (x.infinite_ || y.infinite_) return infinity();
    return ValExp(Rational(x.value_ + y.value_));
  }

  friend ValExp operator-(const ValExp& x, const ValExp& y) {
    if (y.infinite_) throw DomainError("cannot subtract an infinite valuation");
    if (x.infinite_) return infinity();
    return ValExp(Rational(x.value_ - y.value_));
  }

  ValExp operator-() const {
    if (infinite_) throw DomainError("cannot negate an infinite valuation");
    return ValExp(Rational(-value_));
  }

  friend ValExp operator*(const ValExp& x, const Rational& k) {
    if (x.infinite_) {
      if (k <= 0) throw DomainError("infinite valuation scaled by non-positive factor");
      return infinity();
    }
    return ValExp(Rational(x.value_ * k));
  }
  friend ValExp operator*(const Rational& k, const ValExp& x) { return x * k; }

  friend bool operator==(const ValExp& x, const ValExp& y) {
    if (x.infinite_ || y.infinite_) return x.infinite_ == y.infinite_;
    return x.value_ == y.value_;
  }

  friend std::strong_ordering operator<=>(const ValExp& x, const ValExp& y) {
    if (x.infinite_ || y.infinite_) {
      return static_cast<int>(x.infinite_) <=> static_cast<int>(y.infinite_);
    }
    const int c = cmp(x.value_, y.value_);
    return c <=> 0;
  }

  /// "num/den" or "inf".
  std::string to_string() const { return infinite_ ? "inf" : rational_to_string(value_); }

  friend std::ostream& operator<<(std::ostream& os, const ValExp& v) {
    if (v.infinite_) return os << "inf";
    return os << v.value_;
  }

 private:
  bool infinite_ = false;
  Rational value_ = 0;
};

inline ValExp min(const ValExp& x, const ValExp& y) { return y < x ? y : x; }
inline ValExp max(const ValExp& x, const ValExp& y) { return x < y ? y : x; }

/// The prime p selecting C_p. Validated on construction.
class FieldConfig {
 public:
  explicit FieldConfig(unsigned long p) : p_(p) {
    if (p < 2 || mpz_probab_prime_p(Integer(p).get_mpz_t(), 30) == 0) {
      throw DomainError("p = " + std::to_string(p) + " is not prime");
    }
  }

  unsigned long prime() const { return p_; }

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;

 private:
  unsigned long p_;
};

/// a + b*sqrt(p) with exact rational coordinates.
class KElement {
 public:
  explicit KElement(FieldConfig field, Rational a = 0, Rational b = 0)
      : field_(field), a_(std::move(a)), b_(std::move(b)) {
    a_.canonicalize();
    b_.canonicalize();
  }
  KElement(FieldConfig field, long a) : KElement(field, Rational(a)) {}

  static KElement sqrt_p(FieldConfig field) { return KElement(field, 0, 1); }

  const FieldConfig& field() const { return field_; }
  unsigned long prime() const { return field_.prime(); }
  const Rational& rational_part() const { return a_; }
  const Rational& sqrt_part() const { return b_; }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }

  /// min(v_p(a), v_p(b) + 1/2); the two candidates never tie.
  ValExp valuation() const {
    if (is_zero()) return ValExp::infinity();
    const unsigned long p = prime();
    if (b_ == 0) return ValExp(rational_valuation(a_, p));
    const Rational vb = Rational(rational_valuation(b_, p)) + Rational(1, 2);
    if (a_ == 0) return ValExp(vb);
    const Rational va = rational_valuation(a_, p);
    return ValExp(va < vb ? va : vb);
  }

  /// a^2 - p b^2, the norm down to Q.
  Rational norm() const { return a_ * a_ - Rational(prime()) * b_ * b_; }

  KElement conjugate() const { return KElement(field_, a_, -b_); }

  KElement operator-() const { return KElement(field_, -a_, -b_); }

  KElement& operator+=(const KElement& y) {
    check_same_field(y);
    a_ += y.a_;
    b_ += y.b_;
    return *this;
  }
  KElement& operator-=(const KElement& y) {
    check_same_field(y);
    a_ -= y.a_;
    b_ -= y.b_;
    return *this;
  }
  KElement& operator*=(const KElement& y) {
    check_same_field(y);
    if (b_ == 0 && y.b_ == 0) {
      a_ *= y.a_;
      return *this;
    }
    Rational a = a_ * y.a_ + Rational(prime()) * b_ * y.b_;
    Rational b = a_ * y.b_ + b_ * y.a_;
    a_ = std::move(a);
    b_ = std::move(b);
    return *this;
  }
  KElement& operator*=(const Rational& q) {
    a_ *= q;
    b_ *= q;
    return *this;
  }
  KElement& operator/=(const KElement& y) {
    check_same_field(y);
    if (y.is_zero()) throw DomainError("division by zero in K");
    if (y.b_ == 0) {
      a_ /= y.a_;
      b_ /= y.a_;
      return *this;
    }
    const Rational n = y.norm();
    *this *= y.conjugate();
    a_ /= n;
    b_ /= n;
    return *this;
  }

  friend KElement operator+(KElement x, const KElement& y) { return x += y; }
  friend KElement operator-(KElement x, const KElement& y) { return x -= y; }
  friend KElement operator*(KElement x, const KElement& y) { return x *= y; }
  friend KElement operator*(KElement x, const Rational& q) { return x *= q; }
  friend KElement operator*(const Rational& q, KElement x) { return x *= q; }
  friend KElement operator/(KElement x, const KElement& y) { return x /= y; }

  KElement inverse() const { return KElement(field_, 1) / *this; }

  KElement pow(unsigned long k) const {
    KElement result(field_, 1);
    KElement base = *this;
    while (k != 0) {
      if (k & 1UL) result *= base;
      k >>= 1;
      if (k != 0) base *= base;
    }
    return result;
  }

  friend bool operator==(const KElement& x, const KElement& y) {
    return x.field_ == y.field_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

  friend std::ostream& operator<<(std::ostream& os, const KElement& x) {
    if (x.b_ == 0) return os << x.a_;
    if (x.a_ == 0) return os << x.b_ << "*sqrt(" << x.prime() << ")";
    return os << "(" << x.a_ << " + " << x.b_ << "*sqrt(" << x.prime() << "))";
  }

  std::string to_string() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

 private:
  void check_same_field(const KElement& y) const {
    if (y.field_ != field_) throw DomainError("elements of different fields");
  }

  FieldConfig field_;
  Rational a_;
  Rational b_;
};

/// (sqrt p)^(2e): p^k for e = k, p^k sqrt(p) for e = k + 1/2.
inline KElement uniformizer_power(FieldConfig field, const ValExp& e) {
  if (!e.is_half_integral()) {
    throw DomainError("exponent " + e.to_string() + " is not in (1/2)Z");
  }
  const Rational& v = e.value();
  const Integer k = floor_rational(v);
  const bool half = v.get_den() == 2;
  Integer pk;
  const Integer p = field.prime();
  mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), Integer(abs(k)).get_ui());
  Rational scale = k >= 0 ? Rational(pk) : Rational(Integer(1), pk);
  scale.canonicalize();
  return half ? KElement(field, 0, scale) : KElement(field, scale);
}

namespace detail {

// Integer representative u*p^m of q modulo p^precision (q != 0).
inline Rational truncate_rational(const Rational& q, unsigned long p, const Integer& precision) {
  if (q == 0) return 0;
  const long m = rational_valuation(q, p);
  if (Integer(m) >= precision) return 0;
  const Integer pz = p;
  Integer num = q.get_num();
  Integer den = q.get_den();
  mpz_remove(num.get_mpz_t(), num.get_mpz_t(), pz.get_mpz_t());
  mpz_remove(den.get_mpz_t(), den.get_mpz_t(), pz.get_mpz_t());
  const Integer digits = precision - m;
  Integer modulus;
  mpz_pow_ui(modulus.get_mpz_t(), pz.get_mpz_t(), digits.get_ui());
  Integer inv;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), modulus.get_mpz_t());
  Integer unit = num * inv;
  mpz_mod(unit.get_mpz_t(), unit.get_mpz_t(), modulus.get_mpz_t());
  // balanced residue keeps small negatives small
  if (2 * unit > modulus) unit -= modulus;
  Integer pm;
  mpz_pow_ui(pm.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(m < 0 ? -m : m));
  Rational out = m >= 0 ? Rational(unit * pm) : Rational(unit, pm);
  out.canonicalize();
  return out;
}

}  // namespace detail

/// An element y of low height with valuation(x - y) >= precision.
inline KElement truncate(const KElement& x, const Rational& precision) {
  const unsigned long p = x.prime();
  const Integer prec_a = ceil_rational(precision);
  const Integer prec_b = ceil_rational(Rational(precision - Rational(1, 2)));
  return KElement(x.field(), detail::truncate_rational(x.rational_part(), p, prec_a),
                  detail::truncate_rational(x.sqrt_part(), p, prec_b));
}

}  // namespace nadyn
