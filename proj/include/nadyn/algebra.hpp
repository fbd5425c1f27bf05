#pragma once

// Polynomials and rational functions over K, Gauss norms and Newton polygons.

#include <algorithm>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "nadyn/ball.hpp"
#include "nadyn/error.hpp"
#include "nadyn/field.hpp"

namespace nadyn {

/// Dense polynomial; coefficient k multiplies z^k. The zero polynomial has no
/// coefficients and degree -1.
class Poly {
 public:
  explicit Poly(FieldConfig field) : field_(field) {}
  Poly(FieldConfig field, std::vector<KElement> coeffs) : field_(field), coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_) {
      if (c.field() != field_) throw DomainError("coefficient from a different field");
    }
    trim();
  }
  /// Integer coefficients, lowest degree first.
  Poly(FieldConfig field, std::initializer_list<long> coeffs) : field_(field) {
    coeffs_.reserve(coeffs.size());
    for (long c : coeffs) coeffs_.emplace_back(field, c);
    trim();
  }

  static Poly constant(const KElement& c) { return Poly(c.field(), std::vector<KElement>{c}); }
  /// z - a
  static Poly linear_root(const KElement& a) {
    return Poly(a.field(), std::vector<KElement>{-a, KElement(a.field(), 1)});
  }
  static Poly monomial(FieldConfig field, std::size_t k) {
    std::vector<KElement> c(k + 1, KElement(field));
    c[k] = KElement(field, 1);
    return Poly(field, std::move(c));
  }

  const FieldConfig& field() const { return field_; }
  bool is_zero() const { return coeffs_.empty(); }
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  std::span<const KElement> coeffs() const { return coeffs_; }

  KElement coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : KElement(field_); }
  const KElement& leading() const {
    if (is_zero()) throw DomainError("zero polynomial has no leading coefficient");
    return coeffs_.back();
  }

  /// Horner evaluation.
  KElement operator()(const KElement& x) const {
    KElement acc(field_);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc *= x;
      acc += *it;
    }
    return acc;
  }

  Poly derivative() const {
    std::vector<KElement> d;
    if (coeffs_.size() > 1) d.reserve(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * Rational(static_cast<long>(k)));
    return Poly(field_, std::move(d));
  }

  Poly monic() const {
    if (is_zero()) return *this;
    const KElement inv = leading().inverse();
    return *this * inv;
  }

  Poly operator-() const {
    Poly out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }

  Poly& operator+=(const Poly& q) {
    if (coeffs_.size() < q.coeffs_.size()) coeffs_.resize(q.coeffs_.size(), KElement(field_));
    for (std::size_t k = 0; k < q.coeffs_.size(); ++k) coeffs_[k] += q.coeffs_[k];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& q) {
    if (coeffs_.size() < q.coeffs_.size()) coeffs_.resize(q.coeffs_.size(), KElement(field_));
    for (std::size_t k = 0; k < q.coeffs_.size(); ++k) coeffs_[k] -= q.coeffs_[k];
    trim();
    return *this;
  }
  Poly& operator*=(const KElement& c) {
    if (c.is_zero()) {
      coeffs_.clear();
      return *this;
    }
    for (auto& x : coeffs_) x *= c;
    return *this;
  }

  friend Poly operator+(Poly p, const Poly& q) { return p += q; }
  friend Poly operator-(Poly p, const Poly& q) { return p -= q; }
  friend Poly operator*(Poly p, const KElement& c) { return p *= c; }
  friend Poly operator*(const KElement& c, Poly p) { return p *= c; }

  friend Poly operator*(const Poly& p, const Poly& q) {
    if (p.is_zero() || q.is_zero()) return Poly(p.field_);
    std::vector<KElement> out(p.coeffs_.size() + q.coeffs_.size() - 1, KElement(p.field_));
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i) {
      if (p.coeffs_[i].is_zero()) continue;
      for (std::size_t j = 0; j < q.coeffs_.size(); ++j) {
        out[i + j] += p.coeffs_[i] * q.coeffs_[j];
      }
    }
    return Poly(p.field_, std::move(out));
  }

  Poly pow(unsigned long k) const {
    Poly result = Poly::constant(KElement(field_, 1));
    Poly base = *this;
    while (k != 0) {
      if (k & 1UL) result = result * base;
      k >>= 1;
      if (k != 0) base = base * base;
    }
    return result;
  }

  /// Euclidean division: *this = quotient * d + remainder.
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    if (d.is_zero()) throw DomainError("polynomial division by zero");
    Poly rem = *this;
    if (rem.degree() < d.degree()) return {Poly(field_), rem};
    const KElement lead_inv = d.leading().inverse();
    const std::size_t dn = d.coeffs_.size();
    std::vector<KElement> quot(rem.coeffs_.size() - dn + 1, KElement(field_));
    for (std::size_t k = rem.coeffs_.size(); k-- >= dn;) {
      if (rem.coeffs_[k].is_zero()) continue;
      const KElement factor = rem.coeffs_[k] * lead_inv;
      const std::size_t shift = k - (dn - 1);
      quot[shift] = factor;
      for (std::size_t j = 0; j < dn; ++j) rem.coeffs_[shift + j] -= factor * d.coeffs_[j];
      rem.coeffs_[k] = KElement(field_);
    }
    rem.trim();
    return {Poly(field_, std::move(quot)), std::move(rem)};
  }

  friend Poly operator/(const Poly& p, const Poly& d) { return p.divmod(d).first; }
  friend Poly operator%(const Poly& p, const Poly& d) { return p.divmod(d).second; }

  friend bool operator==(const Poly& p, const Poly& q) {
    return p.field_ == q.field_ && p.coeffs_ == q.coeffs_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Poly& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (std::size_t k = p.coeffs_.size(); k-- > 0;) {
      if (p.coeffs_[k].is_zero()) continue;
      if (!first) os << " + ";
      first = false;
      os << p.coeffs_[k];
      if (k >= 1) os << "*z";
      if (k >= 2) os << "^" << k;
    }
    return os;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  }

  FieldConfig field_;
  std::vector<KElement> coeffs_;
};

/// Monic greatest common divisor (zero if both are zero).
inline Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

/// Coefficients g_k with P(z) = sum g_k (z - a)^k.
inline Poly taylor_recenter(const Poly& poly, const KElement& a) {
  std::vector<KElement> c(poly.coeffs().begin(), poly.coeffs().end());
  const std::size_t n = c.size();
  // repeated synthetic division by (z - a)
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t k = n - 1; k-- > i;) c[k] += a * c[k + 1];
  }
  return Poly(poly.field(), std::move(c));
}

/// Exponent of max_{k >= from_k} |c_k| r^k, i.e. min (v(c_k) + k e_r).
inline ValExp gauss_norm_exp(const Poly& poly, const Radius& r, std::size_t from_k = 0) {
  if (from_k > 1) throw DomainError("gauss_norm_exp: from_k must be 0 or 1");
  ValExp best = ValExp::infinity();
  const auto coeffs = poly.coeffs();
  for (std::size_t k = from_k; k < coeffs.size(); ++k) {
    if (coeffs[k].is_zero()) continue;
    best = min(best, coeffs[k].valuation() + ValExp(Rational(r.exp_value() * static_cast<long>(k))));
  }
  return best;
}

struct NewtonSegment {
  Rational slope;
  long length;

  /// Valuation shared by the roots this segment accounts for.
  Rational root_valuation() const { return -slope; }

  friend bool operator==(const NewtonSegment&, const NewtonSegment&) = default;
};

/// Lower convex hull of {(k, v(c_k))}. Roots at z = 0 are tallied in ord0.
struct NewtonPolygon {
  long ord0 = 0;
  std::vector<NewtonSegment> segments;

  long degree() const {
    long total = ord0;
    for (const auto& s : segments) total += s.length;
    return total;
  }

  /// Roots (with multiplicity, over C_p) of valuation >= e, or > e when
  /// strict. Roots at 0 always count.
  long count_roots_with_valuation(const Rational& e, bool strict) const {
    long total = ord0;
    for (const auto& s : segments) {
      const Rational v = s.root_valuation();
      if (strict ? v > e : v >= e) total += s.length;
    }
    return total;
  }
};

inline NewtonPolygon newton_polygon(const Poly& poly) {
  if (poly.is_zero()) throw DomainError("Newton polygon of the zero polynomial");
  const auto coeffs = poly.coeffs();
  struct Point {
    long x;
    Rational y;
  };
  NewtonPolygon out;
  std::vector<Point> hull;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k].is_zero()) continue;
    if (hull.empty()) out.ord0 = static_cast<long>(k);
    Point pt{static_cast<long>(k), coeffs[k].valuation().value()};
    // pop while the last point is on or above the chord to pt
    while (hull.size() >= 2) {
      const Point& o = hull[hull.size() - 2];
      const Point& m = hull.back();
      const Rational cross = Rational(m.x - o.x) * (pt.y - o.y) - (m.y - o.y) * Rational(pt.x - o.x);
      if (cross <= 0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(std::move(pt));
  }
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const long len = hull[i].x - hull[i - 1].x;
    Rational slope = (hull[i].y - hull[i - 1].y) / Rational(len);
    slope.canonicalize();
    out.segments.push_back({std::move(slope), len});
  }
  return out;
}

/// Roots of P (with multiplicity, over C_p) inside the ball.
inline long count_roots_in_ball(const Poly& poly, const Ball& ball) {
  if (poly.is_zero()) throw DomainError("root count of the zero polynomial");
  const NewtonPolygon np = newton_polygon(taylor_recenter(poly, ball.center()));
  return np.count_roots_with_valuation(ball.radius_exp(), !ball.is_closed());
}

/// P/Q with gcd(P, Q) = 1 and Q monic.
class RationalMap {
 public:
  /// Identity map z.
  explicit RationalMap(FieldConfig field)
      : num_(Poly::monomial(field, 1)), den_(Poly::constant(KElement(field, 1))) {}

  static RationalMap from_poly(Poly p) {
    const FieldConfig field = p.field();
    return RationalMap(std::move(p), Poly::constant(KElement(field, 1)), Reduced{});
  }
  static RationalMap constant(const KElement& c) { return from_poly(Poly::constant(c)); }

  /// Divides out gcd(num, den) and makes den monic.
  static RationalMap reduce(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw DomainError("rational map with zero denominator");
    if (num.field() != den.field()) throw DomainError("numerator and denominator over different fields");
    if (num.is_zero()) return constant(KElement(num.field()));
    const Poly g = gcd(num, den);
    Poly n = g.degree() > 0 ? num / g : num;
    Poly d = g.degree() > 0 ? den / g : den;
    return normalized(std::move(n), std::move(d));
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  const FieldConfig& field() const { return num_.field(); }

  long degree() const { return std::max(num_.degree(), den_.degree()); }
  bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }
  bool is_polynomial() const { return den_.degree() == 0; }

  /// Value at x, or nullopt at a pole.
  std::optional<KElement> operator()(const KElement& x) const {
    const KElement q = den_(x);
    if (q.is_zero()) return std::nullopt;
    return num_(x) / q;
  }

  RationalMap derivative() const {
    if (is_polynomial()) return from_poly(num_.derivative());
    // (P'Q - PQ')/Q^2 = (P'(Q/g) - P(Q'/g)) / (Q (Q/g)), g = gcd(Q, Q')
    const Poly dq = den_.derivative();
    const Poly g = gcd(den_, dq);
    const Poly q_red = den_ / g;
    // Q * rad(Q) is already the reduced denominator of f' in characteristic 0
    Poly top = num_.derivative() * q_red - num_ * (dq / g);
    return normalized(std::move(top), den_ * q_red);
  }

  RationalMap operator-() const { return RationalMap(-num_, den_, Reduced{}); }

  friend RationalMap operator+(const RationalMap& f, const RationalMap& g) {
    if (f.is_polynomial() && g.is_polynomial()) return from_poly(f.num_ + g.num_);
    // Henrici: with d = gcd(Q1, Q2) only gcd(top, d) can be nontrivial.
    const Poly d = gcd(f.den_, g.den_);
    if (d.degree() == 0) {
      return normalized(f.num_ * g.den_ + g.num_ * f.den_, f.den_ * g.den_);
    }
    const Poly f_co = f.den_ / d;
    const Poly g_co = g.den_ / d;
    Poly top = f.num_ * g_co + g.num_ * f_co;
    if (top.is_zero()) return constant(KElement(f.field()));
    const Poly e = gcd(top, d);
    if (e.degree() > 0) top = top / e;
    return normalized(std::move(top), f_co * (g.den_ / e));
  }

  friend RationalMap operator-(const RationalMap& f, const RationalMap& g) { return f + (-g); }

  friend RationalMap operator*(const RationalMap& f, const RationalMap& g) {
    if (f.num_.is_zero() || g.num_.is_zero()) return constant(KElement(f.field()));
    const Poly g1 = gcd(f.num_, g.den_);
    const Poly g2 = gcd(g.num_, f.den_);
    Poly n = (f.num_ / g1) * (g.num_ / g2);
    Poly d = (f.den_ / g2) * (g.den_ / g1);
    return normalized(std::move(n), std::move(d));
  }

  /// Exact equality of reduced forms.
  friend bool operator==(const RationalMap& f, const RationalMap& g) {
    return f.num_ == g.num_ && f.den_ == g.den_;
  }

  friend std::ostream& operator<<(std::ostream& os, const RationalMap& f) {
    os << "(" << f.num_ << ")";
    if (!f.is_polynomial() || !(f.den_ == Poly::constant(KElement(f.field(), 1)))) {
      os << " / (" << f.den_ << ")";
    }
    return os;
  }

 private:
  struct Reduced {};
  RationalMap(Poly num, Poly den, Reduced) : num_(std::move(num)), den_(std::move(den)) {}

  static RationalMap normalized(Poly num, Poly den) {
    const KElement lead_inv = den.leading().inverse();
    num *= lead_inv;
    den *= lead_inv;
    return RationalMap(std::move(num), std::move(den), Reduced{});
  }

  Poly num_;
  Poly den_;
};

inline RationalMap ratmap_reduce(const Poly& num, const Poly& den) { return RationalMap::reduce(num, den); }
inline RationalMap ratmap_derivative(const RationalMap& f) { return f.derivative(); }
inline std::optional<KElement> ratmap_eval(const RationalMap& f, const KElement& x) { return f(x); }

/// f'(x) by the quotient rule at a point, without forming f'; nullopt at a pole.
inline std::optional<KElement> derivative_at(const RationalMap& f, const KElement& x) {
  const KElement q = f.den()(x);
  if (q.is_zero()) return std::nullopt;
  const KElement dp = f.num().derivative()(x);
  if (f.is_polynomial()) return dp / q;
  const KElement dq = f.den().derivative()(x);
  return (dp * q - f.num()(x) * dq) / (q * q);
}

enum class CombineOp { Add, Mul };

inline RationalMap ratmap_combine(CombineOp op, const RationalMap& f, const RationalMap& g) {
  return op == CombineOp::Add ? f + g : f * g;
}

}  // namespace nadyn
