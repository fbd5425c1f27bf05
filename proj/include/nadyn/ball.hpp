#pragma once

// Radii and balls of C_p with centers in K.

#include <compare>
#include <ostream>
#include <string>

#include "nadyn/error.hpp"
#include "nadyn/field.hpp"

namespace nadyn {

/// A radius p^(-e) with e in (1/2)Z. Ordered as radii: a larger radius has a
/// smaller exponent.
class Radius {
 public:
  explicit Radius(ValExp exponent) : exponent_(std::move(exponent)) {
    if (!exponent_.is_half_integral()) {
      throw DomainError("radius exponent " + exponent_.to_string() + " is not in (1/2)Z");
    }
  }
  explicit Radius(const Rational& exponent) : Radius(ValExp(exponent)) {}
  explicit Radius(long exponent) : Radius(ValExp(exponent)) {}

  const ValExp& exponent() const { return exponent_; }
  const Rational& exp_value() const { return exponent_.value(); }

  friend bool operator==(const Radius&, const Radius&) = default;
  friend std::strong_ordering operator<=>(const Radius& x, const Radius& y) {
    return y.exponent_ <=> x.exponent_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Radius& r) {
    return os << "p^(-" << r.exponent_ << ")";
  }

 private:
  ValExp exponent_;
};

enum class BallKind { Closed, Open };

inline const char* to_string(BallKind kind) { return kind == BallKind::Closed ? "closed" : "open"; }

/// B_r(a) = {|z - a| <= r} (closed) or D_r(a) = {|z - a| < r} (open), as
/// subsets of C_p.
class Ball {
 public:
  Ball(KElement center, Radius radius, BallKind kind = BallKind::Closed)
      : center_(std::move(center)), radius_(std::move(radius)), kind_(kind) {}

  static Ball closed(KElement center, long radius_exp) {
    return Ball(std::move(center), Radius(radius_exp), BallKind::Closed);
  }
  static Ball open(KElement center, long radius_exp) {
    return Ball(std::move(center), Radius(radius_exp), BallKind::Open);
  }

  const KElement& center() const { return center_; }
  const Radius& radius() const { return radius_; }
  const Rational& radius_exp() const { return radius_.exp_value(); }
  BallKind kind() const { return kind_; }
  bool is_closed() const { return kind_ == BallKind::Closed; }
  const FieldConfig& field() const { return center_.field(); }

  /// Whether an element of valuation v (relative to the center) lies inside.
  bool admits_valuation(const ValExp& v) const {
    return is_closed() ? v >= radius_.exponent() : v > radius_.exponent();
  }

  bool contains(const KElement& x) const { return admits_valuation((x - center_).valuation()); }

  /// Set inclusion over C_p. Balls are nested or disjoint, so it suffices to
  /// compare radii and test one center.
  bool contains(const Ball& inner) const {
    if (!contains(inner.center_)) return false;
    if (is_closed() || !inner.is_closed()) return inner.radius_ <= radius_;
    return inner.radius_ < radius_;
  }

  bool intersects(const Ball& other) const {
    return contains(other.center_) || other.contains(center_);
  }

  /// Set equality over C_p (open and closed balls of the same rational
  /// radius differ there).
  friend bool operator==(const Ball& x, const Ball& y) {
    return x.kind_ == y.kind_ && x.radius_ == y.radius_ && x.contains(y.center_);
  }

  Ball with_kind(BallKind kind) const { return Ball(center_, radius_, kind); }

  friend std::ostream& operator<<(std::ostream& os, const Ball& b) {
    return os << (b.is_closed() ? "B" : "D") << "[" << b.radius_ << "](" << b.center_ << ")";
  }

  std::string to_string() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

 private:
  KElement center_;
  Radius radius_;
  BallKind kind_;
};

}  // namespace nadyn
