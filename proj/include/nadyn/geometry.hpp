#pragma once

// Images of balls under rational maps, sup-norms, Weierstrass degrees and
// K-rational sample points.
//
// On a ball B free of poles of f = P/Q, |Q| is constant (every root of Q lies
// outside B), so
//   f(z) - f(a) = g(z) / (Q(z) Q(a)),   g(z) = P(z) Q(a) - P(a) Q(z)
// and the image of B is the ball around f(a) whose radius is the Gauss norm
// of g (terms of degree >= 1 after recentering at a) divided by |Q(a)|^2.

#include <span>
#include <vector>

#include "nadyn/algebra.hpp"
#include "nadyn/ball.hpp"
#include "nadyn/error.hpp"
#include "nadyn/field.hpp"

namespace nadyn {

/// valuation(a - b); +inf iff a = b.
inline ValExp distance_exp(const KElement& a, const KElement& b) { return (a - b).valuation(); }

/// delta_i = min_{j != i} |a_i - a_j|.
inline std::vector<Radius> pairwise_deltas(std::span<const KElement> centers) {
  if (centers.size() < 2) throw DomainError("pairwise_deltas needs at least two centers");
  std::vector<Radius> out;
  out.reserve(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    ValExp worst;
    bool first = true;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (i == j) continue;
      const ValExp d = distance_exp(centers[i], centers[j]);
      if (d.is_infinite()) {
        throw DomainError("duplicate centers at indices " + std::to_string(i) + " and " + std::to_string(j));
      }
      // the smallest distance has the largest exponent
      worst = first ? d : max(worst, d);
      first = false;
    }
    out.emplace_back(worst);
  }
  return out;
}

inline bool pole_free_on_ball(const RationalMap& f, const Ball& ball) {
  return f.is_polynomial() || count_roots_in_ball(f.den(), ball) == 0;
}

namespace detail {

inline void require_pole_free(const RationalMap& f, const Ball& ball, const char* what) {
  if (!pole_free_on_ball(f, ball)) {
    throw DomainError(std::string(what) + ": map has a pole in " + ball.to_string());
  }
}

}  // namespace detail

/// Exponent of sup_{z in B} |f(z)| over C_p.
inline ValExp sup_norm_exp_on_ball(const RationalMap& f, const Ball& ball) {
  detail::require_pole_free(f, ball, "sup_norm_exp_on_ball");
  const KElement& a = ball.center();
  return gauss_norm_exp(taylor_recenter(f.num(), a), ball.radius(), 0) - f.den()(a).valuation();
}

/// Exact image f(B) over C_p; same kind as B.
inline Ball image_of_ball(const RationalMap& f, const Ball& ball) {
  detail::require_pole_free(f, ball, "image_of_ball");
  const KElement& a = ball.center();
  const KElement qa = f.den()(a);
  const KElement pa = f.num()(a);
  const Poly g = f.num() * qa - f.den() * pa;
  const ValExp spread = gauss_norm_exp(taylor_recenter(g, a), ball.radius(), 1);
  if (spread.is_infinite()) throw DomainError("image_of_ball: constant map has a one-point image");
  return Ball(pa / qa, Radius(spread - ValExp(Rational(2) * qa.valuation().value())), ball.kind());
}

/// Solutions of f(z) = b in B, with multiplicity.
inline long wdeg(const RationalMap& f, const KElement& b, const Ball& ball) {
  const Ball image = image_of_ball(f, ball);
  if (!image.contains(b)) {
    throw DomainError("wdeg: " + b.to_string() + " is outside the image " + image.to_string());
  }
  return count_roots_in_ball(f.num() - f.den() * b, ball);
}

/// Deterministic K-rational points of B: the center, then center + u p^j for
/// u = 1..p-1, shell by shell with j = e_r, e_r + 1, ... (closed) or
/// j = e_r + 1/2, e_r + 3/2, ... (open). Half-integral j use sqrt(p).
inline std::vector<KElement> sample_points(const Ball& ball, std::size_t budget) {
  if (budget == 0) throw DomainError("sample_points: budget must be at least 1");
  std::vector<KElement> out;
  out.reserve(budget);
  out.push_back(ball.center());
  const FieldConfig field = ball.field();
  Rational j = ball.radius_exp();
  if (!ball.is_closed()) j += Rational(1, 2);
  const long p = static_cast<long>(field.prime());
  while (out.size() < budget) {
    const KElement step = uniformizer_power(field, ValExp(j));
    for (long u = 1; u < p && out.size() < budget; ++u) {
      out.push_back(ball.center() + step * Rational(u));
    }
    j += 1;
  }
  return out;
}

}  // namespace nadyn
