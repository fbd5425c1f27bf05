#pragma once

// The two worked problems over Q_3(sqrt 3):
//   ex1: z -> alpha z on B_{1/9}(0) and z -> beta z (z - 3) + z on B_{1/9}(3)
//   ex2: 3z, (z + 6)/3, z on B_{1/9}(0), B_{1/9}(3), B_{1/9}(6), eps = 1/27

#include "nadyn/dynamics.hpp"
#include "nadyn/io.hpp"

namespace nadyn {

namespace detail {

/// Adds a witness D_r(a) to the census when the local map certifiably has a
/// fixed point of the same kind as its multiplier there.
inline void add_local_witness(FixedPointCensus& census, const LocalModel& model, std::size_t index,
                              const KElement& fixed_point) {
  const Ball disk = Ball(fixed_point, model.domain.radius(), BallKind::Open);
  const FixedPointKind kind = classify_multiplier(multiplier(model.map, fixed_point));
  const DiskBehavior local = classify_disk(model.map, disk);
  bool matches = false;
  switch (kind) {
    case FixedPointKind::Attracting: matches = local.kind == DiskBehaviorKind::Attracting; break;
    case FixedPointKind::Repelling: matches = local.kind == DiskBehaviorKind::Repelling; break;
    case FixedPointKind::Indifferent:
      matches = local.kind == DiskBehaviorKind::IndifferentBijective && local.existence_certified;
      break;
  }
  if (!matches) return;
  census.witnesses.push_back({index, disk, kind});
  CensusCount& c = census.counts[index];
  switch (kind) {
    case FixedPointKind::Attracting: ++c.attracting; break;
    case FixedPointKind::Repelling: ++c.repelling; break;
    case FixedPointKind::Indifferent: ++c.indifferent; break;
  }
}

}  // namespace detail

inline io::ProblemSpec example2_problem() {
  const FieldConfig F3(3);
  auto k = [&](long v) { return KElement(F3, v); };
  std::vector<LocalModel> models{
      {RationalMap::from_poly(Poly(F3, {0, 3})), Ball::closed(k(0), 2), Ball::closed(k(0), 3)},
      {RationalMap::from_poly(Poly(F3, {6, 1}) * KElement(F3, Rational(1, 3))), Ball::closed(k(3), 2),
       Ball::closed(k(3), 1)},
      {RationalMap(F3), Ball::closed(k(6), 2), Ball::closed(k(6), 2)},
  };
  io::ProblemSpec spec{F3, Radius(3), std::move(models), {}, std::nullopt, {}};
  FixedPointCensus census;
  census.counts.resize(3);
  detail::add_local_witness(census, spec.models[0], 0, k(0));
  detail::add_local_witness(census, spec.models[1], 1, k(3));
  spec.census = std::move(census);
  spec.orbits.push_back({k(9), 10});
  return spec;
}

/// Needs |alpha| <= 3 so that alpha z maps B_{1/9}(3) into the unit ball.
inline io::ProblemSpec example1_problem(const Rational& alpha, const Rational& beta) {
  const FieldConfig F3(3);
  auto k = [&](const Rational& v) { return KElement(F3, v); };
  // beta z (z - 3) + z = beta z^2 + (1 - 3 beta) z
  const Poly f2(F3, {k(0), k(1 - 3 * beta), k(beta)});
  std::vector<LocalModel> models{
      {RationalMap::from_poly(Poly(F3, {k(0), k(alpha)})), Ball::closed(k(0), 2), std::nullopt},
      {RationalMap::from_poly(f2), Ball::closed(k(3), 2), std::nullopt},
  };
  // eps must also stay below 1/|1 - 3 beta|
  Rational eps_exp = 3;
  const ValExp v = k(1 - 3 * beta).valuation();
  if (v.is_finite()) eps_exp = std::max(eps_exp, Rational(1 - v.value()));
  io::ProblemSpec spec{F3, Radius(eps_exp), std::move(models), {}, std::nullopt, {}};
  FixedPointCensus census;
  census.counts.resize(2);
  if (alpha != 0) detail::add_local_witness(census, spec.models[0], 0, k(0));
  if (3 * beta + 1 != 0) detail::add_local_witness(census, spec.models[1], 1, k(3));
  spec.census = std::move(census);
  return spec;
}

/// alpha + (1 - 3 beta) / (1 - (-3 / c_2)^{M_2}).
inline KElement example1_derivative_closed_form(const Rational& alpha, const Rational& beta, const KElement& c2,
                                                long M2) {
  const FieldConfig& field = c2.field();
  const KElement one(field, 1);
  const KElement ratio = KElement(field, -3) / c2;
  return KElement(field, alpha) + KElement(field, 1 - 3 * beta) / (one - ratio.pow(static_cast<unsigned long>(M2)));
}

}  // namespace nadyn
