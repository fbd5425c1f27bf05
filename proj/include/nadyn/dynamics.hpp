#pragma once

// Fixed points of glued maps: multipliers, disk classification by the
// attracting / repelling / indifferent trichotomy for open disks, census
// verification, Newton-Hensel refinement and pointwise orbits.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nadyn/algebra.hpp"
#include "nadyn/ball.hpp"
#include "nadyn/error.hpp"
#include "nadyn/field.hpp"
#include "nadyn/geometry.hpp"
#include "nadyn/gluing.hpp"

namespace nadyn {

enum class FixedPointKind { Attracting, Repelling, Indifferent };

inline const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::Attracting: return "attracting";
    case FixedPointKind::Repelling: return "repelling";
    case FixedPointKind::Indifferent: return "indifferent";
  }
  return "?";
}

/// |lambda| < 1, > 1 or = 1.
inline FixedPointKind classify_multiplier(const KElement& lambda) {
  const ValExp v = lambda.valuation();
  if (v > ValExp(0)) return FixedPointKind::Attracting;
  if (v < ValExp(0)) return FixedPointKind::Repelling;
  return FixedPointKind::Indifferent;
}

/// f'(x) at a fixed point x.
inline KElement multiplier(const RationalMap& f, const KElement& x) {
  const auto fx = f(x);
  if (!fx || !(*fx == x)) throw DomainError("multiplier: " + x.to_string() + " is not a fixed point");
  return *derivative_at(f, x);
}

enum class DiskBehaviorKind { Attracting, Repelling, IndifferentBijective, Inconclusive };

inline const char* to_string(DiskBehaviorKind k) {
  switch (k) {
    case DiskBehaviorKind::Attracting: return "attracting";
    case DiskBehaviorKind::Repelling: return "repelling";
    case DiskBehaviorKind::IndifferentBijective: return "indifferent-bijective";
    case DiskBehaviorKind::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct DiskBehavior {
  DiskBehaviorKind kind = DiskBehaviorKind::Inconclusive;
  std::optional<Ball> image;
  /// Weierstrass degree of F on U (preimages of F(a)).
  long wdeg = 0;
  std::optional<KElement> derivative_at_center;
  /// A fixed point in U is guaranteed (always for attracting/repelling; for
  /// the bijective case only when |F'(a) - 1| = 1).
  bool existence_certified = false;
  std::string reason;
};

/// Classifies the open disk U = D_r(a) under F:
///   F(U) strictly inside U, or onto with wdeg >= 2  -> Attracting
///   F(U) strictly contains U with wdeg 1             -> Repelling
///   F(U) = U with wdeg 1                             -> IndifferentBijective
/// and Inconclusive otherwise.
inline DiskBehavior classify_disk(const RationalMap& F, const Ball& U) {
  if (U.is_closed()) throw DomainError("classify_disk: U must be an open disk");
  if (!pole_free_on_ball(F, U)) throw DomainError("classify_disk: map has a pole in " + U.to_string());
  DiskBehavior out;
  const Ball image = image_of_ball(F, U);
  out.image = image;
  out.wdeg = count_roots_in_ball(F.num() - F.den() * image.center(), U);
  out.derivative_at_center = derivative_at(F, U.center());

  if (!image.intersects(U)) {
    out.reason = "image is disjoint from the disk";
    return out;
  }
  const bool equal = image == U;
  if (equal) {
    if (out.wdeg >= 2) {
      out.kind = DiskBehaviorKind::Attracting;
      out.existence_certified = true;
      out.reason = "onto itself with wdeg >= 2";
    } else {
      out.kind = DiskBehaviorKind::IndifferentBijective;
      const KElement one(U.field(), 1);
      out.existence_certified = (*out.derivative_at_center - one).valuation() == ValExp(0);
      out.reason = out.existence_certified ? "bijective onto itself, |F'(a) - 1| = 1"
                                           : "indifferent-if-exists: bijective onto itself, |F'(a) - 1| < 1";
    }
  } else if (U.contains(image)) {
    out.kind = DiskBehaviorKind::Attracting;
    out.existence_certified = true;
    out.reason = "image strictly inside the disk";
  } else if (out.wdeg == 1) {
    out.kind = DiskBehaviorKind::Repelling;
    out.existence_certified = true;
    out.reason = "image strictly contains the disk, wdeg 1";
  } else {
    out.reason = "image strictly contains the disk with wdeg " + std::to_string(out.wdeg);
  }
  return out;
}

struct WitnessDisk {
  std::size_t ball_index = 0;
  Ball disk;
  FixedPointKind expected;
};

struct CensusCount {
  long attracting = 0;
  long repelling = 0;
  long indifferent = 0;

  friend bool operator==(const CensusCount&, const CensusCount&) = default;
};

/// Expected fixed-point counts per model ball plus one witness disk per
/// fixed point of the local model.
struct FixedPointCensus {
  std::vector<CensusCount> counts;
  std::vector<WitnessDisk> witnesses;
};

struct CensusEntryReport {
  WitnessDisk witness;
  std::optional<DiskBehavior> behavior;
  bool ok = false;
  std::string message;
};

struct CensusReport {
  std::vector<CensusEntryReport> entries;
  std::vector<CensusCount> observed;
  std::vector<std::string> mismatches;

  bool passed() const { return mismatches.empty(); }
};

inline CensusReport verify_census(const RationalMap& F, std::span<const LocalModel> models,
                                  const FixedPointCensus& census) {
  CensusReport report;
  report.observed.resize(models.size());
  if (census.counts.size() != models.size()) {
    report.mismatches.push_back("census has " + std::to_string(census.counts.size()) + " count entries for " +
                                std::to_string(models.size()) + " balls");
  }
  for (std::size_t w = 0; w < census.witnesses.size(); ++w) {
    const WitnessDisk& wd = census.witnesses[w];
    CensusEntryReport entry{wd, std::nullopt, false, {}};
    const std::string tag = "witness " + std::to_string(w) + ": ";
    if (wd.ball_index >= models.size()) {
      entry.message = "ball index out of range";
    } else if (wd.disk.is_closed()) {
      entry.message = "witness must be an open disk";
    } else if (!models[wd.ball_index].domain.contains(wd.disk)) {
      entry.message = "witness disk is not inside its ball";
    } else {
      for (std::size_t v = 0; v < w; ++v) {
        if (census.witnesses[v].disk.intersects(wd.disk)) entry.message = "overlaps witness " + std::to_string(v);
      }
    }
    if (entry.message.empty()) {
      try {
        entry.behavior = classify_disk(F, wd.disk);
        const DiskBehavior& b = *entry.behavior;
        switch (wd.expected) {
          case FixedPointKind::Attracting:
            entry.ok = b.kind == DiskBehaviorKind::Attracting;
            break;
          case FixedPointKind::Repelling:
            entry.ok = b.kind == DiskBehaviorKind::Repelling;
            break;
          case FixedPointKind::Indifferent:
            entry.ok = b.kind == DiskBehaviorKind::IndifferentBijective && b.existence_certified &&
                       check_c3_hypotheses(models, wd.ball_index, wd.disk.center());
            break;
        }
        entry.message = entry.ok ? std::string("classified ") + to_string(b.kind)
                                 : std::string("expected ") + to_string(wd.expected) + ", got " + to_string(b.kind) +
                                       (b.existence_certified ? "" : " (existence not certified)");
      } catch (const Error& e) {
        entry.message = e.what();
      }
    }
    if (entry.ok) {
      CensusCount& c = report.observed[wd.ball_index];
      switch (wd.expected) {
        case FixedPointKind::Attracting: ++c.attracting; break;
        case FixedPointKind::Repelling: ++c.repelling; break;
        case FixedPointKind::Indifferent: ++c.indifferent; break;
      }
    } else {
      report.mismatches.push_back(tag + entry.message);
    }
    report.entries.push_back(std::move(entry));
  }
  for (std::size_t i = 0; i < std::min(models.size(), census.counts.size()); ++i) {
    const CensusCount& want = census.counts[i];
    const CensusCount& got = report.observed[i];
    if (!(want == got)) {
      report.mismatches.push_back("ball " + std::to_string(i) + ": expected (" + std::to_string(want.attracting) +
                                  ", " + std::to_string(want.repelling) + ", " + std::to_string(want.indifferent) +
                                  ") attracting/repelling/indifferent, verified (" + std::to_string(got.attracting) +
                                  ", " + std::to_string(got.repelling) + ", " + std::to_string(got.indifferent) + ")");
    }
  }
  return report;
}

/// An epsilon small enough for every witness to be inherited by F: below 1,
/// each f_i-image radius of a witness disk, every delta_i and every
/// indifferent witness radius, and (with indifferent witnesses) small enough
/// that every M_i exceeds 1. The result is one step of p below the binding
/// bound.
inline Radius census_epsilon(std::span<const LocalModel> models, const FixedPointCensus& census,
                             const PlanOptions& options = {}) {
  Rational bound = 0;  // exponent; epsilon must have a strictly larger one
  bool indifferent = false;
  for (const auto& wd : census.witnesses) {
    if (wd.ball_index >= models.size()) throw DomainError("census_epsilon: ball index out of range");
    bound = std::max(bound, image_of_ball(models[wd.ball_index].map, wd.disk).radius_exp());
    if (wd.expected == FixedPointKind::Indifferent) {
      indifferent = true;
      bound = std::max(bound, wd.disk.radius_exp());
    }
  }
  Rational eps_exp = floor_rational(bound) + 1;
  const GluingPlan first = plan_gluing(models, Radius(eps_exp), options);
  for (const auto& e : first.entries) eps_exp = std::max(eps_exp, Rational(floor_rational(e.delta.exp_value()) + 1));
  if (indifferent) {
    for (;;) {
      const GluingPlan plan = plan_gluing(models, Radius(eps_exp), options);
      bool all_above_one = true;
      for (const auto& e : plan.entries) all_above_one = all_above_one && e.M > 1;
      if (all_above_one) break;
      eps_exp += 1;
    }
  }
  return Radius(eps_exp);
}

namespace detail {

struct FixedPointResidual {
  KElement g;   // F(z) - z
  KElement dg;  // F'(z) - 1
};

inline FixedPointResidual fixed_point_residual(const RationalMap& F, const KElement& z) {
  const KElement q = F.den()(z);
  if (q.is_zero()) throw DomainError("hensel_fixed_point: iterate hit a pole");
  const KElement p = F.num()(z);
  const KElement dp = F.num().derivative()(z);
  const KElement dq = F.den().derivative()(z);
  const KElement one(z.field(), 1);
  return {p / q - z, (dp * q - p * dq) / (q * q) - one};
}

}  // namespace detail

/// Newton iteration z <- z - G(z)/G'(z) for G(z) = F(z) - z, started where
/// v(G) > 2 v(G'), until v(G(z)) >= target. Iterates are rounded p-adically
/// to a fixed working precision so their height stays bounded.
inline KElement hensel_fixed_point(const RationalMap& F, const KElement& start, const ValExp& target) {
  if (target.is_infinite()) throw DomainError("hensel_fixed_point: target must be finite");
  auto r = detail::fixed_point_residual(F, start);
  if (r.dg.is_zero()) throw DomainError("hensel_fixed_point: G'(start) = 0");
  if (r.g.is_zero()) return start;
  const ValExp dv = r.dg.valuation();
  if (!(r.g.valuation() > dv * Rational(2))) {
    throw DomainError("hensel_fixed_point: Hensel condition v(G) > 2 v(G') fails at " + start.to_string());
  }
  const Rational precision = target.value() + 2 + abs(dv.value());
  KElement z = start;
  for (int iter = 0; iter < 200; ++iter) {
    if (r.g.valuation() >= target) return z;
    if (r.dg.is_zero()) throw DomainError("hensel_fixed_point: derivative vanished");
    z = truncate(z - r.g / r.dg, precision);
    r = detail::fixed_point_residual(F, z);
  }
  throw DomainError("hensel_fixed_point: no convergence within 200 steps");
}

struct OrbitStep {
  KElement point;
  /// valuation(z_k - reference), when a reference is given
  std::optional<ValExp> distance_exp;
};

struct Orbit {
  std::vector<OrbitStep> steps;
  bool hit_pole = false;
};

/// z_0, F(z_0), ..., up to `steps` applications of F. With a working
/// precision, every iterate is rounded p-adically to it; distances are then
/// exact while they stay below the precision. A pole ends the orbit.
inline Orbit orbit(const RationalMap& F, const KElement& z0, std::size_t steps,
                   const std::optional<KElement>& reference = std::nullopt,
                   const std::optional<Rational>& precision = std::nullopt) {
  Orbit out;
  auto record = [&](const KElement& z) {
    std::optional<ValExp> d;
    if (reference) d = (z - *reference).valuation();
    out.steps.push_back({z, d});
  };
  KElement z = z0;
  record(z);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto next = F(z);
    if (!next) {
      out.hit_pole = true;
      break;
    }
    z = precision ? truncate(*next, *precision) : *next;
    record(z);
  }
  return out;
}

}  // namespace nadyn
