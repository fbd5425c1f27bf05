#pragma once

// epsilon-approximation: glue local rational models f_i living on pairwise
// disjoint closed balls B_{r_i}(a_i) into one rational map
//
//   F(z) = sum_i f_i(z) h_i(z),   h_i(z) = 1 / (1 - ((z - a_i)/c_i)^{M_i}),
//
// where |c_i| = s_i = sqrt(r_i delta_i), delta_i is the distance from a_i to
// the nearest other center, and M_i is the least integer with
// (r_i/delta_i)^{M_i/2} < tau = min{t_1, ..., t_n, epsilon}. On B_{r_i}(a_i),
// h_i is within (r_i/delta_i)^{M_i/2} of 1 and every other h_j is at most that
// in size, so F stays within epsilon of f_i and keeps its image ball.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nadyn/algebra.hpp"
#include "nadyn/ball.hpp"
#include "nadyn/error.hpp"
#include "nadyn/field.hpp"
#include "nadyn/geometry.hpp"

namespace nadyn {

/// f restricted to the closed ball B_r(a), optionally with the image ball it
/// is expected to have.
struct LocalModel {
  RationalMap map;
  Ball domain;
  std::optional<Ball> declared_image;
};

/// The image ball B_{t_i}(b_i) used by the construction: the declared one if
/// present (validated elsewhere), otherwise the computed one.
inline Ball target_image(const LocalModel& model) {
  return model.declared_image ? *model.declared_image : image_of_ball(model.map, model.domain);
}

/// Checks the gluing hypotheses and throws HypothesisError
/// naming the offending model.
inline void validate_models(std::span<const LocalModel> models) {
  if (models.empty()) throw HypothesisError("no local models given");
  const FieldConfig field = models.front().domain.field();
  const Ball unit = Ball::closed(KElement(field), 0);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const LocalModel& m = models[i];
    const std::string tag = "model " + std::to_string(i) + ": ";
    if (m.domain.field() != field || m.map.field() != field) {
      throw HypothesisError(tag + "mixes different primes");
    }
    if (!m.domain.is_closed()) throw HypothesisError(tag + "domain must be a closed ball");
    if (m.map.is_constant()) throw HypothesisError(tag + "map is constant");
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      if (m.domain.intersects(models[j].domain)) {
        throw HypothesisError("balls not pairwise disjoint: models " + std::to_string(i) + " and " +
                              std::to_string(j));
      }
    }
    for (std::size_t j = 0; j < models.size(); ++j) {
      if (!pole_free_on_ball(m.map, models[j].domain)) {
        throw HypothesisError(tag + "map has a pole in the ball of model " + std::to_string(j));
      }
      if (!unit.contains(image_of_ball(m.map, models[j].domain))) {
        throw HypothesisError(tag + "image of the ball of model " + std::to_string(j) +
                              " is not inside the closed unit ball");
      }
    }
    if (m.declared_image) {
      const Ball actual = image_of_ball(m.map, m.domain);
      if (!(actual == *m.declared_image)) {
        throw HypothesisError(tag + "declared image " + m.declared_image->to_string() +
                              " differs from the computed image " + actual.to_string());
      }
    }
  }
}

/// 1 / (1 - ((z - a)/c)^M), reduced: -c^M / ((z - a)^M - c^M).
inline RationalMap build_h(const KElement& a, const KElement& c, long M) {
  if (c.is_zero()) throw DomainError("build_h: c must be nonzero");
  if (M < 1) throw DomainError("build_h: M must be at least 1");
  const KElement cM = c.pow(static_cast<unsigned long>(M));
  const Poly den = Poly::linear_root(a).pow(static_cast<unsigned long>(M)) - Poly::constant(cM);
  return RationalMap::reduce(Poly::constant(-cM), den);
}

struct PlanEntry {
  Radius delta;
  Radius s;
  KElement c;
  long M;
};

struct GluingPlan {
  std::vector<PlanEntry> entries;
  Radius tau;
  Radius epsilon;
};

struct PlanOptions {
  std::optional<std::vector<Radius>> delta_override;
  /// Raise M_i above the minimum; lower values are rejected.
  std::optional<std::vector<long>> M_override;
  /// Any c_i with |c_i| = s_i; defaults to the canonical uniformizer power.
  std::optional<std::vector<KElement>> c_override;
};

/// Exponent of (r/delta)^{M/2}: M (e_r - e_delta) / 2.
inline Rational kernel_bound_exp(const Radius& r, const Radius& delta, long M) {
  return Rational(M) * (r.exp_value() - delta.exp_value()) / 2;
}

/// (r/delta)^{M/2} < tau, decided on exponents.
inline bool kernel_bound_holds(const Radius& r, const Radius& delta, long M, const Radius& tau) {
  return kernel_bound_exp(r, delta, M) > tau.exp_value();
}

/// Least M >= 1 with (r/delta)^{M/2} < tau; requires r < delta.
inline long minimal_M(const Radius& r, const Radius& delta, const Radius& tau) {
  if (!(r < delta)) throw DomainError("minimal_M: need r < delta");
  const Rational gap = r.exp_value() - delta.exp_value();
  const Integer m = floor_rational(Rational(2 * tau.exp_value() / gap)) + 1;
  return m < 1 ? 1 : m.get_si();
}

inline GluingPlan plan_gluing(std::span<const LocalModel> models, const Radius& epsilon,
                              const PlanOptions& options = {}) {
  validate_models(models);
  const std::size_t n = models.size();
  const FieldConfig field = models.front().domain.field();

  std::vector<Radius> deltas;
  if (options.delta_override) {
    if (options.delta_override->size() != n) throw HypothesisError("delta_override has the wrong length");
    deltas = *options.delta_override;
  } else {
    if (n < 2) throw HypothesisError("a single ball needs an explicit delta_override");
    std::vector<KElement> centers;
    for (const auto& m : models) centers.push_back(m.domain.center());
    deltas = pairwise_deltas(centers);
  }

  Rational tau_exp = epsilon.exp_value();
  for (const auto& m : models) tau_exp = std::max(tau_exp, target_image(m).radius_exp());
  const Radius tau(tau_exp);

  GluingPlan plan{{}, tau, epsilon};
  for (std::size_t i = 0; i < n; ++i) {
    const Radius& r = models[i].domain.radius();
    const Radius& delta = deltas[i];
    if (!(r < delta)) {
      throw HypothesisError("model " + std::to_string(i) + ": radius must be smaller than delta");
    }
    const ValExp s_exp((r.exp_value() + delta.exp_value()) / 2);
    if (!s_exp.is_half_integral()) {
      throw HypothesisError("model " + std::to_string(i) + ": s = sqrt(r delta) is outside p^(Z/2)");
    }
    const Radius s(s_exp);
    KElement c = uniformizer_power(field, s_exp);
    if (options.c_override) {
      c = options.c_override->at(i);
      if (c.valuation() != s_exp) {
        throw HypothesisError("model " + std::to_string(i) + ": c_override must have |c| = s");
      }
    }
    long M = minimal_M(r, delta, tau);
    if (options.M_override) {
      const long wanted = options.M_override->at(i);
      if (wanted < M) {
        throw HypothesisError("model " + std::to_string(i) + ": M_override " + std::to_string(wanted) +
                              " is below the minimal admissible M = " + std::to_string(M));
      }
      M = wanted;
    }
    plan.entries.push_back({delta, s, std::move(c), M});
  }
  return plan;
}

inline RationalMap build_F(std::span<const LocalModel> models, const GluingPlan& plan) {
  if (plan.entries.size() != models.size()) throw DomainError("plan does not match the models");
  RationalMap F = RationalMap::constant(KElement(models.front().domain.field()));
  for (std::size_t i = 0; i < models.size(); ++i) {
    const PlanEntry& e = plan.entries[i];
    const RationalMap h = build_h(models[i].domain.center(), e.c, e.M);
    F = ratmap_combine(CombineOp::Add, F, ratmap_combine(CombineOp::Mul, models[i].map, h));
  }
  return F;
}

struct SampleWitness {
  KElement point;
  /// valuation(F(z) - f_i(z))
  ValExp diff_exp;
};

struct CertificateEntry {
  CertificateEntry(std::size_t i, Ball expected) : index(i), expected_image(std::move(expected)) {}

  std::size_t index = 0;
  bool pole_free_ok = false;
  std::optional<Ball> image;
  Ball expected_image;
  bool image_ok = false;
  /// Certified exponent of sup |F - f_i| on the domain.
  std::optional<ValExp> eps_bound_exp;
  bool bound_ok = false;
  bool samples_ok = false;
  std::vector<SampleWitness> witnesses;
  std::string note;

  bool passed() const { return pole_free_ok && image_ok && bound_ok && samples_ok; }
};

struct Certificate {
  std::vector<CertificateEntry> entries;
  Radius epsilon;
  /// max(deg num, deg den) of F, reported for the degree/accuracy trade-off.
  long degree = 0;

  bool passed() const {
    for (const auto& e : entries) {
      if (!e.passed()) return false;
    }
    return !entries.empty();
  }
};

/// Verifies, for every ball: F has no pole on it, F(B_i) equals the target
/// image, and sup |F - f_i| < epsilon (Gauss-norm certified). Sample points
/// are spot checks of the same claims. Failures are recorded, not thrown.
inline Certificate certify_theorem1(const RationalMap& F, std::span<const LocalModel> models,
                                    const Radius& epsilon, std::size_t samples = 20) {
  Certificate cert{{}, epsilon, F.degree()};
  for (std::size_t i = 0; i < models.size(); ++i) {
    const LocalModel& m = models[i];
    CertificateEntry entry(i, target_image(m));
    entry.pole_free_ok = pole_free_on_ball(F, m.domain);
    if (!entry.pole_free_ok) {
      entry.note = "F has a pole in the ball";
      cert.entries.push_back(std::move(entry));
      continue;
    }
    const RationalMap diff = F - m.map;
    if (F.is_constant()) {
      entry.note = "F is constant";
    } else {
      entry.image = image_of_ball(F, m.domain);
      entry.image_ok = *entry.image == entry.expected_image;
      if (!entry.image_ok) entry.note = "image mismatch";
    }
    entry.eps_bound_exp = sup_norm_exp_on_ball(diff, m.domain);
    entry.bound_ok = *entry.eps_bound_exp > epsilon.exponent();
    if (!entry.bound_ok && entry.note.empty()) entry.note = "sup |F - f| is not below epsilon";

    entry.samples_ok = true;
    for (const KElement& z : sample_points(m.domain, samples)) {
      const auto fz = F(z);
      const auto gz = m.map(z);
      if (!fz || !gz) {
        entry.samples_ok = false;
        continue;
      }
      const ValExp d = (*fz - *gz).valuation();
      const bool ok = d > epsilon.exponent() && d >= *entry.eps_bound_exp && entry.expected_image.contains(*fz);
      entry.samples_ok = entry.samples_ok && ok;
      entry.witnesses.push_back({z, d});
    }
    if (!entry.samples_ok && entry.note.empty()) entry.note = "sample spot check failed";
    cert.entries.push_back(std::move(entry));
  }
  return cert;
}

inline Certificate certify_theorem1(const RationalMap& F, std::span<const LocalModel> models,
                                    const GluingPlan& plan, std::size_t samples = 20) {
  return certify_theorem1(F, models, plan.epsilon, samples);
}

/// Builds F for the smaller eps_prime and certifies it against eps.
inline bool check_monotonicity(std::span<const LocalModel> models, const Radius& eps, const Radius& eps_prime,
                               const PlanOptions& options = {}) {
  if (!(eps_prime < eps)) throw DomainError("check_monotonicity: need eps_prime < eps");
  const GluingPlan plan = plan_gluing(models, eps_prime, options);
  const RationalMap F = build_F(models, plan);
  return certify_theorem1(F, models, eps).passed();
}

enum class TransferOutcome { Holds, Fails, Inapplicable };

inline const char* to_string(TransferOutcome t) {
  switch (t) {
    case TransferOutcome::Holds: return "holds";
    case TransferOutcome::Fails: return "fails";
    case TransferOutcome::Inapplicable: return "inapplicable";
  }
  return "?";
}

/// For a ball inside the model's domain whose f-image is larger than eps,
/// F must map it onto the same image.
inline TransferOutcome check_subdisk_transfer(const RationalMap& F, const LocalModel& model, const Ball& sub,
                                              const Radius& eps) {
  if (!model.domain.contains(sub)) throw DomainError("check_subdisk_transfer: ball is not inside the domain");
  const Ball expected = image_of_ball(model.map, sub);
  if (!(expected.radius() > eps)) return TransferOutcome::Inapplicable;
  if (!pole_free_on_ball(F, sub)) return TransferOutcome::Fails;
  return image_of_ball(F, sub) == expected ? TransferOutcome::Holds : TransferOutcome::Fails;
}

/// Hypotheses for inheriting an indifferent fixed point x of f_i:
/// |f_i'(x)| = 1, |f_i'(x) - 1| = 1 and |f_j'(x)| < 1/min{t_1, ..., t_n} for
/// j != i. x defaults to the center a_i. Throws if x is not fixed by f_i.
inline bool check_c3_hypotheses(std::span<const LocalModel> models, std::size_t i,
                                std::optional<KElement> point = std::nullopt) {
  if (i >= models.size()) throw DomainError("check_c3_hypotheses: index out of range");
  const KElement x = point ? *point : models[i].domain.center();
  const auto fx = models[i].map(x);
  if (!fx || !(*fx == x)) throw DomainError("check_c3_hypotheses: " + x.to_string() + " is not fixed by f_i");

  const auto d = derivative_at(models[i].map, x);
  if (!d) return false;
  const KElement one(x.field(), 1);
  if (d->valuation() != ValExp(0)) return false;
  if ((*d - one).valuation() != ValExp(0)) return false;

  Rational t_min_exp = target_image(models.front()).radius_exp();
  for (const auto& m : models) t_min_exp = std::max(t_min_exp, target_image(m).radius_exp());
  for (std::size_t j = 0; j < models.size(); ++j) {
    if (j == i) continue;
    const auto dj = derivative_at(models[j].map, x);
    if (!dj) return false;
    // |f_j'(x)| < p^{e_tmin}  <=>  v(f_j'(x)) > -e_tmin
    if (!(dj->valuation() > ValExp(Rational(-t_min_exp)))) return false;
  }
  return true;
}

}  // namespace nadyn
