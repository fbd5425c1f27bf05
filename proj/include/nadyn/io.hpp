#pragma once

// JSON encoding of field elements, maps, balls, plans, certificates and
// problem specs. Every number is an exact rational string "num/den".

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "nadyn/algebra.hpp"
#include "nadyn/ball.hpp"
#include "nadyn/dynamics.hpp"
#include "nadyn/error.hpp"
#include "nadyn/field.hpp"
#include "nadyn/gluing.hpp"

namespace nadyn::io {

using json = nlohmann::json;

namespace detail {

inline const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline Rational rational_from(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) throw ParseError(where + ": expected a rational string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline long integer_from(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<long>();
}

}  // namespace detail

// -- field -----------------------------------------------------------------

inline json to_json(const KElement& x) {
  return {{"a", rational_to_string(x.rational_part())}, {"b", rational_to_string(x.sqrt_part())}};
}

inline KElement kelement_from_json(const json& j, FieldConfig field, const std::string& where = "element") {
  if (j.is_string() || j.is_number_integer()) return KElement(field, detail::rational_from(j, where));
  const Rational a = detail::rational_from(detail::member(j, "a", where), where + ".a");
  Rational b = 0;
  if (j.contains("b")) b = detail::rational_from(j.at("b"), where + ".b");
  return KElement(field, a, b);
}

inline json to_json(const ValExp& v) { return {{"exp", v.to_string()}}; }

inline ValExp valexp_from_json(const json& j, const std::string& where = "valuation") {
  const json& e = detail::member(j, "exp", where);
  if (e.is_string() && e.get<std::string>() == "inf") return ValExp::infinity();
  return ValExp(detail::rational_from(e, where + ".exp"));
}

// -- algebra ---------------------------------------------------------------

inline json to_json(const Poly& p) {
  json out = json::array();
  for (const auto& c : p.coeffs()) out.push_back(to_json(c));
  return out;
}

inline Poly poly_from_json(const json& j, FieldConfig field, const std::string& where = "poly") {
  if (!j.is_array()) throw ParseError(where + ": expected an array of coefficients");
  std::vector<KElement> coeffs;
  for (std::size_t k = 0; k < j.size(); ++k) {
    coeffs.push_back(kelement_from_json(j[k], field, where + "[" + std::to_string(k) + "]"));
  }
  return Poly(field, std::move(coeffs));
}

/// Scales numerator and denominator by one rational so that every coordinate
/// is an integer and their overall gcd is 1. Only used for output.
inline std::pair<Poly, Poly> content_normalized(const RationalMap& f) {
  Integer den_lcm = 1;
  Integer num_gcd = 0;
  auto visit = [&](const Poly& p) {
    for (const auto& c : p.coeffs()) {
      for (const Rational* q : {&c.rational_part(), &c.sqrt_part()}) {
        if (*q == 0) continue;
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q->get_den_mpz_t());
      }
    }
  };
  visit(f.num());
  visit(f.den());
  auto gather = [&](const Poly& p) {
    for (const auto& c : p.coeffs()) {
      for (const Rational* q : {&c.rational_part(), &c.sqrt_part()}) {
        if (*q == 0) continue;
        const Integer scaled = q->get_num() * (den_lcm / q->get_den());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
      }
    }
  };
  gather(f.num());
  gather(f.den());
  Rational scale(den_lcm, num_gcd == 0 ? Integer(1) : num_gcd);
  scale.canonicalize();
  const KElement s(f.field(), scale);
  return {f.num() * s, f.den() * s};
}

inline json to_json(const RationalMap& f) {
  const auto [num, den] = content_normalized(f);
  return {{"num", to_json(num)}, {"den", to_json(den)}};
}

inline RationalMap ratmap_from_json(const json& j, FieldConfig field, const std::string& where = "map") {
  const Poly num = poly_from_json(detail::member(j, "num", where), field, where + ".num");
  Poly den = Poly::constant(KElement(field, 1));
  if (j.contains("den")) den = poly_from_json(j.at("den"), field, where + ".den");
  if (den.is_zero()) throw ParseError(where + ": zero denominator");
  return RationalMap::reduce(num, den);
}

// -- geometry --------------------------------------------------------------

inline json to_json(const Ball& b) {
  return {{"center", to_json(b.center())},
          {"radius_exp", rational_to_string(b.radius_exp())},
          {"kind", to_string(b.kind())}};
}

inline Ball ball_from_json(const json& j, FieldConfig field, const std::string& where = "ball") {
  const KElement center = kelement_from_json(detail::member(j, "center", where), field, where + ".center");
  const Rational e = detail::rational_from(detail::member(j, "radius_exp", where), where + ".radius_exp");
  BallKind kind = BallKind::Closed;
  if (j.contains("kind")) {
    const json& k = j.at("kind");
    if (k == "open") {
      kind = BallKind::Open;
    } else if (k != "closed") {
      throw ParseError(where + ".kind: expected \"open\" or \"closed\"");
    }
  }
  if (!ValExp(e).is_half_integral()) throw ParseError(where + ".radius_exp: not in (1/2)Z");
  return Ball(center, Radius(e), kind);
}

// -- plan and certificate --------------------------------------------------

inline json to_json(const GluingPlan& plan) {
  json entries = json::array();
  for (const auto& e : plan.entries) {
    entries.push_back({{"delta_exp", rational_to_string(e.delta.exp_value())},
                       {"s_exp", rational_to_string(e.s.exp_value())},
                       {"c", to_json(e.c)},
                       {"M", e.M}});
  }
  return {{"epsilon_exp", rational_to_string(plan.epsilon.exp_value())},
          {"tau_exp", rational_to_string(plan.tau.exp_value())},
          {"entries", entries}};
}

inline GluingPlan plan_from_json(const json& j, FieldConfig field, const std::string& where = "plan") {
  GluingPlan plan{{},
                  Radius(detail::rational_from(detail::member(j, "tau_exp", where), where + ".tau_exp")),
                  Radius(detail::rational_from(detail::member(j, "epsilon_exp", where), where + ".epsilon_exp"))};
  const json& entries = detail::member(j, "entries", where);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string w = where + ".entries[" + std::to_string(i) + "]";
    const json& e = entries[i];
    plan.entries.push_back({Radius(detail::rational_from(detail::member(e, "delta_exp", w), w + ".delta_exp")),
                            Radius(detail::rational_from(detail::member(e, "s_exp", w), w + ".s_exp")),
                            kelement_from_json(detail::member(e, "c", w), field, w + ".c"),
                            detail::integer_from(detail::member(e, "M", w), w + ".M")});
  }
  return plan;
}

inline json to_json(const Certificate& cert) {
  json entries = json::array();
  for (const auto& e : cert.entries) {
    json witnesses = json::array();
    for (const auto& w : e.witnesses) witnesses.push_back({{"point", to_json(w.point)}, {"diff_exp", to_json(w.diff_exp)}});
    entries.push_back({{"index", e.index},
                       {"passed", e.passed()},
                       {"pole_free", e.pole_free_ok},
                       {"image", e.image ? to_json(*e.image) : json(nullptr)},
                       {"expected_image", to_json(e.expected_image)},
                       {"image_ok", e.image_ok},
                       {"eps_bound_exp", e.eps_bound_exp ? to_json(*e.eps_bound_exp) : json(nullptr)},
                       {"bound_ok", e.bound_ok},
                       {"samples_ok", e.samples_ok},
                       {"note", e.note},
                       {"witnesses", witnesses}});
  }
  return {{"passed", cert.passed()},
          {"degree", cert.degree},
          {"epsilon_exp", rational_to_string(cert.epsilon.exp_value())},
          {"entries", entries}};
}

// -- dynamics --------------------------------------------------------------

inline FixedPointKind fixed_point_kind_from(const json& j, const std::string& where) {
  if (j == "attracting") return FixedPointKind::Attracting;
  if (j == "repelling") return FixedPointKind::Repelling;
  if (j == "indifferent") return FixedPointKind::Indifferent;
  throw ParseError(where + ": expected attracting, repelling or indifferent");
}

inline json to_json(const CensusCount& c) {
  return {{"attracting", c.attracting}, {"repelling", c.repelling}, {"indifferent", c.indifferent}};
}

inline json to_json(const FixedPointCensus& census) {
  json counts = json::array();
  for (const auto& c : census.counts) counts.push_back(to_json(c));
  json witnesses = json::array();
  for (const auto& w : census.witnesses) {
    witnesses.push_back({{"ball", w.ball_index}, {"disk", to_json(w.disk)}, {"expected", to_string(w.expected)}});
  }
  return {{"counts", counts}, {"witnesses", witnesses}};
}

inline FixedPointCensus census_from_json(const json& j, FieldConfig field, const std::string& where = "census") {
  FixedPointCensus census;
  const json& counts = detail::member(j, "counts", where);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::string w = where + ".counts[" + std::to_string(i) + "]";
    census.counts.push_back({detail::integer_from(detail::member(counts[i], "attracting", w), w),
                             detail::integer_from(detail::member(counts[i], "repelling", w), w),
                             detail::integer_from(detail::member(counts[i], "indifferent", w), w)});
  }
  const json& witnesses = detail::member(j, "witnesses", where);
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    const std::string w = where + ".witnesses[" + std::to_string(i) + "]";
    const long ball = detail::integer_from(detail::member(witnesses[i], "ball", w), w + ".ball");
    if (ball < 0) throw ParseError(w + ".ball: negative index");
    census.witnesses.push_back({static_cast<std::size_t>(ball),
                                ball_from_json(detail::member(witnesses[i], "disk", w), field, w + ".disk"),
                                fixed_point_kind_from(detail::member(witnesses[i], "expected", w), w + ".expected")});
  }
  return census;
}

inline json to_json(const CensusReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json item{{"ball", e.witness.ball_index},
              {"disk", to_json(e.witness.disk)},
              {"expected", to_string(e.witness.expected)},
              {"ok", e.ok},
              {"message", e.message}};
    if (e.behavior) {
      item["classified"] = to_string(e.behavior->kind);
      item["wdeg"] = e.behavior->wdeg;
      item["existence_certified"] = e.behavior->existence_certified;
      if (e.behavior->image) item["image"] = to_json(*e.behavior->image);
    }
    entries.push_back(std::move(item));
  }
  json observed = json::array();
  for (const auto& c : report.observed) observed.push_back(to_json(c));
  return {{"passed", report.passed()}, {"observed", observed}, {"mismatches", report.mismatches}, {"entries", entries}};
}

// -- problem spec ----------------------------------------------------------

struct OrbitRequest {
  KElement start;
  std::size_t steps;
};

/// A gluing problem as read from a spec file.
struct ProblemSpec {
  FieldConfig field;
  Radius epsilon;
  std::vector<LocalModel> models;
  PlanOptions options;
  std::optional<FixedPointCensus> census;
  std::vector<OrbitRequest> orbits;
};

/// Parses a problem spec. Model ball centers must be rational and their
/// radius exponents integral, which keeps every construction constant in K.
inline ProblemSpec problem_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("problem spec must be a JSON object");
  const long p = detail::integer_from(detail::member(j, "prime", "problem"), "prime");
  if (p < 2) throw ParseError("prime: must be a prime >= 2");
  std::optional<FieldConfig> field_opt;
  try {
    field_opt.emplace(static_cast<unsigned long>(p));
  } catch (const DomainError& e) {
    throw ParseError(std::string("prime: ") + e.what());
  }
  const FieldConfig field = *field_opt;
  const Rational eps = detail::rational_from(detail::member(j, "epsilon_exp", "problem"), "epsilon_exp");
  if (!ValExp(eps).is_half_integral()) throw ParseError("epsilon_exp: not in (1/2)Z");

  ProblemSpec spec{field, Radius(eps), {}, {}, std::nullopt, {}};
  const json& models = detail::member(j, "models", "problem");
  if (!models.is_array() || models.empty()) throw ParseError("models: expected a non-empty array");
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string w = "models[" + std::to_string(i) + "]";
    RationalMap map = ratmap_from_json(detail::member(models[i], "map", w), field, w + ".map");
    Ball ball = ball_from_json(detail::member(models[i], "ball", w), field, w + ".ball");
    if (!ball.center().is_rational()) throw ParseError(w + ".ball.center: must be rational (b = 0)");
    if (ball.radius_exp().get_den() != 1) throw ParseError(w + ".ball.radius_exp: must be an integer");
    if (!ball.is_closed()) throw ParseError(w + ".ball.kind: model balls must be closed");
    std::optional<Ball> image;
    if (models[i].contains("image") && !models[i].at("image").is_null()) {
      image = ball_from_json(models[i].at("image"), field, w + ".image");
    }
    spec.models.push_back({std::move(map), std::move(ball), std::move(image)});
  }
  if (j.contains("delta_override") && !j.at("delta_override").is_null()) {
    std::vector<Radius> deltas;
    const json& d = j.at("delta_override");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string w = "delta_override[" + std::to_string(i) + "]";
      const Rational e = detail::rational_from(d[i], w);
      if (e.get_den() != 1) throw ParseError(w + ": must be an integer exponent");
      deltas.emplace_back(e);
    }
    spec.options.delta_override = std::move(deltas);
  }
  if (j.contains("M_override") && !j.at("M_override").is_null()) {
    std::vector<long> ms;
    const json& m = j.at("M_override");
    for (std::size_t i = 0; i < m.size(); ++i) ms.push_back(detail::integer_from(m[i], "M_override[" + std::to_string(i) + "]"));
    spec.options.M_override = std::move(ms);
  }
  if (j.contains("c_override") && !j.at("c_override").is_null()) {
    std::vector<KElement> cs;
    const json& c = j.at("c_override");
    for (std::size_t i = 0; i < c.size(); ++i) cs.push_back(kelement_from_json(c[i], field, "c_override[" + std::to_string(i) + "]"));
    spec.options.c_override = std::move(cs);
  }
  if (j.contains("census") && !j.at("census").is_null()) spec.census = census_from_json(j.at("census"), field);
  if (j.contains("orbits") && !j.at("orbits").is_null()) {
    const json& o = j.at("orbits");
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string w = "orbits[" + std::to_string(i) + "]";
      const long steps = detail::integer_from(detail::member(o[i], "steps", w), w + ".steps");
      if (steps < 0) throw ParseError(w + ".steps: negative");
      spec.orbits.push_back({kelement_from_json(detail::member(o[i], "start", w), field, w + ".start"),
                             static_cast<std::size_t>(steps)});
    }
  }
  return spec;
}

inline json to_json(const ProblemSpec& spec) {
  json models = json::array();
  for (const auto& m : spec.models) {
    json item{{"map", to_json(m.map)}, {"ball", to_json(m.domain)}};
    if (m.declared_image) item["image"] = to_json(*m.declared_image);
    models.push_back(std::move(item));
  }
  json out{{"prime", spec.field.prime()},
           {"epsilon_exp", rational_to_string(spec.epsilon.exp_value())},
           {"models", models}};
  if (spec.options.delta_override) {
    json d = json::array();
    for (const auto& r : *spec.options.delta_override) d.push_back(rational_to_string(r.exp_value()));
    out["delta_override"] = d;
  }
  if (spec.options.M_override) out["M_override"] = *spec.options.M_override;
  if (spec.options.c_override) {
    json c = json::array();
    for (const auto& x : *spec.options.c_override) c.push_back(to_json(x));
    out["c_override"] = c;
  }
  if (spec.census) out["census"] = to_json(*spec.census);
  if (!spec.orbits.empty()) {
    json o = json::array();
    for (const auto& r : spec.orbits) o.push_back({{"start", to_json(r.start)}, {"steps", r.steps}});
    out["orbits"] = o;
  }
  return out;
}

}  // namespace nadyn::io
