#pragma once

// Command implementations behind the nadyn executable. Each command returns
// its exit status and writes a human-readable report to `out`.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nadyn/dynamics.hpp"
#include "nadyn/gluing.hpp"
#include "nadyn/io.hpp"
#include "nadyn/reference_problems.hpp"

namespace nadyn::cli {

enum ExitCode : int { kPass = 0, kCertificateFail = 1, kInputError = 2, kHypothesisViolation = 3 };

/// Working precision of orbits and of the Hensel reference point.
inline constexpr long kOrbitPrecision = 64;

/// "p^(-e)" with the actual prime; "0" for the zero distance.
inline std::string format_abs(const ValExp& v, unsigned long p) {
  if (v.is_infinite()) return "0";
  return std::to_string(p) + "^(" + Rational(-v.value()).get_str() + ")";
}

inline std::string format_ball(const Ball& b) {
  return std::string(b.is_closed() ? "B_" : "D_") + "{" + format_abs(b.radius().exponent(), b.field().prime()) +
         "}(" + b.center().to_string() + ")";
}

/// "a" or "a,b" for a + b sqrt(p), each part an exact rational.
inline KElement parse_kelement(const std::string& text, FieldConfig field) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return KElement(field, parse_rational(text));
  return KElement(field, parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1)));
}

inline io::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return io::json::parse(in);
  } catch (const io::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const io::json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << '\n';
}

struct OrbitRun {
  io::OrbitRequest request;
  std::optional<std::size_t> ball;
  std::optional<KElement> reference;
  Orbit orbit;
};

/// Everything `glue` produces for one problem.
struct GlueRun {
  io::ProblemSpec spec;
  GluingPlan plan;
  RationalMap F;
  Certificate certificate;
  std::optional<CensusReport> census;
  /// Set when the census forced a smaller epsilon than requested.
  std::optional<Radius> census_epsilon;
  std::vector<OrbitRun> orbits;

  bool passed() const { return certificate.passed() && (!census || census->passed()); }
};

inline std::optional<std::size_t> containing_ball(std::span<const LocalModel> models, const KElement& z) {
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].domain.contains(z)) return i;
  }
  return std::nullopt;
}

/// The fixed point the orbit is measured against: z0 itself if fixed,
/// otherwise a Hensel refinement from the center of z0's ball.
inline std::optional<KElement> orbit_reference(const RationalMap& F, std::span<const LocalModel> models,
                                               const KElement& z0) {
  const auto fz = F(z0);
  if (fz && *fz == z0) return z0;
  const auto ball = containing_ball(models, z0);
  if (!ball) return std::nullopt;
  try {
    return hensel_fixed_point(F, models[*ball].domain.center(), ValExp(kOrbitPrecision));
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

inline OrbitRun run_orbit(const RationalMap& F, std::span<const LocalModel> models, const io::OrbitRequest& req) {
  OrbitRun run{req, containing_ball(models, req.start), orbit_reference(F, models, req.start), {}};
  run.orbit = orbit(F, req.start, req.steps, run.reference, Rational(kOrbitPrecision));
  return run;
}

/// Plans, builds and certifies. With a census that fails at the requested
/// epsilon, re-plans once at the epsilon the witnesses call for.
inline GlueRun run_glue(const io::ProblemSpec& spec, std::size_t samples = 20) {
  validate_models(spec.models);
  GlueRun run{spec, plan_gluing(spec.models, spec.epsilon, spec.options), RationalMap(spec.field), {{}, spec.epsilon, 0},
              std::nullopt, std::nullopt, {}};
  run.F = build_F(spec.models, run.plan);
  run.certificate = certify_theorem1(run.F, spec.models, run.plan, samples);
  if (spec.census) {
    run.census = verify_census(run.F, spec.models, *spec.census);
    if (!run.census->passed()) {
      const Radius eps = census_epsilon(spec.models, *spec.census, spec.options);
      if (eps < spec.epsilon) {
        run.census_epsilon = eps;
        run.plan = plan_gluing(spec.models, eps, spec.options);
        run.F = build_F(spec.models, run.plan);
        run.certificate = certify_theorem1(run.F, spec.models, run.plan, samples);
        run.census = verify_census(run.F, spec.models, *spec.census);
      }
    }
  }
  for (const auto& req : spec.orbits) run.orbits.push_back(run_orbit(run.F, spec.models, req));
  return run;
}

inline io::json orbit_to_json(const OrbitRun& run) {
  io::json points = io::json::array();
  for (const auto& s : run.orbit.steps) {
    points.push_back({{"point", io::to_json(s.point)},
                      {"distance_exp", s.distance_exp ? io::to_json(*s.distance_exp) : io::json(nullptr)}});
  }
  return {{"start", io::to_json(run.request.start)},
          {"steps", run.request.steps},
          {"ball", run.ball ? io::json(*run.ball) : io::json(nullptr)},
          {"reference", run.reference ? io::to_json(*run.reference) : io::json(nullptr)},
          {"precision_exp", kOrbitPrecision},
          {"hit_pole", run.orbit.hit_pole},
          {"points", points}};
}

inline io::json to_json(const GlueRun& run) {
  io::json out{{"problem", io::to_json(run.spec)},
               {"plan", io::to_json(run.plan)},
               {"F", io::to_json(run.F)},
               {"certificate", io::to_json(run.certificate)},
               {"passed", run.passed()}};
  out["census"] = run.census ? io::to_json(*run.census) : io::json(nullptr);
  if (run.census_epsilon) out["census_epsilon_exp"] = rational_to_string(run.census_epsilon->exp_value());
  io::json orbits = io::json::array();
  for (const auto& o : run.orbits) orbits.push_back(orbit_to_json(o));
  out["orbits"] = orbits;
  return out;
}

// -- reports ---------------------------------------------------------------

inline void print_plan(const GluingPlan& plan, unsigned long p, std::ostream& out) {
  out << "epsilon = " << format_abs(plan.epsilon.exponent(), p) << ", tau = " << format_abs(plan.tau.exponent(), p)
      << '\n';
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const auto& e = plan.entries[i];
    out << "  ball " << i << ": delta = " << format_abs(e.delta.exponent(), p)
        << ", s = " << format_abs(e.s.exponent(), p) << ", c = " << e.c << ", M = " << e.M << '\n';
  }
}

inline void print_certificate(const Certificate& cert, unsigned long p, std::ostream& out) {
  out << "certificate: " << (cert.passed() ? "PASS" : "FAIL") << " (deg F = " << cert.degree << ")\n";
  for (const auto& e : cert.entries) {
    out << "  ball " << e.index << ": F(B) ";
    if (e.image_ok) {
      out << "= " << format_ball(e.expected_image);
    } else {
      out << "= " << (e.image ? format_ball(*e.image) : std::string("?")) << " != " << format_ball(e.expected_image);
    }
    if (e.eps_bound_exp) out << ", sup|F - f| = " << format_abs(*e.eps_bound_exp, p);
    out << (e.passed() ? "  ok" : "  FAILED: " + e.note) << '\n';
  }
}

inline void print_census(const CensusReport& report, std::ostream& out) {
  out << "census: " << (report.passed() ? "PASS" : "FAIL") << '\n';
  for (const auto& e : report.entries) {
    out << "  ball " << e.witness.ball_index << ", " << format_ball(e.witness.disk) << ": " << e.message << '\n';
  }
  for (const auto& m : report.mismatches) out << "  mismatch: " << m << '\n';
}

inline void print_orbit(const OrbitRun& run, unsigned long p, std::ostream& out) {
  out << "orbit of " << run.request.start << ", " << run.request.steps << " steps";
  if (!run.ball) out << " (warning: start lies outside every model ball)";
  out << '\n';
  if (run.reference) {
    out << "  reference fixed point z* ~ " << *run.reference << " (to " << format_abs(ValExp(kOrbitPrecision), p)
        << ")\n";
  }
  out << "  k   |z_k|" << (run.reference ? "   |z_k - z*|" : "   |z_k - z_{k-1}|") << '\n';
  for (std::size_t k = 0; k < run.orbit.steps.size(); ++k) {
    const auto& s = run.orbit.steps[k];
    out << "  " << k << "   " << format_abs(s.point.valuation(), p) << "   ";
    if (s.distance_exp) {
      out << (*s.distance_exp >= ValExp(kOrbitPrecision) && !s.distance_exp->is_infinite() ? "<= " : "")
          << format_abs(min(*s.distance_exp, ValExp(kOrbitPrecision)), p);
    } else if (k > 0) {
      out << format_abs((s.point - run.orbit.steps[k - 1].point).valuation(), p);
    } else {
      out << "-";
    }
    out << '\n';
  }
  if (run.orbit.hit_pole) out << "  (orbit hit a pole of F)\n";
}

inline void print_glue(const GlueRun& run, std::ostream& out) {
  const unsigned long p = run.spec.field.prime();
  if (run.census_epsilon) {
    out << "census needs epsilon = " << format_abs(run.census_epsilon->exponent(), p) << "; re-planned\n";
  }
  print_plan(run.plan, p, out);
  print_certificate(run.certificate, p, out);
  if (run.census) print_census(*run.census, out);
  for (const auto& o : run.orbits) print_orbit(o, p, out);
}

// -- commands --------------------------------------------------------------

namespace detail {

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const HypothesisError& e) {
    err << "hypothesis violated: " << e.what() << '\n';
    return kHypothesisViolation;
  } catch (const DomainError& e) {
    err << "hypothesis violated: " << e.what() << '\n';
    return kHypothesisViolation;
  } catch (const io::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace detail

inline int cmd_glue(const std::string& input, const std::string& output, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const io::ProblemSpec spec = io::problem_from_json(read_json_file(input));
    const GlueRun run = run_glue(spec);
    print_glue(run, out);
    if (!output.empty()) write_json_file(output, to_json(run));
    return run.passed() ? kPass : kCertificateFail;
  });
}

inline int cmd_verify(const std::string& result_path, std::size_t samples, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  return detail::guarded(err, [&]() -> int {
    const io::json result = read_json_file(result_path);
    const io::ProblemSpec spec = io::problem_from_json(io::detail::member(result, "problem", "result"));
    validate_models(spec.models);
    const RationalMap F = io::ratmap_from_json(io::detail::member(result, "F", "result"), spec.field, "F");
    const GluingPlan plan = io::plan_from_json(io::detail::member(result, "plan", "result"), spec.field);
    const unsigned long p = spec.field.prime();
    if (spec.epsilon < plan.epsilon) {
      out << "inconsistent result: plan epsilon " << format_abs(plan.epsilon.exponent(), p)
          << " exceeds the requested " << format_abs(spec.epsilon.exponent(), p) << '\n';
      return kCertificateFail;
    }
    const Certificate cert = certify_theorem1(F, spec.models, plan.epsilon, samples);
    print_certificate(cert, p, out);
    bool ok = cert.passed();
    if (spec.census) {
      const CensusReport report = verify_census(F, spec.models, *spec.census);
      print_census(report, out);
      ok = ok && report.passed();
    }
    if (result.contains("passed") && result.at("passed").is_boolean() && result.at("passed").get<bool>() != ok) {
      out << "stored verdict disagrees with the recomputed one\n";
      ok = false;
    }
    out << (ok ? "verified" : "verification FAILED") << '\n';
    return ok ? kPass : kCertificateFail;
  });
}

inline int cmd_orbit(const std::string& result_path, const std::string& start, std::size_t steps,
                     std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const io::json result = read_json_file(result_path);
    const io::ProblemSpec spec = io::problem_from_json(io::detail::member(result, "problem", "result"));
    const RationalMap F = io::ratmap_from_json(io::detail::member(result, "F", "result"), spec.field, "F");
    const KElement z0 = parse_kelement(start, spec.field);
    const OrbitRun run = run_orbit(F, spec.models, {z0, steps});
    if (!run.ball) err << "warning: start " << z0 << " lies outside every model ball\n";
    print_orbit(run, spec.field.prime(), out);
    return kPass;
  });
}

/// ex2, or ex1 with alpha and beta (exact rationals).
inline int cmd_example(const std::string& name, const std::optional<std::string>& alpha,
                       const std::optional<std::string>& beta, const std::string& output = {},
                       std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&]() -> int {
    if (name == "ex2") {
      const GlueRun run = run_glue(example2_problem());
      print_glue(run, out);
      out << "image equalities:\n";
      for (const auto& e : run.certificate.entries) {
        out << "  F(" << format_ball(run.spec.models[e.index].domain) << ") = " << format_ball(e.expected_image)
            << (e.image_ok ? "  holds" : "  FAILS") << '\n';
      }
      if (!output.empty()) write_json_file(output, to_json(run));
      return run.passed() ? kPass : kCertificateFail;
    }
    if (name != "ex1") throw ParseError("unknown example '" + name + "' (expected ex1 or ex2)");
    if (!alpha || !beta) throw ParseError("ex1 needs --alpha and --beta");
    const Rational a = parse_rational(*alpha);
    const Rational b = parse_rational(*beta);
    const GlueRun run = run_glue(example1_problem(a, b));
    print_glue(run, out);

    const KElement zero(run.spec.field, 0);
    const auto evaluated = run.F.derivative()(zero);
    const PlanEntry& e2 = run.plan.entries[1];
    const KElement closed = example1_derivative_closed_form(a, b, e2.c, e2.M);
    const bool formula_ok = evaluated && *evaluated == closed;
    out << "F'(0) = " << (evaluated ? evaluated->to_string() : std::string("pole")) << '\n';
    out << "closed form alpha + (1 - 3 beta)/(1 - (-3/c_2)^M_2) = " << closed
        << (formula_ok ? "  (exact match)" : "  MISMATCH") << '\n';
    if (evaluated) {
      out << "|F'(0)| = " << format_abs(evaluated->valuation(), run.spec.field.prime()) << ", 0 is "
          << to_string(classify_multiplier(*evaluated)) << '\n';
    }
    if (!output.empty()) write_json_file(output, to_json(run));
    return run.passed() && formula_ok ? kPass : kCertificateFail;
  });
}

}  // namespace nadyn::cli
