// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nadyn/cli.hpp"
#include "oracles.hpp"

using namespace nadyn;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// -- random gluing instances -----------------------------------------------

struct Instance {
  std::vector<LocalModel> models;
  Radius epsilon;
};

/// n / d with p not dividing d.
Rational integral_rational(oracle::Generator& gen, unsigned long p) {
  for (;;) {
    const long d = gen.integer(1, 6);
    if (d % static_cast<long>(p) == 0) continue;
    Rational q(gen.integer(-40, 40), d);
    q.canonicalize();
    return q;
  }
}

KElement integral_element(oracle::Generator& gen, FieldConfig field) {
  return KElement(field, integral_rational(gen, field.prime()),
                  gen.coin() ? integral_rational(gen, field.prime()) : Rational(0));
}

/// Polynomial models of degree <= 3 with integral coefficients on disjoint
/// balls inside the unit ball, so every image lies in B_1(0).
Instance random_instance(oracle::Generator& gen) {
  static constexpr unsigned long primes[] = {2, 3, 5};
  const FieldConfig field(primes[gen.integer(0, 2)]);
  const auto p = static_cast<long>(field.prime());
  const long n = gen.integer(2, 4);
  for (;;) {
    std::vector<LocalModel> models;
    for (long i = 0; i < n; ++i) {
      const KElement center(field, Rational(gen.integer(0, p * p * p - 1)));
      const Ball domain = Ball::closed(center, gen.integer(1, 3));
      std::vector<KElement> coeffs;
      const long deg = gen.integer(1, 3);
      for (long k = 0; k <= deg; ++k) coeffs.push_back(integral_element(gen, field));
      while (coeffs.back().is_zero()) coeffs.back() = integral_element(gen, field);
      models.push_back({RationalMap::from_poly(Poly(field, coeffs)), domain, std::nullopt});
    }
    try {
      validate_models(models);
    } catch (const HypothesisError&) {
      continue;
    }
    return {std::move(models), Radius(gen.integer(1, 4))};
  }
}

// -- criteria --------------------------------------------------------------

Outcome example_two() {
  Outcome out;
  const io::ProblemSpec spec = example2_problem();
  const GluingPlan plan = plan_gluing(spec.models, spec.epsilon);
  out.require(plan.tau.exp_value() == 3, "tau != 3^-3");
  for (const auto& e : plan.entries) {
    out.require(e.delta.exp_value() == 1, "delta != 1/3");
    out.require(e.s.exp_value() == Rational(3, 2), "s != 3^(-3/2)");
    out.require(e.M == 7, "M != 7");
  }
  const RationalMap F = build_F(spec.models, plan);
  const Certificate cert = certify_theorem1(F, spec.models, plan);
  out.require(cert.passed(), "certificate failed");
  const FieldConfig F3(3);
  const std::vector<Ball> images{Ball::closed(KElement(F3, 0), 3), Ball::closed(KElement(F3, 3), 1),
                                 Ball::closed(KElement(F3, 6), 2)};
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.require(image_of_ball(F, spec.models[i].domain) == images[i],
                "image of ball " + std::to_string(i) + " is not " + images[i].to_string());
  }
  return out;
}

Outcome example_one() {
  Outcome out;
  struct Case {
    Rational alpha;
    FixedPointKind kind;
  };
  const Rational beta(1, 3);
  for (const Case& c : {Case{3, FixedPointKind::Attracting}, Case{Rational(1, 3), FixedPointKind::Repelling},
                        Case{2, FixedPointKind::Indifferent}}) {
    const cli::GlueRun run = cli::run_glue(example1_problem(c.alpha, beta));
    const std::string tag = "alpha = " + c.alpha.get_str() + ": ";
    out.require(run.certificate.passed(), tag + "certificate failed");
    const KElement zero(run.spec.field, 0);
    const auto d = run.F.derivative()(zero);
    const PlanEntry& e2 = run.plan.entries[1];
    const KElement closed = example1_derivative_closed_form(c.alpha, beta, e2.c, e2.M);
    out.require(d && *d == closed, tag + "F'(0) differs from the closed form");
    out.require(d && *d == KElement(run.spec.field, c.alpha), tag + "F'(0) != alpha");
    out.require(d && classify_multiplier(*d) == c.kind, tag + "wrong classification");
  }
  return out;
}

Outcome kernel_bounds(std::size_t& points) {
  Outcome out;
  oracle::Generator gen(2024);
  for (int i = 0; i < 50; ++i) {
    const FieldConfig field(gen.prime());
    const auto p = static_cast<long>(field.prime());
    const KElement a = gen.coin() ? gen.rational_element(field) : gen.element(field);
    const long er = gen.integer(0, 4);
    const long ed = er - gen.integer(1, 3);
    const KElement c = uniformizer_power(field, ValExp(Rational(er + ed) / 2));
    const long M = gen.integer(1, 9);
    const RationalMap h = build_h(a, c, M);
    const Rational bound = kernel_bound_exp(Radius(er), Radius(ed), M);
    const std::string tag = "instance " + std::to_string(i) + ": ";

    const auto inner = sample_points(Ball::closed(a, er), 20);
    out.require(inner.size() >= 20, tag + "fewer than 20 inner points");
    for (const auto& z : inner) {
      const auto hz = h(z);
      if (!hz) {
        out.fail(tag + "pole inside B_r(a)");
        continue;
      }
      const ValExp d = oracle::valuation(*hz - KElement(field, 1));
      out.require(d == oracle::valuation((z - a) / c) * Rational(M), tag + "|h - 1| != |(z - a)/c|^M");
      out.require(d >= ValExp(bound), tag + "|h - 1| above (r/delta)^(M/2)");
      ++points;
    }

    for (int got = 0; got < 20;) {
      const long unit = gen.integer(1, 40);
      if (unit % p == 0) continue;
      const Rational shift = Rational(gen.integer(0, 4)) / 2;
      const KElement z = a + uniformizer_power(field, ValExp(Rational(ed) - shift)) * Rational(unit);
      const auto hz = h(z);
      if (!hz) {
        out.fail(tag + "pole outside D_delta(a)");
        ++got;
        continue;
      }
      out.require(oracle::valuation(*hz) >= ValExp(bound), tag + "|h| above (r/delta)^(M/2) outside");
      out.require(oracle::valuation(*hz) == -(oracle::valuation((z - a) / c) * Rational(M)),
                  tag + "|h| != |(z - a)/c|^-M outside");
      ++got;
      ++points;
    }
  }
  return out;
}

Outcome gluing_suite(const std::vector<Instance>& suite) {
  Outcome out;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const Instance& inst = suite[i];
    const GluingPlan plan = plan_gluing(inst.models, inst.epsilon);
    const RationalMap F = build_F(inst.models, plan);
    const Certificate cert = certify_theorem1(F, inst.models, plan);
    const std::string tag = "instance " + std::to_string(i) + ": ";
    out.require(cert.passed(), tag + "certificate failed");
    for (const auto& e : cert.entries) {
      out.require(e.image_ok, tag + "image mismatch on ball " + std::to_string(e.index));
      out.require(e.eps_bound_exp && *e.eps_bound_exp > ValExp(inst.epsilon.exp_value()),
                  tag + "sup bound not beyond epsilon on ball " + std::to_string(e.index));
    }
  }
  return out;
}

Outcome minimality(const std::vector<Instance>& suite, std::size_t& checked) {
  Outcome out;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const Instance& inst = suite[i];
    const GluingPlan plan = plan_gluing(inst.models, inst.epsilon);
    for (std::size_t j = 0; j < plan.entries.size(); ++j) {
      const PlanEntry& e = plan.entries[j];
      const Radius r = inst.models[j].domain.radius();
      const std::string tag = "instance " + std::to_string(i) + " ball " + std::to_string(j) + ": ";
      out.require(kernel_bound_holds(r, e.delta, e.M, plan.tau), tag + "planned M misses the bound");
      if (e.M > 1) {
        out.require(!kernel_bound_holds(r, e.delta, e.M - 1, plan.tau), tag + "M - 1 still meets the bound");
        ++checked;
      }
    }
  }
  return out;
}

Outcome monotonicity(const std::vector<Instance>& suite) {
  Outcome out;
  for (std::size_t i = 0; i < 25 && i < suite.size(); ++i) {
    const Radius finer(suite[i].epsilon.exp_value() + 1);
    out.require(check_monotonicity(suite[i].models, suite[i].epsilon, finer),
                "instance " + std::to_string(i) + ": eps/p plan fails at eps");
  }
  return out;
}

/// Attracting p(z - a) + a, repelling (z - a)/p + a and indifferent u(z - a) + a
/// with |u| = |u - 1| = 1, on B_{p^-2}(a) with centers a = 0, p, 2p, ...
/// Centers at mutual distance 1/p keep the repelling maps inside B_1(0).
io::ProblemSpec fixed_point_instance(FieldConfig field, const std::vector<FixedPointKind>& kinds, const KElement& u) {
  const Rational p(static_cast<long>(field.prime()));
  io::ProblemSpec spec{field, Radius(3), {}, {}, std::nullopt, {}};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const KElement a(field, static_cast<long>(i * field.prime()));
    KElement slope(field, 0);
    switch (kinds[i]) {
      case FixedPointKind::Attracting: slope = KElement(field, p); break;
      case FixedPointKind::Repelling: slope = KElement(field, 1 / p); break;
      case FixedPointKind::Indifferent: slope = u; break;
    }
    // slope (z - a) + a
    const Poly f(field, std::vector<KElement>{a - slope * a, slope});
    spec.models.push_back({RationalMap::from_poly(f), Ball::closed(a, 2), std::nullopt});
  }
  FixedPointCensus census;
  census.counts.resize(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    detail::add_local_witness(census, spec.models[i], i, spec.models[i].domain.center());
  }
  spec.census = std::move(census);
  return spec;
}

Outcome fixed_point_suite(std::size_t& instances) {
  Outcome out;
  using K = FixedPointKind;
  struct Config {
    unsigned long p;
    std::vector<K> kinds;
    Rational u_a;
    Rational u_b;
  };
  const std::vector<Config> configs{
      {2, {K::Attracting, K::Repelling}, 0, 0},
      {2, {K::Repelling, K::Attracting}, 0, 0},
      {3, {K::Attracting, K::Repelling, K::Indifferent}, 2, 0},
      {3, {K::Indifferent, K::Attracting}, 2, 1},
      {3, {K::Repelling, K::Indifferent, K::Attracting}, Rational(1, 2), 0},
      {5, {K::Attracting, K::Repelling, K::Indifferent, K::Indifferent}, 3, 0},
      {5, {K::Indifferent, K::Repelling}, 2, Rational(1, 2)},
      {7, {K::Attracting, K::Indifferent, K::Repelling}, 4, 0},
  };
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const Config& cfg = configs[ci];
    const FieldConfig field(cfg.p);
    const std::string tag = "config " + std::to_string(ci) + ": ";
    const io::ProblemSpec spec = fixed_point_instance(field, cfg.kinds, KElement(field, cfg.u_a, cfg.u_b));
    ++instances;
    if (spec.census->witnesses.size() != cfg.kinds.size()) {
      out.fail(tag + "a local model does not certify its own fixed point");
      continue;
    }
    for (std::size_t i = 0; i < cfg.kinds.size(); ++i) {
      if (cfg.kinds[i] == K::Indifferent) {
        out.require(check_c3_hypotheses(spec.models, i), tag + "C3 hypotheses fail on ball " + std::to_string(i));
      }
    }
    const cli::GlueRun run = cli::run_glue(spec);
    out.require(run.certificate.passed(), tag + "certificate failed");
    out.require(run.census && run.census->passed(), tag + "census failed");
    for (const auto& wd : spec.census->witnesses) {
      const std::string wtag = tag + "witness on ball " + std::to_string(wd.ball_index) + ": ";
      const DiskBehavior b = classify_disk(run.F, wd.disk);
      switch (wd.expected) {
        case K::Attracting: out.require(b.kind == DiskBehaviorKind::Attracting, wtag + "not attracting"); break;
        case K::Repelling: out.require(b.kind == DiskBehaviorKind::Repelling, wtag + "not repelling"); break;
        case K::Indifferent:
          out.require(b.kind == DiskBehaviorKind::IndifferentBijective && b.existence_certified,
                      wtag + "not a certified indifferent disk");
          break;
      }
      if (wd.expected != K::Attracting) continue;
      const KElement a = wd.disk.center();
      const KElement star = hensel_fixed_point(run.F, a, ValExp(cli::kOrbitPrecision));
      out.require(wd.disk.contains(star), wtag + "Hensel limit left the disk");
      const KElement z0 = a + KElement(field, Rational(static_cast<long>(cfg.p * cfg.p * cfg.p)));
      const Orbit orb = orbit(run.F, z0, 10, star, Rational(cli::kOrbitPrecision));
      out.require(orb.steps.size() == 11 && !orb.hit_pole, wtag + "orbit stopped early");
      for (std::size_t k = 1; k < orb.steps.size(); ++k) {
        out.require(*orb.steps[k].distance_exp > *orb.steps[k - 1].distance_exp,
                    wtag + "|z_k - z*| did not shrink at step " + std::to_string(k));
      }
    }
  }
  return out;
}

Outcome root_counts() {
  Outcome out;
  oracle::Generator gen(7);
  for (int i = 0; i < 200; ++i) {
    const FieldConfig field(gen.prime());
    const KElement center = gen.element(field);
    std::vector<KElement> roots;
    for (long k = gen.integer(1, 5); k > 0; --k) {
      roots.push_back(gen.coin() ? gen.element(field)
                                 : center + uniformizer_power(field, ValExp(Rational(gen.integer(-2, 6)) / 2)));
    }
    const Poly P = oracle::from_roots(gen.element(field, false), roots);
    // every other radius sits exactly on a root, so the boundary is exercised
    Rational e = Rational(gen.integer(-2, 6)) / 2;
    if (i % 2 == 0) {
      const ValExp d = oracle::valuation(roots[gen.integer(0, static_cast<long>(roots.size()) - 1)] - center);
      if (d.is_finite()) e = d.value();
    }
    for (const BallKind kind : {BallKind::Closed, BallKind::Open}) {
      const long got = count_roots_in_ball(P, Ball(center, Radius(e), kind));
      const long want = oracle::count_roots(roots, center, e, kind == BallKind::Closed);
      out.require(got == want, "polynomial " + std::to_string(i) + ": counted " + std::to_string(got) + ", expected " +
                                   std::to_string(want));
    }
  }
  return out;
}

Outcome field_axioms() {
  Outcome out;
  oracle::Generator gen(99);
  for (int i = 0; i < 1000; ++i) {
    const FieldConfig field(gen.prime());
    const KElement x = gen.element(field);
    const KElement y = gen.element(field);
    const std::string tag = "case " + std::to_string(i) + ": ";
    const ValExp vx = x.valuation();
    const ValExp vy = y.valuation();
    out.require(vx == oracle::valuation(x), tag + "valuation disagrees with the oracle");
    const ValExp vs = (x + y).valuation();
    out.require(vs >= min(vx, vy), tag + "ultrametric inequality");
    if (vx != vy) out.require(vs == min(vx, vy), tag + "no equality for distinct valuations");
    out.require((x * y).valuation() == vx + vy, tag + "valuation not multiplicative");
    if (!x.is_zero()) {
      const KElement inv = x.inverse();
      out.require(x * inv == KElement(field, 1), tag + "x * x^-1 != 1");
      out.require(inv.inverse() == x, tag + "inverse not an involution");
      out.require(inv.valuation() == -vx, tag + "v(1/x) != -v(x)");
    }
  }
  return out;
}

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& run, double limit_s = 0) {
  const auto t0 = Clock::now();
  Outcome out;
  try {
    out = run();
  } catch (const std::exception& e) {
    out.fail(std::string("exception: ") + e.what());
  }
  const double s = seconds_since(t0);
  if (limit_s > 0 && s >= limit_s) {
    std::ostringstream why;
    why << "took " << s << " s, limit " << limit_s << " s";
    out.fail(why.str());
  }
  if (!out.ok) ++failures;
  std::printf("%s %d %s (%.2f s)%s%s\n", out.ok ? "PASS" : "FAIL", id, name.c_str(), s, out.ok ? "" : ": ",
              out.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  report(1, "example 2: plan, certificate and exact images", example_two, 5);
  report(2, "example 1: F'(0) closed form and classification", example_one, 5);
  std::size_t points = 0;
  report(3, "kernel bounds on 50 random instances", [&] { return kernel_bounds(points); });
  std::printf("  %zu sample points checked\n", points);

  oracle::Generator gen(314159);
  std::vector<Instance> suite;
  for (int i = 0; i < 100; ++i) suite.push_back(random_instance(gen));
  report(4, "gluing certificate on 100 random instances", [&] { return gluing_suite(suite); }, 120);
  std::size_t checked = 0;
  report(5, "planner minimality over the random suite", [&] { return minimality(suite, checked); });
  std::printf("  %zu entries with M > 1 checked\n", checked);
  report(6, "eps/p plans certify at eps (25 instances)", [&] { return monotonicity(suite); });
  std::size_t instances = 0;
  report(7, "fixed point census and attracting orbits", [&] { return fixed_point_suite(instances); });
  report(8, "root counts against brute force (200 polynomials)", root_counts);
  report(9, "field axioms (1000 cases)", field_axioms);
  return failures == 0 ? 0 : 1;
}
