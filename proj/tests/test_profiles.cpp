#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fgp/profiles.hpp"

using namespace fgp;

TEST_CASE("gamma evaluation matches closed forms") {
  const auto pw = VarianceProfile::power(0.5);
  CHECK(gamma_eval(pw, 0.25) == doctest::Approx(0.5));
  CHECK(gamma_eval(pw, 0.0) == 0.0);

  const auto lb = VarianceProfile::logbm(1.0);
  CHECK(gamma_eval(lb, std::exp(-10.0)) == doctest::Approx(0.1));

  const auto se = VarianceProfile::stretched_exp(0.5);
  CHECK(gamma_eval(se, std::exp(-4.0)) == doctest::Approx(std::exp(-2.0)));

  CHECK_THROWS_AS(gamma_eval(lb, 0.5), std::domain_error);
  CHECK_THROWS_AS(gamma_eval(pw, -0.1), std::domain_error);
}

TEST_CASE("gamma is strictly increasing on a dense probe grid") {
  const VarianceProfile profiles[] = {
      VarianceProfile::power(0.3), VarianceProfile::power(1.0),
      VarianceProfile::logbm(0.75), VarianceProfile::stretched_exp(0.7),
      VarianceProfile::power_log(0.4, 1.0), VarianceProfile::power_log(0.4, -1.0)};
  for (const auto& p : profiles) {
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double x = p.domain_max * double(i) / 400.0;
      const double g = gamma_eval(p, x);
      CHECK(g > prev);
      prev = g;
    }
  }
}

TEST_CASE("inverse round-trips within 1e-8 relative") {
  const VarianceProfile profiles[] = {
      VarianceProfile::power(0.5), VarianceProfile::logbm(1.0),
      VarianceProfile::stretched_exp(0.5), VarianceProfile::power_log(0.4, 0.7)};
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& p : profiles) {
    // v restricted to values whose preimage does not underflow the double range
    const double vlo = gamma_eval_logx(p, std::log(1e-300));
    const double vmax = gamma_eval(p, p.domain_max);
    for (int i = 0; i < 100; ++i) {
      const double v = vlo + (vmax - vlo) * u(gen);
      const double x = gamma_inverse(p, v);
      CHECK(std::abs(gamma_eval(p, x) - v) <= 1e-8 * v);
    }
  }
  CHECK(gamma_inverse(VarianceProfile::power(0.5), 0.5) == doctest::Approx(0.25));
  CHECK(gamma_inverse(VarianceProfile::logbm(1.0), 0.1) ==
        doctest::Approx(std::exp(-10.0)));
  CHECK_THROWS_AS(gamma_inverse(VarianceProfile::power(0.5), 1.5),
                  std::out_of_range);
}

TEST_CASE("tabulated profile: bisection inverse validated by re-evaluation") {
  std::vector<double> xs, gs;
  for (int i = 0; i <= 40; ++i) {
    const double x = std::pow(10.0, -8.0 + 8.0 * i / 40.0);
    xs.push_back(x);
    gs.push_back(std::pow(x, 0.6));
  }
  const auto tab = VarianceProfile::tabulated(xs, gs);
  for (double v : {1e-4, 1e-2, 0.3, 0.9}) {
    const double x = gamma_inverse(tab, v);
    CHECK(std::abs(gamma_eval(tab, x) - v) <= 1e-10 * v);
  }
}

TEST_CASE("dgamma_squared against symbolic and finite-difference oracles") {
  // Brownian kernel: (x^{2H})' with H=1/2 is identically 1
  const auto bm = VarianceProfile::power(0.5);
  CHECK(dgamma_squared(bm, 0.3) == doctest::Approx(1.0));
  CHECK(dgamma_squared(bm, 0.0) == doctest::Approx(1.0));

  // logbm beta=1: (log^{-2}(1/x))' = 2/(x log^3(1/x)); at x=e^{-2} equals e^2/4
  const auto lb = VarianceProfile::logbm(1.0, 0.3);
  CHECK(dgamma_squared(lb, std::exp(-2.0)) ==
        doctest::Approx(std::exp(2.0) / 4.0));

  // stretched_exp: analytic derivative agrees with central finite differences
  const auto se = VarianceProfile::stretched_exp(0.5);
  for (double x : {1e-4, 1e-2, 0.2}) {
    const double h = 1e-6 * x;
    const double fd = (gamma_sq(se, x + h) - gamma_sq(se, x - h)) / (2.0 * h);
    CHECK(dgamma_squared(se, x) == doctest::Approx(fd).epsilon(1e-6));
  }

  CHECK(std::isinf(dgamma_squared(VarianceProfile::power(0.3), 0.0)));
}

TEST_CASE("chaining integral asymptotics per scale family") {
  // power: I(x)/gamma(x) stays below log^{-1/2}(2)/alpha
  for (double alpha : {0.3, 0.5, 0.8}) {
    const auto p = VarianceProfile::power(alpha);
    const double ratio = chaining_integral(p, 1e-6) / gamma_eval(p, 1e-6);
    CHECK(ratio <= 1.3 / alpha);
    CHECK(ratio > 0.0);
  }
  // logbm: I(x)/gamma(x) grows like sqrt(log(1/x))
  {
    const auto p = VarianceProfile::logbm(1.0);
    const double r1 = chaining_integral(p, 1e-4) / gamma_eval(p, 1e-4);
    const double r2 = chaining_integral(p, 1e-8) / gamma_eval(p, 1e-8);
    CHECK(r2 > r1);
  }
  // stretched_exp q=1/2: I(x) <= 2 gamma sqrt(N log(1/x)) + c(q) gamma with
  // N=2 and c(1/2)=4 (from (1+u)^{1/2} >= 1 + u^{1/2}/2 for u >= 2)
  {
    const auto p = VarianceProfile::stretched_exp(0.5);
    for (double x : {1e-4, 1e-6, 1e-8, 1e-10}) {
      const double g = gamma_eval(p, x);
      const double bound = 2.0 * g * std::sqrt(2.0 * std::log(1.0 / x)) + 4.0 * g;
      CHECK(chaining_integral(p, x) <= bound);
    }
  }
}

TEST_CASE("quadrature consistency: halving tolerance is a <1e-3 change") {
  const VarianceProfile profiles[] = {VarianceProfile::power(0.4),
                                      VarianceProfile::logbm(0.75),
                                      VarianceProfile::stretched_exp(0.5)};
  for (const auto& p : profiles) {
    const double a = chaining_integral(p, 1e-5, 1e-5);
    const double b = chaining_integral(p, 1e-5, 5e-6);
    CHECK(std::abs(a - b) < 1e-3 * std::abs(b));
  }
}

TEST_CASE("f_gamma scaling") {
  {
    const auto p = VarianceProfile::power(0.5);
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double fr = f_gamma(p, r);
      CHECK(fr / r >= 0.1);
      CHECK(fr / r <= 10.0);
    }
  }
  {
    // logbm beta=1: f_gamma(r) ~ r sqrt(log(1/gamma^{-1}(sqrt(2) r))) ~ c sqrt(r)
    const auto p = VarianceProfile::logbm(1.0);
    for (double r : {1e-2, 1e-3, 1e-4}) {
      const double fr = f_gamma(p, r);
      CHECK(fr / std::sqrt(r) > 0.3);
      CHECK(fr / std::sqrt(r) < 6.0);
    }
  }
  {
    const auto p = VarianceProfile::stretched_exp(0.5);
    double prev = 1e300;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double fr = f_gamma(p, r);
      CHECK(fr < prev);
      prev = fr;
    }
    CHECK(prev > 0.0);
  }
}

TEST_CASE("index estimates bracket the scale families") {
  std::vector<double> probes;
  for (int k = 2; k <= 12; ++k) probes.push_back(std::pow(10.0, -k));

  const auto est = estimate_indexes(VarianceProfile::power(0.7), probes);
  CHECK(est.lower_index == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(est.upper_index == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(est.lower_index <= est.upper_index);

  const auto lb =
      estimate_indexes(VarianceProfile::logbm(1.0), {4e-12, 2e-12, 1e-12});
  CHECK(lb.upper_index < 0.05);

  const auto se = estimate_indexes(VarianceProfile::stretched_exp(0.5),
                                   {4e-12, 2e-12, 1e-12});
  CHECK(se.upper_index < 0.1);

  // both families drift to zero index as the probes shrink
  const auto lb_hi = estimate_indexes(VarianceProfile::logbm(1.0),
                                      {1e-4, 1e-5, 1e-6});
  CHECK(lb.upper_index < lb_hi.upper_index);

  CHECK_THROWS_AS(estimate_indexes(VarianceProfile::power(0.5), {1e-2, 1e-3}),
                  std::invalid_argument);
}

TEST_CASE("condition table: C0 / C_eps / C0+ verdicts") {
  // power alpha=0.5 satisfies C0
  {
    const auto rep = check_condition(VarianceProfile::power(0.5), ConditionId::C0);
    CHECK(rep.verdict == Verdict::holds);
  }
  // logbm beta=1 fails C0; the C_eps transition sits at eps = 1/(2 beta) = 0.5
  {
    const auto p = VarianceProfile::logbm(1.0);
    CHECK(check_condition(p, ConditionId::C0).verdict == Verdict::fails);
    const double eps_star = condition_transition_eps(p);
    CHECK(eps_star == doctest::Approx(0.5).epsilon(0.1));
    ConditionParams prm;
    prm.eps = 0.7;
    CHECK(check_condition(p, ConditionId::C_eps, prm).verdict == Verdict::holds);
    prm.eps = 0.3;
    CHECK(check_condition(p, ConditionId::C_eps, prm).verdict == Verdict::fails);
  }
  // stretched_exp q=0.5 satisfies C0+ (all four eps probes) but, as a
  // zero-index slowly varying scale, fails C0 itself
  {
    const auto se = VarianceProfile::stretched_exp(0.5);
    CHECK(check_condition(se, ConditionId::C0_plus).verdict == Verdict::holds);
    CHECK(check_condition(se, ConditionId::C0).verdict == Verdict::fails);
  }
}

TEST_CASE("condition lattice: C0 implies C_eps and matches bounded C_ell") {
  const auto p = VarianceProfile::power(0.5);
  for (double eps : {0.05, 0.1, 0.2, 0.5}) {
    ConditionParams prm;
    prm.eps = eps;
    CHECK(check_condition(p, ConditionId::C_eps, prm).verdict == Verdict::holds);
  }
  // C_ell with constant ell is C0
  ConditionParams cl;
  cl.ell = SlowlyVarying{0.0};
  CHECK(check_condition(p, ConditionId::C_ell, cl).verdict == Verdict::holds);
  CHECK(check_condition(VarianceProfile::logbm(1.0), ConditionId::C_ell, cl)
            .verdict == Verdict::fails);
}

TEST_CASE("C_ell with matched modulation") {
  // gamma_q satisfies C_ell with ell(y) = log^{1/(2q)}(1/y)
  const auto se = VarianceProfile::stretched_exp(0.5);
  ConditionParams prm;
  prm.ell = SlowlyVarying{1.0};
  CHECK(check_condition(se, ConditionId::C_ell, prm).verdict == Verdict::holds);
  // logbm diverges against the sqrt-log modulation
  prm.ell = SlowlyVarying{0.5};
  CHECK(check_condition(VarianceProfile::logbm(1.0), ConditionId::C_ell, prm)
            .verdict == Verdict::fails);
}

TEST_CASE("Hyp2 and concavity hold for the catalog profiles") {
  for (const auto& p : {VarianceProfile::power(0.5), VarianceProfile::logbm(1.0),
                        VarianceProfile::stretched_exp(0.5)}) {
    CHECK(check_condition(p, ConditionId::Hyp2).verdict == Verdict::holds);
    CHECK(check_condition(p, ConditionId::concavity).verdict == Verdict::holds);
  }
}

TEST_CASE("modulus of continuity Phi_gamma") {
  // logbm: Phi(r) = O(log^{-(beta-1/2)}(1/r))
  {
    const auto p = VarianceProfile::logbm(1.0);
    for (double r : {1e-3, 1e-6, 1e-9}) {
      const double v = modulus_phi(p, r) * std::sqrt(std::log(1.0 / r));
      CHECK(v < 5.0);
      CHECK(v > 0.5);
    }
  }
  // power: Phi(r)/(gamma(r) sqrt(log(1/r))) tends to a bounded constant
  {
    const auto p = VarianceProfile::power(0.5);
    for (double r : {1e-3, 1e-6, 1e-9}) {
      const double v =
          modulus_phi(p, r) / (gamma_eval(p, r) * std::sqrt(std::log(1.0 / r)));
      CHECK(v < 3.0);
      CHECK(v >= 1.0);
    }
  }
  // finite positive at mid-domain for any profile
  for (const auto& p : {VarianceProfile::power(0.8), VarianceProfile::logbm(0.75),
                        VarianceProfile::stretched_exp(0.3)}) {
    const double v = modulus_phi(p, p.domain_max / 2.0);
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("profile text records round-trip") {
  const auto p = profile_from_record("kind=logbm; beta=1.0; domain_max=0.3; l=2.0");
  CHECK(p.kind == ProfileKind::logbm);
  CHECK(p.beta == doctest::Approx(1.0));
  CHECK(p.l_factor == doctest::Approx(2.0));
  for (const auto& q :
       {VarianceProfile::power(0.37), VarianceProfile::logbm(0.85),
        VarianceProfile::stretched_exp(0.21), VarianceProfile::power_log(0.4, 1.3)}) {
    const auto r = profile_from_record(to_record(q));
    CHECK(r.kind == q.kind);
    CHECK(gamma_eval(r, r.domain_max / 3.0) ==
          doctest::Approx(gamma_eval(q, q.domain_max / 3.0)));
  }
  CHECK_THROWS_AS(profile_from_record("kind=nope"), std::invalid_argument);
  CHECK(profile_catalog().find("logbm") != std::string::npos);
  CHECK(profile_catalog().find("beta>0.5") != std::string::npos);
}
