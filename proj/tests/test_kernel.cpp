#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "oracles.hpp"
#include "stagpoint/error.hpp"
#include "stagpoint/kernel.hpp"
#include "stagpoint/presets.hpp"

using namespace stagpoint;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("jacobian") {
  CHECK(jacobian(example2(), 0.0, 1.0) == 0.0);
  CHECK(jacobian(example1(), 0.5, 2.0) == Approx(1.5).epsilon(1e-15));
  for (double a : {0.0, 0.1, 0.5, 0.93}) {
    CHECK(jacobian(example1(), a, 0.0) == 1.0);
    CHECK(jacobian(example2(), a, 0.0) == 1.0);
  }
}

TEST_CASE("gap-based jacobian agrees with the direct form away from the maximizers") {
  const InitialDatum d = example1();
  const Kernel k(d, critical_profile(d));
  const EtaPoint p = k.at_eta(1.3);
  for (double a : {0.2, 0.5, 0.8}) CHECK(k.jacobian(a, p) == Approx(jacobian(d, a, 1.3)).epsilon(1e-14));
  // Near alpha = 0, J(h) = g M0 + eta * 3 h (1 - h) exactly.
  const EtaPoint q = k.at_gap(1e-12);
  const double h = 1e-9;
  const double exact = 1e-12 * 0.5 + q.eta * (3.0 * h - 3.0 * h * h);
  CHECK(k.jacobian(h, q) == Approx(exact).epsilon(1e-9));
}

TEST_CASE("kbar closed forms") {
  const InitialDatum e2 = example2();
  const CriticalProfile p2 = critical_profile(e2);
  CHECK(kbar(e2, p2, 0.6, 1) == Approx(1.25).epsilon(1e-12));
  CHECK(kbar(e2, p2, 0.6, 2) == Approx(1.953125).epsilon(1e-12));
  const InitialDatum e1 = example1();
  const CriticalProfile p1 = critical_profile(e1);
  CHECK(kbar(e1, p1, 1.0, 1) == Approx(oracle::ex1_kbar0(1.0)).epsilon(1e-12));
  CHECK(kbar(e1, p1, 1.0, 1) == Approx(1.065).epsilon(1e-3));
  const InitialDatum z = zero_datum();
  const CriticalProfile pz = critical_profile(z);
  for (int b : {1, 2})
    for (double eta : {0.0, 0.5, 7.0, 1e6}) CHECK(kbar(z, pz, eta, b) == 1.0);
  CHECK(kbar(e1, p1, 0.0, 1) == Approx(1.0).epsilon(1e-15));
  CHECK(kbar(e1, p1, 0.0, 2) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("kbar deep in the gap") {
  const InitialDatum e1 = example1();
  const Kernel k1(e1, critical_profile(e1));
  for (double g : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
    CAPTURE(g);
    CHECK(k1.value(k1.at_gap(g)).kbar0 == Approx(oracle::ex1_kbar0_gap(g)).epsilon(1e-10));
  }
  const InitialDatum e2 = example2();
  const Kernel k2(e2, critical_profile(e2));
  for (double g : {1e-2, 1e-5, 1e-8, 1e-11}) {
    CAPTURE(g);
    // 1 - eta^2 = g (2 - g)
    const double exact0 = 1.0 / std::sqrt(g * (2.0 - g));
    const KernelValue v = k2.value(k2.at_gap(g));
    CHECK(v.kbar0 == Approx(exact0).epsilon(1e-10));
    CHECK(v.kbar1 == Approx(exact0 * exact0 * exact0).epsilon(1e-10));
  }
}

TEST_CASE("moment l is the eta derivative of kbar0") {
  const InitialDatum e1 = example1();
  const Kernel k(e1, critical_profile(e1));
  for (double eta : {0.3, 1.0, 1.7}) {
    CAPTURE(eta);
    CHECK(k.moments(k.at_eta(eta)).l == Approx(oracle::ex1_dkbar0(eta)).epsilon(1e-8));
  }
}

TEST_CASE("kbar against the midpoint oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 0.9);
  for (const auto& name : {"example1", "example2", "order3", "quadratic", "power1.5"}) {
    const InitialDatum d = preset(name);
    const CriticalProfile p = critical_profile(d);
    const double eta = u(rng) * p.eta_star;
    for (int b : {1, 2}) {
      CAPTURE(name);
      CAPTURE(eta);
      CHECK(std::abs(kbar(d, p, eta, b) - oracle::midpoint_kbar(d, eta, b, 200000)) < 1e-8);
    }
  }
}

TEST_CASE("kbar error paths") {
  const InitialDatum e2 = example2();
  const CriticalProfile p = critical_profile(e2);
  CHECK(code_of([&] { kbar(e2, p, 1.0, 1); }) == ErrorCode::SingularEta);
  CHECK(code_of([&] { kbar(e2, p, 1.5, 2); }) == ErrorCode::SingularEta);
  CHECK(code_of([&] { kbar(e2, p, -0.1, 1); }) == ErrorCode::DomainError);
  const Kernel k(e2, p);
  CHECK(code_of([&] { k.at_gap(0.0); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { k.at_gap(2.0); }) == ErrorCode::DomainError);
  // A budget far below what the tolerance needs.
  const InitialDatum e1 = example1();
  const Kernel tight(e1, critical_profile(e1), KernelOptions{1e-15, 60});
  try {
    tight.value(tight.at_gap(1e-9));
    FAIL("expected QuadratureBudgetExceeded");
  } catch (const QuadratureBudgetExceeded& e) {
    CHECK(e.error_estimate > 0.0);
    CHECK(e.best_estimate == Approx(oracle::ex1_kbar0_gap(1e-9)).epsilon(1e-6));
  }
}

TEST_CASE("beta integral") {
  CHECK(beta_integral(0.5, 0.5) == Approx(oracle::pi).epsilon(1e-14));
  CHECK(beta_integral(1.0, 1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(beta_integral(0.5, 1.5) == Approx(oracle::pi / 2.0).epsilon(1e-14));
  for (double p : {0.25, 1.0 / 3.0, 0.5, 2.0, 3.5})
    for (double s : {0.2, 0.75, 1.0, 4.0}) {
      const double lhs = beta_integral(p, s) * std::tgamma(p + s);
      CHECK(lhs == Approx(std::tgamma(p) * std::tgamma(s)).epsilon(1e-12));
      // Independent: int_0^1 x^(p-1) (1-x)^(s-1) by tanh-sinh.
      boost::math::quadrature::tanh_sinh<double> ts;
      const double direct =
          ts.integrate([&](double x, double xc) { return std::pow(x, p - 1) * std::pow(xc > 0 ? xc : 1 - x, s - 1); },
                       0.0, 1.0);
      CHECK(beta_integral(p, s) == Approx(direct).epsilon(1e-9));
    }
  CHECK(code_of([] { beta_integral(0.0, 1.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { beta_integral(1.0, -2.0); }) == ErrorCode::DomainError);
}

TEST_CASE("asymptotic rates for Example 2") {
  const CriticalProfile p = critical_profile(example2());
  const RateModel r0 = asymptotic_rates(p, 1);
  CHECK(r0.exponent == Approx(-0.5));
  CHECK(r0.constant == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(!r0.log_correction());
  const RateModel r1 = asymptotic_rates(p, 2);
  CHECK(r1.exponent == Approx(-1.5));
  CHECK(r1.constant == Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(r1.constant / r0.constant == Approx(0.5).epsilon(1e-12));
  // Taylor expansion of (1 - eta^2)^(-1/2) = (g (2 - g))^(-1/2).
  for (double g : {1e-6, 1e-8}) CHECK(r0.evaluate(g) == Approx(1.0 / std::sqrt(g * (2.0 - g))).epsilon(1e-6));
}

TEST_CASE("asymptotic rates for Example 1") {
  const CriticalProfile p = critical_profile(example1());
  const RateModel r0 = asymptotic_rates(p, 1);
  CHECK(r0.log_correction());
  CHECK(r0.exponent == 0.0);
  // Each wall contributes M0/|C1| = 1/6 from its one-sided neighbourhood; the closed form has 1/3.
  CHECK(r0.constant == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(log_law_coefficient(p) == Approx(1.0 / 3.0).epsilon(1e-14));
  const double g = 1e-12;
  CHECK(r0.evaluate(g) / oracle::ex1_kbar0_gap(g) == Approx(1.0).epsilon(0.05));
  const RateModel r1 = asymptotic_rates(p, 2);
  CHECK(r1.exponent == Approx(-1.0));
  CHECK(r1.constant == Approx(2.0 / 3.0).epsilon(1e-14));
  const Kernel k(example1(), p);
  CHECK(1e-9 * k.value(k.at_gap(1e-9)).kbar1 == Approx(2.0 / 3.0).epsilon(1e-7));
  const double eta = 2.0 - 1e-3;
  const auto f = [&](double a) { return std::pow(jacobian(example1(), a, eta), -2); };
  const double direct = oracle::integrate(f, 0.0, 0.01) + oracle::integrate(f, 0.01, 0.99) + oracle::integrate(f, 0.99, 1.0);
  CHECK(k.value(k.at_gap(1e-3)).kbar1 == Approx(direct).epsilon(1e-10));
}

TEST_CASE("rate-model log coefficient in the gap variable") {
  // kbar0 is a function of eta; in g = eta* - eta the closed form gives
  // kbar0 ~ -(1/r*) 2 ln g with r* = sqrt(3 eta* (4 + eta*)) = 6, i.e. -(1/3) ln g.
  for (double g : {1e-6, 1e-9, 1e-12}) {
    CAPTURE(g);
    const double slope = (oracle::ex1_kbar0_gap(g) - oracle::ex1_kbar0_gap(g * 10.0)) / std::log(0.1);
    CHECK(slope == Approx(-1.0 / 3.0).epsilon(1e-4));
  }
}

TEST_CASE("gamma constants") {
  const double two_pi2 = 2.0 * oracle::pi * oracle::pi;
  CHECK(c2_constant(1, 1.0, two_pi2) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  for (int k : {1, 3, 5})
    for (double m0 : {0.5, 1.0, 2.0})
      for (double c1 : {1.0, two_pi2, 7.5}) {
        const double ratio = c3_constant(k, m0, c1) / c2_constant(k, m0, c1);
        CHECK(std::abs(ratio - k / (m0 * (1.0 + k))) <= 1e-12 * k / (m0 * (1.0 + k)));
      }
  // rate_constant against the two-sided model integral of (M0 g + (|C1|/M0) h^p)^-b, which is exactly
  // rate_constant * g^(1/p - b).
  for (double p : {1.0, 2.0, 4.0, 1.5})
    for (int b : {1, 2}) {
      if (b - 1.0 / p <= 0.0) continue;
      const double c1 = 3.0, m0 = 0.8, g = 1e-3;
      boost::math::quadrature::exp_sinh<double> es;
      const double direct = 2.0 * es.integrate([&](double h) { return std::pow(m0 * g + c1 / m0 * std::pow(h, p), -b); });
      CAPTURE(p);
      CAPTURE(b);
      CHECK(direct == Approx(rate_constant(m0, c1, p, b) * std::pow(g, 1.0 / p - b)).epsilon(1e-9));
    }
  CHECK(code_of([] { rate_constant(1.0, 1.0, 1.0, 1); }) == ErrorCode::DomainError);
}

TEST_CASE("asymptotic rates errors") {
  CHECK(code_of([] { asymptotic_rates(critical_profile(zero_datum()), 1); }) == ErrorCode::NonpositiveMax);
  CHECK(code_of([] { asymptotic_rates(critical_profile(example2()), 3); }) == ErrorCode::InvalidInput);
  const RateModel frac = asymptotic_rates(critical_profile(power_datum(1.5)), 1);
  CHECK(frac.extension);
  CHECK(frac.exponent == Approx(1.0 / 1.5 - 1.0));
}

TEST_CASE("kernel copies are independent") {
  const InitialDatum d = synthetic_order(5);
  Kernel a(d, critical_profile(d));
  const Kernel b = a;
  const EtaPoint p = b.at_gap(1e-9);
  CHECK(a.value(p).kbar0 == b.value(p).kbar0);
}
