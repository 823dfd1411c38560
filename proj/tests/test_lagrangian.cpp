#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <random>

#include "oracles.hpp"
#include "random_data.hpp"
#include "stagpoint/error.hpp"
#include "stagpoint/lagrangian.hpp"
#include "stagpoint/presets.hpp"

using namespace stagpoint;
using doctest::Approx;

namespace {

EtaTimeMap map_of(const InitialDatum& d) { return build_map(d, critical_profile(d)); }

// gamma_alpha without the position integral that flow_map also computes.
double gamma_alpha(const EtaTimeMap& m, const TimeSlice& s, double a) {
  return 1.0 / (m.kernel().jacobian(a, s.point) * s.moments.k0);
}

// eta(t) for Example 1 from the closed-form integral.
double ex1_eta(double t) {
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve([t](double e) { return oracle::ex1_t(e) - t; }, 0.0, 2.0 - 1e-12,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

// u_x along the trajectory for Example 1 built from closed-form pieces only.
double ex1_ux(double alpha, double eta) {
  const double k0 = oracle::ex1_kbar0(eta);
  const double l = oracle::ex1_dkbar0(eta);
  const double s = 0.5 - 3.0 * alpha + 3.0 * alpha * alpha;
  return (s / (1.0 - eta * s) - l / k0) / (k0 * k0);
}

}  // namespace

TEST_CASE("Example 2 closed form along trajectories") {
  const EtaTimeMap m = map_of(example2());
  CHECK(ux_along(m, 0.25, 1.0) == Approx(-std::tanh(1.0)).epsilon(1e-12));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double a = u(rng), t = 10.0 * u(rng);
    CAPTURE(a);
    CAPTURE(t);
    CHECK(ux_along(m, a, t) == Approx(oracle::ex2_ux(a, t)).epsilon(1e-9).scale(1.0));
  }
  for (double t : {0.0, 0.5, 3.0, 9.0}) {
    CHECK(ux_along(m, 0.0, t) == Approx(1.0).epsilon(1e-12));
    CHECK(uxxx_along(m, 0.0, t) == Approx(-4.0 * oracle::pi * oracle::pi).epsilon(1e-12));
    const Extrema e = extrema(m, t);
    CHECK(e.M == Approx(1.0).epsilon(1e-10));
    CHECK(e.m == Approx(-1.0).epsilon(1e-10));
    CHECK(e.M_scan <= e.M + 1e-12);
    CHECK(nonlocal_term(m, t) == Approx(-1.0).epsilon(1e-10));
  }
}

TEST_CASE("initial slice reproduces the datum") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 8; ++i) {
    const InitialDatum d = testdata::random_datum(rng);
    const EtaTimeMap m = map_of(d);
    const TimeSlice s = time_slice(m, 0.0);
    for (int j = 0; j < 10; ++j) {
      const double a = u(rng);
      CHECK(std::abs(ux_along(m, s, a) - d.slope(a)) <= 1e-12 * std::max(1.0, std::abs(d.slope(a))));
      CHECK(uxx_along(m, s, a) == Approx(d.derivative(a, 2)).epsilon(1e-13));
      CHECK(flow_map(m, s, a).gamma == Approx(a).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero datum") {
  const EtaTimeMap m = map_of(zero_datum());
  for (double t : {0.0, 1.0, 30.0}) {
    const FlowPoint f = flow_map(m, 0.37, t);
    CHECK(f.gamma == Approx(0.37).epsilon(1e-15));
    CHECK(f.gamma_alpha == 1.0);
    CHECK(ux_along(m, 0.6, t) == 0.0);
    const Extrema e = extrema(m, t);
    CHECK(e.M == 0.0);
    CHECK(e.m == 0.0);
    CHECK(nonlocal_term(m, t) == 0.0);
    CHECK(!std::signbit(nonlocal_term(m, t)));
  }
}

TEST_CASE("Example 1 against closed-form kernels") {
  const EtaTimeMap m = map_of(example1());
  for (double t : {0.5, 1.0, 2.0}) {
    const double eta = ex1_eta(t);
    CAPTURE(t);
    CHECK(eta_of_t(m, t) == Approx(eta).epsilon(1e-11));
    for (double a : {0.0, 0.25, 0.5, 0.8}) CHECK(ux_along(m, a, t) == Approx(ex1_ux(a, eta)).epsilon(1e-7));
  }
  // u_xx at (1/4, 1): u0''(1/4) / (J K0)
  const double eta = ex1_eta(1.0);
  const double j = 1.0 - eta * (0.5 - 0.75 + 3.0 / 16.0);
  CHECK(uxx_along(m, 0.25, 1.0) == Approx(-1.5 / (j * oracle::ex1_kbar0(eta))).epsilon(1e-10));
  CHECK(flow_map(m, 1.0, 2.0).gamma == 1.0);
  CHECK(flow_map(m, 0.0, 2.0).gamma == 0.0);
}

TEST_CASE("Example 1 extrema at t = 2.5 and 2.8") {
  const EtaTimeMap m = map_of(example1());
  const double eta = ex1_eta(2.5);
  const Extrema e = extrema(m, 2.5);
  CHECK(e.M == Approx(ex1_ux(0.0, eta)).epsilon(1e-6));
  CHECK(e.M == Approx(3.8722).epsilon(1e-4));
  CHECK(e.m == Approx(ex1_ux(0.5, eta)).epsilon(1e-6));
  CHECK(extrema(m, 2.7).M > 10.0);
  CHECK(extrema(m, 2.8).M > 100.0);
}

TEST_CASE("Example 1 trajectories diverge with opposite signs") {
  const EtaTimeMap m = map_of(example1());
  double prev_max = 0.0, prev_min = 0.0;
  for (double g : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
    const TimeSlice s = time_slice_at(m, m.kernel().at_gap(g));
    const double up = ux_along(m, s, 0.0), down = ux_along(m, s, 0.5);
    CAPTURE(g);
    CHECK(up > prev_max);
    CHECK(down < prev_min);
    CHECK(ux_along(m, s, 1.0) == Approx(up).epsilon(1e-12));
    prev_max = up;
    prev_min = down;
  }
  CHECK(prev_max > 1e8);
  CHECK(prev_min < -1e5);
}

TEST_CASE("beyond blowup") {
  const EtaTimeMap m = map_of(example1());
  CHECK_THROWS_AS(ux_along(m, 0.3, 3.0), Error);
  CHECK_THROWS_AS(flow_map(m, 0.3, m.t_star()), Error);
  CHECK_THROWS_AS(extrema(m, 2.9), Error);
}

TEST_CASE("normalisation, zero mean, concavity and monotone flow on random data") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const InitialDatum d = testdata::random_datum(rng);
    const EtaTimeMap m = map_of(d);
    const double top = m.finite_blowup() ? 0.8 * m.t_star() : 5.0;
    const double t = top * u(rng);
    const TimeSlice s = time_slice(m, t);
    CAPTURE(i);
    CAPTURE(t);
    std::vector<double> cuts;
    for (const auto& mx : m.profile().maximizers) cuts.push_back(mx.alpha_bar);
    const double mass = oracle::integrate_peaks([&](double a) { return gamma_alpha(m, s, a); }, 0.0, 1.0, cuts);
    CHECK(std::abs(mass - 1.0) < 1e-8);
    const double mean = oracle::integrate_peaks(
        [&](double a) { return ux_along(m, s, a) * gamma_alpha(m, s, a); }, 0.0, 1.0, cuts);
    CHECK(std::abs(mean) < 1e-8);
    double last = -1.0;
    for (int j = 0; j <= 50; ++j) {
      const double a = j / 50.0;
      const LagrangianSample p = sample(m, s, a);
      CHECK(p.gamma > last);
      last = p.gamma;
      CHECK(p.gamma_alpha > 0.0);
      CHECK(p.uxx == Approx(d.derivative(a, 2) * p.gamma_alpha).epsilon(1e-12));
      if (std::abs(d.derivative(a, 2)) > 1e-12) CHECK(std::signbit(p.uxx) == std::signbit(d.derivative(a, 2)));
    }
    CHECK(flow_map(m, s, 1.0).gamma - flow_map(m, s, 0.0).gamma == Approx(1.0).epsilon(1e-12));
    // gamma agrees with the integral of gamma_alpha.
    const double a = u(rng);
    const double direct = oracle::integrate_peaks([&](double b) { return gamma_alpha(m, s, b); }, 0.0, a, cuts);
    CHECK(flow_map(m, s, a).gamma == Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("nonlocal term equals the label integral of u_x^2") {
  for (const auto& name : {"example1", "order3", "quadratic", "power1.5"}) {
    CAPTURE(name);
    const EtaTimeMap m = map_of(preset(name));
    const TimeSlice s = time_slice(m, 1.0);
    const double direct = -2.0 * oracle::integrate(
                                     [&](double a) {
                                       const double v = ux_along(m, s, a);
                                       return v * v * gamma_alpha(m, s, a);
                                     },
                                     0.0, 1.0);
    CHECK(nonlocal_term(s) == Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("global limits") {
  // k = 1: Example 2 approaches +1 at the maximizer and -1 elsewhere.
  const EtaTimeMap e2 = map_of(example2());
  CHECK(ux_along(e2, 0.3, 12.0) == Approx(-1.0).epsilon(1e-9));
  // k = 3: M and the off-maximizer value decay like g^(1/2).
  const EtaTimeMap o3 = map_of(synthetic_order(3));
  const auto at = [&](double g, double a) { return ux_along(o3, time_slice_at(o3, o3.kernel().at_gap(g)), a); };
  const double slope_M = std::log(at(1e-6, 0.5) / at(1e-8, 0.5)) / std::log(100.0);
  CHECK(slope_M == Approx(0.5).epsilon(0.02));
  const double slope_off = std::log(at(1e-6, 0.1) / at(1e-8, 0.1)) / std::log(100.0);
  CHECK(at(1e-8, 0.1) < 0.0);
  CHECK(slope_off == Approx(0.5).epsilon(0.02));
}

TEST_CASE("Eulerian slices") {
  const EtaTimeMap e2 = map_of(example2());
  const FieldSlice s0 = eulerian_slice(e2, 0.0, 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(s0.ux_values[i] == Approx(std::cos(2.0 * oracle::pi * s0.x_grid[i])).epsilon(1e-12).scale(1.0));
  // u0 = sin(2 pi a) / (2 pi) is a steady state, so the Eulerian field stays cos(2 pi x).
  const FieldSlice s5 = eulerian_slice(e2, 5.0, 101);
  for (std::size_t i = 0; i < s5.x_grid.size(); ++i)
    CHECK(s5.ux_values[i] == Approx(std::cos(2.0 * oracle::pi * s5.x_grid[i])).epsilon(1e-8).scale(1.0));
  CHECK(s5.I == Approx(-1.0).epsilon(1e-10));

  const EtaTimeMap e1 = map_of(example1());
  const FieldSlice s = eulerian_slice(e1, 2.5, 101);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < s.ux_values.size(); ++i)
    if (s.ux_values[i] > s.ux_values[arg]) arg = i;
  CHECK((arg == 0 || arg == 100));
  CHECK(s.ux_values.front() == Approx(s.ux_values.back()).epsilon(1e-12));
  CHECK(s.M == Approx(extrema(e1, 2.5).M).epsilon(1e-12));
  for (std::size_t i = 0; i < s.x_grid.size(); ++i)
    CHECK(flow_map(e1, time_slice(e1, 2.5), s.labels[i]).gamma == Approx(s.x_grid[i]).epsilon(1e-12).scale(1e-14));
}

TEST_CASE("unanchored periodic data") {
  const InitialDatum c(TrigPolynomial{0.0, {}, {1.0 / (2.0 * oracle::pi)}}, Bc::Periodic);
  const EtaTimeMap m = map_of(c);
  CHECK(flow_map(m, 0.2, 0.5).label_relative);
  try {
    eulerian_slice(m, 0.5, 11);
    FAIL("expected UnanchoredFlow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnanchoredFlow);
  }
}
