#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature for vector-valued
// integrands, after QUADPACK's qag. Panels are refined worst-first and the
// final sum is taken in order of panel position, so results are reproducible.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace stagpoint::quad {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  std::size_t max_evals = 4'000'000;
};

template <std::size_t N>
struct Result {
  Vec<N> value{};
  Vec<N> error{};
  Vec<N> magnitude{};  // integral of |f|, the scale tolerances refer to
  std::size_t evals = 0;
  bool converged = true;
};

struct Interval {
  double a;
  double b;
};

namespace detail {

// Kronrod abscissae and weights (QUADPACK dqk15).
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
  double a, b;
  Vec<N> value, error, magnitude;
  double priority;
};

template <std::size_t N, class F>
Panel<N> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<Vec<N>, 15> fv;
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  Panel<N> p{a, b, {}, {}, {}, 0.0};
  for (std::size_t c = 0; c < N; ++c) {
    double rk = wgk[7] * fv[7][c];
    double rg = wg[3] * fv[7][c];
    double rabs = std::abs(rk);
    for (int j = 0; j < 7; ++j) {
      const double s = fv[j][c] + fv[14 - j][c];
      rk += wgk[j] * s;
      rabs += wgk[j] * (std::abs(fv[j][c]) + std::abs(fv[14 - j][c]));
      if (j % 2 == 1) rg += wg[j / 2] * s;
    }
    const double mean = 0.5 * rk;
    double rasc = wgk[7] * std::abs(fv[7][c] - mean);
    for (int j = 0; j < 7; ++j) {
      rasc += wgk[j] * (std::abs(fv[j][c] - mean) + std::abs(fv[14 - j][c] - mean));
    }
    rk *= half;
    rg *= half;
    rabs *= std::abs(half);
    rasc *= std::abs(half);
    double err = std::abs(rk - rg);
    if (rasc != 0.0 && err != 0.0) err = rasc * std::min(1.0, std::pow(200.0 * err / rasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (rabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * rabs, err);
    if (!std::isfinite(rk)) err = std::numeric_limits<double>::infinity();
    p.value[c] = rk;
    p.error[c] = err;
    p.magnitude[c] = rabs;
  }
  return p;
}

}  // namespace detail

/// Integrates f over the union of `intervals`. f maps a double to Vec<N>.
/// Convergence requires, per component, total error <= max(abs_tol,
/// rel_tol * integral of |f|).
template <std::size_t N, class F>
Result<N> integrate(F&& f, std::span<const Interval> intervals, const Options& opt = {}) {
  using P = detail::Panel<N>;
  std::vector<P> panels;
  Result<N> res;
  for (const auto& iv : intervals) {
    if (!(iv.b > iv.a)) continue;
    panels.push_back(detail::gk15<N>(f, iv.a, iv.b));
    res.evals += 15;
  }
  if (panels.empty()) return res;

  const auto totals = [&](Vec<N>& err, Vec<N>& mag) {
    err.fill(0.0);
    mag.fill(0.0);
    for (const auto& p : panels) {
      for (std::size_t c = 0; c < N; ++c) {
        err[c] += p.error[c];
        mag[c] += p.magnitude[c];
      }
    }
  };
  const auto tolerance = [&](const Vec<N>& mag, std::size_t c) {
    return std::max(opt.abs_tol, opt.rel_tol * mag[c]);
  };

  Vec<N> err, mag;
  totals(err, mag);
  const auto priority = [&](const P& p) {
    double worst = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
      const double tol = std::max(tolerance(mag, c), std::numeric_limits<double>::min());
      worst = std::max(worst, p.error[c] / tol);
    }
    return worst;
  };

  const auto cmp = [&](std::size_t i, std::size_t j) { return panels[i].priority < panels[j].priority; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> queue(cmp);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    panels[i].priority = priority(panels[i]);
    queue.push(i);
  }

  const auto done = [&] {
    for (std::size_t c = 0; c < N; ++c)
      if (err[c] > tolerance(mag, c)) return false;
    return true;
  };

  while (!done()) {
    if (res.evals + 30 > opt.max_evals || queue.empty()) {
      res.converged = false;
      break;
    }
    const std::size_t i = queue.top();
    queue.pop();
    const P old = panels[i];
    const double mid = 0.5 * (old.a + old.b);
    if (!(mid > old.a && mid < old.b)) {
      // Cannot split further; leave the panel as is.
      continue;
    }
    P left = detail::gk15<N>(f, old.a, mid);
    P right = detail::gk15<N>(f, mid, old.b);
    res.evals += 30;
    for (std::size_t c = 0; c < N; ++c) {
      err[c] += left.error[c] + right.error[c] - old.error[c];
      mag[c] += left.magnitude[c] + right.magnitude[c] - old.magnitude[c];
    }
    left.priority = priority(left);
    right.priority = priority(right);
    panels[i] = left;
    panels.push_back(right);
    queue.push(i);
    queue.push(panels.size() - 1);
  }

  std::sort(panels.begin(), panels.end(), [](const P& x, const P& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    for (std::size_t c = 0; c < N; ++c) {
      res.value[c] += p.value[c];
      res.error[c] += p.error[c];
      res.magnitude[c] += p.magnitude[c];
    }
  }
  return res;
}

/// Scalar convenience wrapper.
template <class F>
Result<1> integrate_scalar(F&& f, double a, double b, const Options& opt = {}) {
  const Interval iv{a, b};
  auto g = [&](double x) { return Vec<1>{f(x)}; };
  return integrate<1>(g, std::span<const Interval>(&iv, 1), opt);
}

}  // namespace stagpoint::quad
