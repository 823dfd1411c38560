#include "stagpoint/time_map.hpp"

#include <algorithm>
#include <cmath>
// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "stagpoint/error.hpp"
#include "stagpoint/parallel.hpp"
#include "stagpoint/quadrature.hpp"

namespace stagpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Smallest gap the tail quadrature descends to before switching to the model.
constexpr double kGapFloor = 1e-280;
constexpr double kTailDepth = 60.0;
// Node spacing in eta when M0 <= 0.
constexpr double kEtaStep = 0.125;
constexpr double kEtaTable = 16.0;

quad::Options time_quad_options() {
  quad::Options o;
  o.rel_tol = 1e-13;
  o.max_evals = 200000;
  return o;
}

}  // namespace

EtaTimeMap::EtaTimeMap(const InitialDatum& datum, const CriticalProfile& profile, const TimeMapOptions& options)
    : options_(options), t_star_(kInf) {
  if (!(options.quad_tol > 0.0)) throw Error(ErrorCode::InvalidInput, "quad_tol must be positive");
  if (!(options.eta_gap > 0.0 && options.eta_gap < 1.0))
    throw Error(ErrorCode::InvalidInput, "eta_gap must lie in (0, 1)");
  if (options.nodes_per_octave < 1) throw Error(ErrorCode::InvalidInput, "nodes_per_octave must be >= 1");

  KernelOptions ko;
  ko.rel_tol = options.quad_tol;
  kernel_ = std::make_shared<const Kernel>(datum, profile, ko);
  trivial_ = datum.is_trivial();

  std::vector<EtaPoint> points;
  if (profile.positive()) {
    const double es = profile.eta_star;
    const double g_end = options.eta_gap * es;
    for (int j = 0;; ++j) {
      const double g = es * std::exp2(-static_cast<double>(j) / options.nodes_per_octave);
      if (!(g > g_end * (1.0 + 1e-9))) break;
      points.push_back(kernel_->at_gap(g));
    }
    points.push_back(kernel_->at_gap(g_end));
    rate_ = asymptotic_rates(profile, 1);
    finite_ = profile.dominant_exponent() < 2.0;
  } else {
    for (double eta = 0.0; eta <= kEtaTable; eta += kEtaStep) points.push_back(kernel_->at_eta(eta));
  }

  const std::size_t n = points.size();
  samples_.resize(n);
  log_gap_.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const Moments m = kernel_->moments(points[i]);
    samples_[i] = {points[i].eta, points[i].gap, 0.0, m.k0, m.k1};
  });
  for (std::size_t i = 0; i < n; ++i) log_gap_[i] = profile.positive() ? std::log(points[i].gap) : points[i].eta;

  std::vector<double> dt(n, 0.0);
  parallel_for(n - 1, [&](std::size_t i) { dt[i + 1] = t_between(log_gap_[i], log_gap_[i + 1]); });
  for (std::size_t i = 1; i < n; ++i) samples_[i].t = samples_[i - 1].t + dt[i];
  if (trivial_)
    for (auto& s : samples_) s.t = s.eta;

  if (finite_) t_star_ = samples_.back().t + tail_below(samples_.back().gap);
}

double EtaTimeMap::kbar0(const EtaPoint& p) const { return kernel_->moments(p).k0; }

// Coordinates are x = ln(gap) when M0 > 0 (t decreasing in x) and x = eta
// otherwise (t increasing in x). Returns t(to) - t(from).
double EtaTimeMap::t_between(double from, double to) const {
  if (from == to) return 0.0;
  if (trivial_) return to - from;
  const bool positive = profile().positive();
  const double es = eta_star();
  const auto f = [&](double x) {
    if (!positive) {
      const double k0 = kbar0(kernel_->at_eta(x));
      return k0 * k0;
    }
    const double g = std::min(std::exp(x), es);
    const double k0 = kbar0(kernel_->at_gap(g));
    return k0 * k0 * g;
  };
  const double lo = std::min(from, to), hi = std::max(from, to);
  const auto r = quad::integrate_scalar(f, lo, hi, time_quad_options());
  if (!r.converged)
    throw QuadratureBudgetExceeded("time integral did not converge", r.value[0], r.error[0]);
  const double v = r.value[0];
  if (positive) return from > to ? v : -v;
  return to > from ? v : -v;
}

// int_0^gap kbar0^2 d(gap'), numerically down to a deep cutoff and by the
// leading law below it.
double EtaTimeMap::tail_below(double gap) const {
  const double s_hi = std::log(gap);
  const double s_lo = std::max(s_hi - kTailDepth, std::log(kGapFloor));
  double tail = s_lo < s_hi ? t_between(s_hi, s_lo) : 0.0;
  const double g = std::exp(s_lo);
  const double k0 = kbar0(kernel_->at_gap(g));
  if (rate_.log_correction()) {
    const double a = rate_.constant;
    const double l = std::log(g);
    const double b = k0 + a * l;
    tail += a * a * g * (l * l - 2.0 * l + 2.0) - 2.0 * a * b * g * (l - 1.0) + b * b * g;
  } else {
    const double e = rate_.exponent;
    const double c = k0 / std::pow(g, e);
    tail += c * c * std::pow(g, 2.0 * e + 1.0) / (2.0 * e + 1.0);
  }
  return tail;
}

double EtaTimeMap::t_of(const EtaPoint& p) const {
  if (trivial_) return p.eta;
  const bool positive = profile().positive();
  const double x = positive ? std::log(p.gap) : p.eta;
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_gap_.size(); ++i)
    if (std::abs(log_gap_[i] - x) < std::abs(log_gap_[best] - x)) best = i;
  return samples_[best].t + t_between(log_gap_[best], x);
}

EtaPoint EtaTimeMap::refine(double t, double x_guess, double x_lo, double x_hi) const {
  const bool positive = profile().positive();
  const auto point = [&](double x) {
    return positive ? kernel_->at_gap(std::min(std::exp(x), eta_star())) : kernel_->at_eta(std::max(x, 0.0));
  };
  // dt/dx
  const auto slope = [&](double x) {
    const EtaPoint p = point(x);
    const double k0 = kbar0(p);
    return positive ? -k0 * k0 * p.gap : k0 * k0;
  };

  std::size_t best = 0;
  for (std::size_t i = 1; i < log_gap_.size(); ++i)
    if (std::abs(log_gap_[i] - x_guess) < std::abs(log_gap_[best] - x_guess)) best = i;
  double x = x_guess;
  double tx = samples_[best].t + t_between(log_gap_[best], x);
  const double tol = 1e-13 * std::max(1.0, t);

  for (int it = 0; it < 100; ++it) {
    const double resid = tx - t;
    if (std::abs(resid) <= tol) break;
    // t is monotone in x; keep a bracket for bisection fallback.
    if (positive == (resid > 0.0)) {
      x_lo = x;
    } else {
      x_hi = x;
    }
    double x_new = x - resid / slope(x);
    if (!(x_new > x_lo && x_new < x_hi)) {
      if (std::isfinite(x_lo) && std::isfinite(x_hi)) {
        x_new = 0.5 * (x_lo + x_hi);
      } else {
        x_new = std::isfinite(x_lo) ? x_lo + 2.0 * std::max(1.0, std::abs(x - x_lo)) : x_hi - 2.0 * std::max(1.0, std::abs(x_hi - x));
      }
    }
    if (positive && x_new < std::log(kGapFloor)) x_new = std::log(kGapFloor);
    if (x_new == x) break;
    tx += t_between(x, x_new);
    x = x_new;
  }
  return point(x);
}

EtaPoint EtaTimeMap::point_of_t(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorCode::DomainError, "time must be nonnegative");
  if (t >= t_star_) throw Error(ErrorCode::BeyondBlowup, "t = " + std::to_string(t) + " is not below t*");
  if (t == 0.0) return kernel_->at_eta(0.0);
  if (trivial_) return kernel_->at_eta(t);

  const bool positive = profile().positive();
  const auto& last = samples_.back();
  const double x_last = log_gap_.back();

  if (t <= last.t) {
    std::vector<double> ts, xs;
    ts.reserve(samples_.size());
    xs.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      ts.push_back(samples_[i].t);
      xs.push_back(log_gap_[i]);
    }
    double guess;
    if (ts.size() >= 4) {
      boost::math::interpolators::pchip<std::vector<double>> inverse(std::move(ts), std::move(xs));
      guess = inverse(t);
    } else {
      const auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t j = std::clamp<std::size_t>(it - ts.begin(), 1, ts.size() - 1);
      guess = xs[j - 1] + (xs[j] - xs[j - 1]) * (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
    }
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                     [](double v, const MapSample& s) { return v < s.t; });
    const std::size_t j = std::clamp<std::size_t>(it - samples_.begin(), 1, samples_.size() - 1);
    const double a = log_gap_[j - 1], b = log_gap_[j];
    return refine(t, guess, std::min(a, b), std::max(a, b));
  }

  // Beyond the table: guess from the leading law, then polish.
  if (!positive) {
    const double k0 = last.kbar0;
    return refine(t, x_last + (t - last.t) / (k0 * k0), x_last, kInf);
  }
  const double g = last.gap;
  double guess;
  if (rate_.log_correction() || finite_) {
    // t* - t ~ kbar0(g)^2 g up to logs; a crude guess is enough for the bracketed Newton.
    const double remaining = t_star_ - t;
    guess = std::log(std::max(remaining / (last.kbar0 * last.kbar0), kGapFloor));
    guess = std::min(guess, x_last);
  } else {
    const double e = rate_.exponent;
    const double c = last.kbar0 / std::pow(g, e);
    const double w = 2.0 * e + 1.0;
    if (std::abs(w) < 1e-12) {
      guess = x_last - (t - last.t) / (c * c);
    } else {
      const double base = std::pow(g, w) + w * (last.t - t) / (c * c);
      guess = base > 0.0 ? std::log(base) / w : std::log(kGapFloor);
    }
  }
  return refine(t, std::max(guess, std::log(kGapFloor)), -kInf, x_last);
}

void EtaTimeMap::write_csv(std::ostream& out) const {
  out << "eta,t,kbar0,kbar1\n";
  char line[128];
  for (const auto& s : samples_) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", s.eta, s.t, s.kbar0, s.kbar1);
    out << line;
  }
}

EtaTimeMap build_map(const InitialDatum& datum, const CriticalProfile& profile, double quad_tol, double eta_gap) {
  TimeMapOptions o;
  o.quad_tol = quad_tol;
  o.eta_gap = eta_gap;
  return EtaTimeMap(datum, profile, o);
}

double blowup_time(const EtaTimeMap& map, const CriticalProfile& profile) {
  if (!profile.positive() || profile.dominant_exponent() >= 2.0) return kInf;
  return map.t_star();
}

double eta_of_t(const EtaTimeMap& map, double t) { return map.eta_of_t(t); }

}  // namespace stagpoint
